#pragma once

#include <stdexcept>
#include <string>

namespace sweepplast {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RankError : public Error { public: using Error::Error; };
class MetricError : public Error { public: using Error::Error; };
class InvalidSet : public Error { public: using Error::Error; };
class EmptySet : public Error { public: using Error::Error; };
class PointNotInSet : public Error { public: using Error::Error; };
class Unbounded : public Error { public: using Error::Error; };
class Unsupported : public Error { public: using Error::Error; };
class UnresolvableLoad : public Error { public: using Error::Error; };
class InvalidModel : public Error { public: using Error::Error; };
class InitialConditionError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class MalformedCurve : public Error { public: using Error::Error; };
class InternalError : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };

// Thrown when C(t) is empty at some grid time; carries the offending time.
class SafeLoadViolation : public Error {
public:
    SafeLoadViolation(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

} // namespace sweepplast
