#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sweepplast/elastic.hpp"
#include "sweepplast/hardening.hpp"

namespace sweepplast {

enum class ModelKind { Network, Rod };
enum class PlasticityKind { None, Perfect, Hardening };

// In-memory form of a .scn file.  Sections: [model], [rod], [loads], [plasticity],
// [hardening], [time], [output].  See scenarios/ for complete files.
struct Scenario {
    std::string name = "scenario";
    ModelKind model = ModelKind::Network;
    NetworkModel network;
    LoadProgram loads;  // network only
    RodSpec rod;
    ElasticPath rod_path = ElasticPath::ExactIntegral;
    PlasticityKind plasticity = PlasticityKind::Perfect;
    HardeningSpec hardening;  // unresolved; single curves are broadcast
    double t_end = 1.0;
    double dt = 0.01;
    double cq_time = -1.0;     // negative selects t_end
    std::vector<int> meshes;   // refinement study
    std::vector<std::string> artifacts;

    // Throws ParseError.
    void validate() const;
};

// Throws ParseError with the source name and, where known, the line.
Scenario parse_scenario(std::istream& in, const std::string& source = "<stream>");
Scenario load_scenario(const std::string& path);

// Numbers are written with 17 significant digits so that parsing restores them exactly.
void write_scenario(std::ostream& out, const Scenario& sc);

bool same_scenario(const Scenario& a, const Scenario& b);

} // namespace sweepplast
