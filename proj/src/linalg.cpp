#include "sweepplast/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "sweepplast/errors.hpp"

namespace sweepplast {

WeightedMetric::WeightedMetric(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw MetricError("metric must be square");
    if (!m_.allFinite()) throw MetricError("metric has non-finite entries");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw MetricError("metric is not symmetric");
    m_ = 0.5 * (m_ + m_.transpose());
    Eigen::LLT<Mat> llt(m_);
    if (llt.info() != Eigen::Success) throw MetricError("metric is not positive definite");
    Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
    if (m_.rows() > 0 && es.eigenvalues().minCoeff() <= 0.0)
        throw MetricError("metric is not positive definite");
    diagonal_ = m_.rows() == 0 ||
                (m_ - Mat(m_.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    if (diagonal_)
        inv_ = Mat(m_.diagonal().cwiseInverse().asDiagonal());
    else
        inv_ = llt.solve(Mat::Identity(m_.rows(), m_.cols()));
}

WeightedMetric WeightedMetric::identity(Eigen::Index n) {
    return WeightedMetric(Mat::Identity(n, n));
}

WeightedMetric WeightedMetric::diagonal(const Vec& w) {
    return WeightedMetric(Mat(w.asDiagonal()));
}

double WeightedMetric::inner(const Vec& a, const Vec& b) const {
    if (diagonal_) return (a.array() * m_.diagonal().array() * b.array()).sum();
    return a.dot(m_ * b);
}

double WeightedMetric::norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

WeightedMetric WeightedMetric::block(Eigen::Index start, Eigen::Index len) const {
    return WeightedMetric(Mat(m_.block(start, start, len, len)));
}

bool WeightedMetric::block_diagonal_for(const std::vector<Eigen::Index>& sizes) const {
    Eigen::Index off = 0;
    for (auto s : sizes) {
        for (Eigen::Index i = off; i < off + s; ++i)
            for (Eigen::Index j = 0; j < m_.cols(); ++j)
                if ((j < off || j >= off + s) && m_(i, j) != 0.0) return false;
        off += s;
    }
    return off == m_.rows();
}

double rank_threshold(const Vec& sv, Eigen::Index rows, Eigen::Index cols) {
    if (sv.size() == 0) return 0.0;
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
           sv.maxCoeff();
}

PinvReport pinv_report(const Mat& a) {
    PinvReport rep;
    rep.pinv = Mat::Zero(a.cols(), a.rows());
    if (a.size() == 0) return rep;
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const double tau = rank_threshold(s, a.rows(), a.cols());
    rep.sigma_max = s.size() ? s(0) : 0.0;
    double smin = 0.0;
    Vec sinv = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tau && s(i) > 0.0) {
            sinv(i) = 1.0 / s(i);
            smin = s(i);
            ++rep.rank;
        }
    }
    rep.pinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
    rep.condition = rep.rank ? rep.sigma_max / smin : 0.0;
    rep.ill_conditioned = rep.condition > 1e12;
    return rep;
}

Mat pinv(const Mat& a) {
    auto rep = pinv_report(a);
    if (rep.ill_conditioned)
        spdlog::warn("pinv: condition number {:.3e} exceeds 1e12", rep.condition);
    return rep.pinv;
}

Eigen::Index numerical_rank(const Mat& a) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const Vec& s = svd.singularValues();
    const double tau = rank_threshold(s, a.rows(), a.cols());
    return (s.array() > tau && s.array() > 0.0).count();
}

Mat null_space(const Mat& a) {
    const Eigen::Index n = a.cols();
    if (n == 0) return Mat(0, 0);
    if (a.rows() == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double tau = rank_threshold(s, a.rows(), a.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tau && s(i) > 0.0) ++r;
    return svd.matrixV().rightCols(n - r);
}

Mat range_space(const Mat& a) {
    if (a.size() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const Vec& s = svd.singularValues();
    const double tau = rank_threshold(s, a.rows(), a.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tau && s(i) > 0.0) ++r;
    return svd.matrixU().leftCols(r);
}

Mat weighted_projector(const Mat& basis, const WeightedMetric& metric) {
    if (basis.rows() != metric.dim()) throw RankError("basis and metric sizes differ");
    if (basis.cols() == 0) return Mat::Zero(basis.rows(), basis.rows());
    if (numerical_rank(basis) < basis.cols()) throw RankError("basis columns are dependent");
    const Mat mb = metric.matrix() * basis;
    const Mat gram = basis.transpose() * mb;
    Eigen::LDLT<Mat> ldlt(gram);
    return basis * ldlt.solve(mb.transpose());
}

double penrose_residual(const Mat& a, const Mat& ap) {
    const double na = std::max(a.norm(), 1e-300);
    const double np = std::max(ap.norm(), 1e-300);
    const double r1 = (a * ap * a - a).norm() / na;
    const double r2 = (ap * a * ap - ap).norm() / np;
    const Mat aap = a * ap;
    const Mat apa = ap * a;
    const double r3 = (aap - aap.transpose()).norm() / std::max(1.0, aap.norm());
    const double r4 = (apa - apa.transpose()).norm() / std::max(1.0, apa.norm());
    return std::max({r1, r2, r3, r4});
}

} // namespace sweepplast
