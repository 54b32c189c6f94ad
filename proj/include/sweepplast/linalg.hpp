#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sweepplast {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Symmetric positive-definite matrix defining <a,b>_M = a^T M b.
class WeightedMetric {
public:
    WeightedMetric() = default;
    explicit WeightedMetric(Mat m);

    static WeightedMetric identity(Eigen::Index n);
    static WeightedMetric diagonal(const Vec& w);

    Eigen::Index dim() const { return m_.rows(); }
    const Mat& matrix() const { return m_; }
    const Mat& inverse() const { return inv_; }
    bool is_diagonal() const { return diagonal_; }

    double inner(const Vec& a, const Vec& b) const;
    double norm(const Vec& a) const;

    // Restriction to a sub-block of coordinates [start, start+len).
    WeightedMetric block(Eigen::Index start, Eigen::Index len) const;
    bool block_diagonal_for(const std::vector<Eigen::Index>& sizes) const;

private:
    Mat m_;
    Mat inv_;
    bool diagonal_ = true;
};

struct PinvReport {
    Mat pinv;
    Eigen::Index rank = 0;
    double sigma_max = 0.0;
    double condition = 0.0;  // sigma_max / smallest retained singular value
    bool ill_conditioned = false;
};

// Rank threshold used throughout: max(rows, cols) * eps * sigma_max.
double rank_threshold(const Vec& singular_values, Eigen::Index rows, Eigen::Index cols);

PinvReport pinv_report(const Mat& a);
// Logs a warning when the retained condition number exceeds 1e12.
Mat pinv(const Mat& a);

Eigen::Index numerical_rank(const Mat& a);

// Orthonormal basis of Ker A (n x k, possibly k = 0).
Mat null_space(const Mat& a);
// Orthonormal basis of Im A.
Mat range_space(const Mat& a);

// P = B (B^T M B)^{-1} B^T M.  Throws RankError on dependent columns.
Mat weighted_projector(const Mat& basis, const WeightedMetric& metric);

// Largest of the four Penrose residuals, each relative to ||A|| or ||A+||.
double penrose_residual(const Mat& a, const Mat& ap);

} // namespace sweepplast
