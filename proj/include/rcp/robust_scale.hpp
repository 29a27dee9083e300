#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>

namespace rcp {

// Gaussian-consistency factor so that MAD estimates the standard deviation
// under normal data.
inline constexpr double kMadConsistency = 1.4826;

// Sample median: middle order statistic for odd n, midpoint of the central
// pair for even n. Rejects empty or non-finite input.
double median(std::span<const double> sample);
double median(const Eigen::VectorXd& sample);

// Median absolute deviation about the median, scaled by `consistency_factor`.
// A zero-spread sample yields 0; callers decide whether that is an error.
double mad(std::span<const double> sample, double consistency_factor = kMadConsistency);
double mad(const Eigen::VectorXd& sample, double consistency_factor = kMadConsistency);

// Marginal medians and consistency-scaled MADs of a T x p series.
struct LocScale {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
};

// Column-wise (x - median) / mad. Throws ZeroScaleError(j) when column j has
// zero MAD.
std::pair<Eigen::MatrixXd, LocScale> standardize(const Eigen::MatrixXd& x,
                                                 double consistency_factor = kMadConsistency);

}  // namespace rcp
