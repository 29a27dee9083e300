#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace rcp {

enum class ScaleEstimator { MD, GMD };

std::string scale_estimator_name(ScaleEstimator e);

// Mean absolute deviation about the median: (1/n) sum |x_i - med(x)|.
double md_scale(const Eigen::VectorXd& sample);

// Gini mean difference 2/(n(n-1)) sum_{i<j} |x_i - x_j|, via the
// sorted-order identity in O(n log n).
double gmd_scale(const Eigen::VectorXd& sample);

// Running prefix curves s_{1:k} for k = 2..T (index 0 holds k = 2); computed
// incrementally with a Fenwick tree over value ranks, O(T log T) total.
std::vector<double> sequential_md_curve(const Eigen::VectorXd& x);
std::vector<double> sequential_gmd_curve(const Eigen::VectorXd& x);

struct ScaleCusumResult {
  double statistic = 0.0;   // max_k (k / sqrt(T v_hat)) |s_{1:k} - s_{1:T}|
  ScaleEstimator estimator = ScaleEstimator::MD;
  double v_hat = 0.0;
  bool corrected = false;
  double corrected_statistic = 0.0;
  double critical_value = 0.0;  // sqrt of the s=1 sup-BB^2 quantile
  double alpha = 0.05;
  bool reject = false;
  int change_point_index = 1;
  double bandwidth = 0.0;
};

// Scale-cusum benchmark test with the kernel long-run variance of the
// estimator's empirical influence values and the finite-sample correction.
ScaleCusumResult scale_cusum_test(const Eigen::VectorXd& x, ScaleEstimator estimator,
                                  double alpha = 0.05, bool correction = true);

}  // namespace rcp
