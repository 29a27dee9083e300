#pragma once

#include <Eigen/Core>
#include <string>

namespace rcp {

enum class KernelId { FlatTop, Bartlett };

// Flat-top lag weight: 1 on [0, 1/2], linear decay to 0 at 1, 0 beyond.
double flat_top_kernel(double x);
// Bartlett weight (PSD-guaranteed alternative): max(1 - x, 0).
double bartlett_kernel(double x);
double kernel_weight(KernelId id, double x);
std::string kernel_name(KernelId id);

// Paper bandwidth rules: 0.9 T^{1/3} for s = 1, log_{1.8 + s/40}(T/50) for
// s > 1, floored at 1 when the log is undefined or below 1.
double default_bandwidth(int t, int s);

enum class BaselineBandwidth { Mq, MD, GMD, CovMultivariate };

// Fixed per-estimator bandwidths (M_q: 0.9 T^{1/3}; MD/GMD: T^{1/4};
// multivariate Huber/Cov: log_{1.8 + p(p+1)/40}(T/50), floored at 1).
double baseline_bandwidth(BaselineBandwidth id, int t, int p = 1);

struct LongRunCov {
  Eigen::MatrixXd u_hat;  // symmetric, eigenvalue-floored
  double bandwidth = 0.0;
  KernelId kernel = KernelId::FlatTop;
  bool eigen_floor_applied = false;
  double min_eigenvalue = 0.0;
};

// Kernel long-run covariance of a T x s series, computed by the lag-sum
// form Gamma_0 + sum_h w_h (Gamma_h + Gamma_h'). Eigenvalues below
// 1e-10 * lambda_max are raised to that floor; an all-constant input gives
// DegenerateLrvError.
LongRunCov long_run_cov(const Eigen::MatrixXd& y, double bandwidth,
                        KernelId kernel = KernelId::FlatTop);

// Symmetric inverse of the repaired matrix via eigendecomposition.
Eigen::MatrixXd invert_spd(const LongRunCov& lrv);

}  // namespace rcp
