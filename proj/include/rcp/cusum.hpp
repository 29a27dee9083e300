#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

#include "rcp/critical_values.hpp"
#include "rcp/longrun.hpp"
#include "rcp/psi.hpp"

namespace rcp {

struct CusumProcess {
  Eigen::VectorXd values;  // W_T^2(k/T) for k = 1..T
  int s = 1;
  int t = 0;
};

// Signed W_T(k/T) = (S_k - (k/T) S_T) / (sqrt(T) sqrt(v_hat)). The long-run
// standard deviation enters so that the limit is a standard Brownian bridge.
Eigen::VectorXd cusum_process_univariate(const Eigen::VectorXd& y, double v_hat);

// W_T^2(k/T) = d_k' U^{-1} d_k / T with d_k = S_k - (k/T) S_T.
CusumProcess cusum_process_quadratic(const Eigen::MatrixXd& y, const Eigen::MatrixXd& u_inv);

// Maximum and its first (earliest) 1-based index; the index is the
// change-point location estimate.
std::pair<double, int> sup_statistic(const CusumProcess& proc);

// Right-endpoint Riemann sum (1/T) sum_k values_k.
double integral_statistic(const CusumProcess& proc);

// max_{k<T} values_k / q(k/T); q must be positive on (0,1).
double weighted_sup_statistic(const CusumProcess& proc,
                              const std::function<double(double)>& q);

// sup|W_T| + |zeta(1/2)|/sqrt(2 pi T); compensates the discrete maximum's
// undershoot of the continuous supremum (univariate sup statistics only).
double finite_sample_correction(double sup_abs, int t);

enum class Functional { Sup, Integral, WeightedSup };
enum class CritMode { Auto, Table, MonteCarlo };

std::string functional_name(Functional f);

struct TestConfig {
  double alpha = 0.05;
  Functional functional = Functional::Sup;
  std::optional<double> bandwidth;  // default: default_bandwidth(T, s)
  KernelId kernel = KernelId::FlatTop;
  bool correction = true;  // applied only when s = 1 and functional = Sup
  CritMode crit_mode = CritMode::Auto;
  McQuantileConfig mc;
  std::function<double(double)> weight;  // WeightedSup only
  std::optional<double> critical_value_override;  // precomputed (experiment runner)
  double mad_consistency = kMadConsistency;
};

struct TestDiagnostics {
  double bandwidth = 0.0;
  KernelId kernel = KernelId::FlatTop;
  bool eigen_floor_applied = false;
  double min_eigenvalue = 0.0;
  double psi_bound = 0.0;
  double k_used = 0.0;
  int s = 0;
  int t = 0;
};

struct TestOutcome {
  double statistic = 0.0;  // raw functional value
  Functional functional = Functional::Sup;
  std::optional<double> corrected_statistic;
  double critical_value = 0.0;
  std::string critical_value_source;  // "table" | "mc" | "override"
  double alpha = 0.05;
  double p_value = 1.0;  // conservative bracket bound in table mode
  double p_value_se = 0.0;
  std::string p_value_mode;  // "mc" | "table-bracket"
  std::optional<std::pair<double, double>> p_bracket;
  bool reject = false;
  int change_point_index = 1;  // argmax of W_T^2, 1-based
  TestDiagnostics diagnostics;

  double statistic_used() const {
    return corrected_statistic ? *corrected_statistic : statistic;
  }
};

// Full pipeline: standardize, transform, long-run covariance, quadratic
// cusum, functional, critical value. Errors name the failing stage.
TestOutcome run_test(const Eigen::MatrixXd& x, const PsiSpec& spec, const TestConfig& config);

// Location/scale estimates the pipeline uses for a given variant:
// median/MAD, or mu = 0 with sigma = median for the uncentered variants.
LocScale pipeline_loc_scale(const Eigen::MatrixXd& x, const PsiSpec& spec,
                            double mad_consistency = kMadConsistency);

}  // namespace rcp
