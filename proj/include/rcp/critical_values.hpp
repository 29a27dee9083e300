#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace rcp {

// Additive constant of the discrete-max correction: |zeta(1/2)| / sqrt(2 pi).
// The same constant drives the finite-sample test correction (divided by
// sqrt(T)) and the Monte-Carlo grid-bias correction (divided by sqrt(n_grid)).
inline constexpr double kAbsZetaHalf = 1.4603545088095868;
double sup_correction_constant();

// Tabulated dimensions and levels of the asymptotic quantiles of
// sup_x sum_i BB_i(x)^2.
const std::vector<int>& tabulated_dims();
const std::vector<double>& tabulated_alphas();
bool is_tabulated(int s, double alpha);
// Throws NotTabulatedError for combinations outside the table.
double lookup_quantile(int s, double alpha);

struct McQuantileConfig {
  int n_grid = 2000;
  int n_rep = 100000;
  std::uint64_t seed = 20250810;
  // Compensate the grid maximum's undershoot of the continuous supremum by
  // adding |zeta(1/2)|/sqrt(2 pi n_grid) on the radial scale.
  bool correction = true;
  int threads = 0;  // 0: hardware/RCP_THREADS default
  void validate() const;
};

enum class BridgeFunctional { Sup, Integral, WeightedSup };

// Per-replication functional values of the squared Bessel bridge of
// dimension s on the discretized grid. Raw (uncorrected) values;
// deterministic in (seed, replication) and independent of thread count.
std::vector<double> bessel_functional_samples(
    int s, const McQuantileConfig& cfg, BridgeFunctional functional = BridgeFunctional::Sup,
    const std::function<double(double)>& weight = {});

// One pass for several dimensions at once: dims must be strictly increasing;
// dimension d reuses the first d bridges of each replication.
std::vector<std::vector<double>> bessel_sup_samples_multi(const std::vector<int>& dims,
                                                          const McQuantileConfig& cfg);

// Empirical alpha-quantile (order statistic ceil(alpha n)) of the simulated
// sup, with the discretization correction applied when cfg.correction is set.
double simulate_bessel_sup_quantile(int s, double alpha, const McQuantileConfig& cfg);

// Quantile extracted from an existing sample vector (sorted internally).
double quantile_of_samples(std::vector<double> samples, double alpha);

struct PValue {
  double value = 1.0;
  double mc_se = 0.0;  // nominal 1/sqrt(n_rep)
};

// Fraction of simulated functional values strictly exceeding the statistic.
PValue p_value(double statistic, int s, const McQuantileConfig& cfg,
               BridgeFunctional functional = BridgeFunctional::Sup,
               const std::function<double(double)>& weight = {});

// Thread-count resolution honoring the RCP_THREADS environment variable.
int resolve_threads(int requested);

}  // namespace rcp
