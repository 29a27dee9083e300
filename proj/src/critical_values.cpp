#include "rcp/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "rcp/errors.hpp"
#include "rcp/rng.hpp"

namespace rcp {

double sup_correction_constant() {
  static const double c = kAbsZetaHalf / std::sqrt(2.0 * M_PI);
  return c;
}

namespace {

const std::vector<int> kDims = {1, 2, 3, 4, 5, 10, 20, 50, 100};
const std::vector<double> kAlphas = {0.9, 0.95, 0.975, 0.99};

// Quantiles of sup_{0<x<1} sum_{i<=s} BB_i(x)^2, rows by alpha, columns by s.
const double kQuantiles[4][9] = {
    {1.500, 2.114, 2.623, 3.083, 3.514, 5.450, 8.885, 18.172, 32.624},
    {1.844, 2.508, 3.053, 3.543, 4.000, 6.041, 9.626, 19.219, 34.022},
    {2.191, 2.894, 3.469, 3.984, 4.464, 6.595, 10.310, 20.168, 35.276},
    {2.649, 3.396, 4.004, 4.548, 5.053, 7.288, 11.154, 21.321, 36.783}};

struct TableCheck {
  TableCheck() {
    // strictly increasing in s for fixed alpha and in alpha for fixed s
    for (int a = 0; a < 4; ++a) {
      for (int d = 1; d < 9; ++d) {
        if (!(kQuantiles[a][d] > kQuantiles[a][d - 1])) {
          throw std::logic_error("quantile table not increasing in s");
        }
      }
    }
    for (int d = 0; d < 9; ++d) {
      for (int a = 1; a < 4; ++a) {
        if (!(kQuantiles[a][d] > kQuantiles[a - 1][d])) {
          throw std::logic_error("quantile table not increasing in alpha");
        }
      }
    }
  }
};

int alpha_index(double alpha) {
  for (std::size_t i = 0; i < kAlphas.size(); ++i) {
    if (std::abs(alpha - kAlphas[i]) < 1e-9) return static_cast<int>(i);
  }
  return -1;
}

int dim_index(int s) {
  for (std::size_t i = 0; i < kDims.size(); ++i) {
    if (kDims[i] == s) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

const std::vector<int>& tabulated_dims() { return kDims; }
const std::vector<double>& tabulated_alphas() { return kAlphas; }

bool is_tabulated(int s, double alpha) {
  return dim_index(s) >= 0 && alpha_index(alpha) >= 0;
}

double lookup_quantile(int s, double alpha) {
  static const TableCheck checked;
  const int di = dim_index(s);
  const int ai = alpha_index(alpha);
  if (di < 0 || ai < 0) {
    throw NotTabulatedError("s=" + std::to_string(s) + ", alpha=" + std::to_string(alpha));
  }
  return kQuantiles[ai][di];
}

void McQuantileConfig::validate() const {
  if (n_grid < 100) throw std::invalid_argument("McQuantileConfig: n_grid must be >= 100");
  if (n_rep < 1000) throw std::invalid_argument("McQuantileConfig: n_rep must be >= 1000");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RCP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

// Functional of the accumulated squared-bridge values for one replication.
struct FunctionalEval {
  BridgeFunctional kind;
  const std::vector<double>* inv_weight;  // WeightedSup: 1/q(j/n) for j=1..n-1

  double operator()(const std::vector<double>& acc) const {
    const std::size_t n = acc.size();
    switch (kind) {
      case BridgeFunctional::Sup: {
        double m = 0.0;
        for (double v : acc) m = std::max(m, v);
        return m;
      }
      case BridgeFunctional::Integral: {
        double s = 0.0;
        for (double v : acc) s += v;
        return s / static_cast<double>(n);
      }
      case BridgeFunctional::WeightedSup: {
        double m = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) m = std::max(m, acc[j] * (*inv_weight)[j]);
        return m;
      }
    }
    return 0.0;
  }
};

// Core sampler: for each replication accumulate squared bridges over the
// grid, evaluating the functional at the requested dimension checkpoints.
// Replication r, bridge i draws from the Philox stream (seed; r, i, kBridge),
// so results are a pure function of the config.
void run_replications(const std::vector<int>& dims, const McQuantileConfig& cfg,
                      const FunctionalEval& eval,
                      std::vector<std::vector<double>>& out) {
  const int n = cfg.n_grid;
  const int s_max = dims.back();
  const int n_threads = std::min(resolve_threads(cfg.threads), cfg.n_rep);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  std::vector<double> frac(n);  // (j+1)/n
  for (int j = 0; j < n; ++j) frac[j] = static_cast<double>(j + 1) / n;

  auto worker = [&](int rep_lo, int rep_hi) {
    std::vector<double> cum(n);
    std::vector<double> acc(n);
    for (int r = rep_lo; r < rep_hi; ++r) {
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t next_dim = 0;
      for (int i = 0; i < s_max; ++i) {
        rng::CounterStream st(cfg.seed,
                              {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(i),
                               rng::tags::kBridge});
        double run = 0.0;
        for (int j = 0; j < n; ++j) {
          run += st.normal();
          cum[j] = run;
        }
        const double total = cum[n - 1];
        for (int j = 0; j < n; ++j) {
          const double b = (cum[j] - frac[j] * total) * inv_sqrt_n;
          acc[j] += b * b;
        }
        if (i + 1 == dims[next_dim]) {
          out[next_dim][r] = eval(acc);
          ++next_dim;
        }
      }
    }
  };

  if (n_threads <= 1) {
    worker(0, cfg.n_rep);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  const int chunk = (cfg.n_rep + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(cfg.n_rep, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(worker, lo, hi);
  }
  for (auto& th : pool) th.join();
}

std::vector<double> make_inv_weight(const std::function<double(double)>& weight, int n) {
  if (!weight) throw std::invalid_argument("weighted-sup simulation requires a weight function");
  std::vector<double> inv(n - 1);
  for (int j = 1; j < n; ++j) {
    const double q = weight(static_cast<double>(j) / n);
    if (!(q > 0.0)) throw std::invalid_argument("weight function must be positive on (0,1)");
    inv[j - 1] = 1.0 / q;
  }
  return inv;
}

double apply_sup_correction(double value, int n_grid) {
  const double c = sup_correction_constant() / std::sqrt(static_cast<double>(n_grid));
  const double root = std::sqrt(std::max(value, 0.0)) + c;
  return root * root;
}

}  // namespace

std::vector<std::vector<double>> bessel_sup_samples_multi(const std::vector<int>& dims,
                                                          const McQuantileConfig& cfg) {
  cfg.validate();
  if (dims.empty()) throw std::invalid_argument("bessel_sup_samples_multi: dims empty");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || (i > 0 && dims[i] <= dims[i - 1])) {
      throw std::invalid_argument("bessel_sup_samples_multi: dims must be strictly increasing");
    }
  }
  std::vector<std::vector<double>> out(dims.size(), std::vector<double>(cfg.n_rep));
  FunctionalEval eval{BridgeFunctional::Sup, nullptr};
  run_replications(dims, cfg, eval, out);
  return out;
}

std::vector<double> bessel_functional_samples(int s, const McQuantileConfig& cfg,
                                              BridgeFunctional functional,
                                              const std::function<double(double)>& weight) {
  cfg.validate();
  if (s < 1) throw std::invalid_argument("bessel_functional_samples: s must be >= 1");
  std::vector<std::vector<double>> out(1, std::vector<double>(cfg.n_rep));
  std::vector<double> inv_w;
  FunctionalEval eval{functional, nullptr};
  if (functional == BridgeFunctional::WeightedSup) {
    inv_w = make_inv_weight(weight, cfg.n_grid);
    eval.inv_weight = &inv_w;
  }
  run_replications({s}, cfg, eval, out);
  return std::move(out[0]);
}

double quantile_of_samples(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw std::invalid_argument("quantile_of_samples: empty");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("quantile_of_samples: alpha must be in (0,1)");
  }
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto idx = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
  idx = std::min(std::max<std::size_t>(idx, 1), n);
  return samples[idx - 1];
}

double simulate_bessel_sup_quantile(int s, double alpha, const McQuantileConfig& cfg) {
  auto samples = bessel_functional_samples(s, cfg, BridgeFunctional::Sup);
  const double q = quantile_of_samples(std::move(samples), alpha);
  return cfg.correction ? apply_sup_correction(q, cfg.n_grid) : q;
}

PValue p_value(double statistic, int s, const McQuantileConfig& cfg,
               BridgeFunctional functional, const std::function<double(double)>& weight) {
  if (!(statistic >= 0.0)) throw std::invalid_argument("p_value: statistic must be >= 0");
  auto samples = bessel_functional_samples(s, cfg, functional, weight);
  const bool correct = cfg.correction && functional == BridgeFunctional::Sup;
  std::size_t exceed = 0;
  for (double m : samples) {
    const double v = correct ? apply_sup_correction(m, cfg.n_grid) : m;
    if (v > statistic) ++exceed;
  }
  PValue out;
  out.value = static_cast<double>(exceed) / static_cast<double>(cfg.n_rep);
  out.mc_se = 1.0 / std::sqrt(static_cast<double>(cfg.n_rep));
  return out;
}

}  // namespace rcp
