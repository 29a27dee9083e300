#include "rcp/experiment.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rcp/errors.hpp"
#include "rcp/longrun.hpp"

namespace rcp {

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::None: return "none";
    case SweepParam::Pi1: return "pi1";
    case SweepParam::Rho: return "rho";
    case SweepParam::Df: return "df";
    case SweepParam::T: return "T";
    case SweepParam::Delta: return "delta";
    case SweepParam::JumpS: return "s";
    case SweepParam::BreakFrac: return "b";
  }
  return "?";
}

SweepParam sweep_param_from_name(const std::string& name) {
  if (name == "pi1") return SweepParam::Pi1;
  if (name == "rho") return SweepParam::Rho;
  if (name == "df") return SweepParam::Df;
  if (name == "T") return SweepParam::T;
  if (name == "delta") return SweepParam::Delta;
  if (name == "s") return SweepParam::JumpS;
  if (name == "b") return SweepParam::BreakFrac;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("experiment: alpha must be in (0,1)");
  if (n_rep < 100) throw std::invalid_argument("experiment: n_rep must be >= 100 for reported rates");
  if (methods.empty()) throw std::invalid_argument("experiment: at least one method required");
  if (sweep != SweepParam::None && sweep_values.empty()) {
    throw std::invalid_argument("experiment: sweep given without values");
  }
  if (brk.kind == BreakDesign::Kind::CovSwitch &&
      !std::holds_alternative<Var1Spec>(generator)) {
    throw std::invalid_argument("experiment: covariance switch requires the var1 generator");
  }
  if (brk.kind == BreakDesign::Kind::ScaleJump && !brk.s_mag && !brk.delta) {
    throw std::invalid_argument("experiment: scale jump needs s or delta");
  }
}

namespace {

struct Scenario {
  std::variant<Arch1Spec, Var1Spec> generator;
  BreakDesign brk;
  std::string label;
  double value = 0.0;
};

Scenario make_scenario(const ExperimentConfig& cfg, double value) {
  Scenario sc{cfg.generator, cfg.brk, "base", value};
  if (cfg.sweep == SweepParam::None) return sc;
  std::ostringstream label;
  label << sweep_param_name(cfg.sweep) << "=" << value;
  sc.label = label.str();
  switch (cfg.sweep) {
    case SweepParam::Pi1:
      std::get<Arch1Spec>(sc.generator).pi1 = value;
      break;
    case SweepParam::Rho:
      std::get<Var1Spec>(sc.generator).rho = value;
      break;
    case SweepParam::Df:
      std::get<Var1Spec>(sc.generator).df = value;
      break;
    case SweepParam::T:
      std::visit([&](auto& g) { g.t = static_cast<int>(value); }, sc.generator);
      break;
    case SweepParam::Delta:
      sc.brk.sigma_after = sigma_delta(value);
      break;
    case SweepParam::JumpS:
      sc.brk.s_mag = value;
      break;
    case SweepParam::BreakFrac:
      sc.brk.b = value;
      break;
    case SweepParam::None:
      break;
  }
  return sc;
}

int generator_t(const Scenario& sc) {
  return std::visit([](const auto& g) { return g.t; }, sc.generator);
}

int generator_p(const Scenario& sc) {
  if (std::holds_alternative<Var1Spec>(sc.generator)) return std::get<Var1Spec>(sc.generator).p;
  return 1;
}

double generator_pi1(const Scenario& sc) {
  if (std::holds_alternative<Arch1Spec>(sc.generator)) return std::get<Arch1Spec>(sc.generator).pi1;
  return 0.0;
}

Eigen::MatrixXd generate_series(const Scenario& sc, std::uint64_t seed, std::uint32_t rep) {
  Eigen::MatrixXd x;
  if (std::holds_alternative<Arch1Spec>(sc.generator)) {
    x = gen_arch1(std::get<Arch1Spec>(sc.generator), seed, rep);
  } else {
    const auto& spec = std::get<Var1Spec>(sc.generator);
    std::optional<InnovationCovSwitch> sw;
    if (sc.brk.kind == BreakDesign::Kind::CovSwitch) {
      const Eigen::MatrixXd before =
          spec.shape.size() == 0 ? Eigen::MatrixXd::Identity(spec.p, spec.p) : spec.shape;
      sw = InnovationCovSwitch{before, sc.brk.sigma_after, sc.brk.t_switch};
    }
    x = gen_var1_t(spec, seed, rep, sw);
  }
  if (sc.brk.kind == BreakDesign::Kind::ScaleJump) {
    const double delta = sc.brk.delta
                             ? *sc.brk.delta
                             : jump_height(*sc.brk.s_mag, generator_t(sc), sc.brk.b,
                                           generator_pi1(sc));
    x = apply_break(x, ScaleJump{delta, sc.brk.b});
  }
  return x;
}

struct ResolvedPsiMethod {
  PsiSpec spec;
  TestConfig config;
};

ResolvedPsiMethod resolve_psi_method(const PsiMethod& m, const ExperimentConfig& cfg,
                                     int t, int p,
                                     std::map<std::pair<int, int>, double>& crit_cache) {
  ResolvedPsiMethod r;
  r.spec.variant = m.variant;
  r.spec.input_dim = p;
  r.spec.k = m.k;
  r.spec.chi2_level = m.chi2_level;
  r.spec.literal_marginal_cov = m.literal_marginal_cov;
  r.spec.direction = m.direction;
  r.spec.validate();

  r.config.alpha = cfg.alpha;
  r.config.functional = m.functional;
  r.config.correction = m.correction;
  r.config.mc = cfg.mc;
  switch (m.bw_rule) {
    case BandwidthRule::Default:
      break;
    case BandwidthRule::Bandmulti:
      r.config.bandwidth = baseline_bandwidth(BaselineBandwidth::CovMultivariate, t, p);
      break;
    case BandwidthRule::Mq:
      r.config.bandwidth = baseline_bandwidth(BaselineBandwidth::Mq, t);
      break;
    case BandwidthRule::Fixed:
      r.config.bandwidth = m.bw_fixed;
      break;
  }

  // resolve the critical value once per (s, functional)
  const int s = r.spec.output_dim();
  if (m.functional == Functional::Sup && is_tabulated(s, cfg.alpha)) {
    r.config.critical_value_override = lookup_quantile(s, cfg.alpha);
  } else if (m.functional != Functional::WeightedSup) {
    const auto key = std::make_pair(s, static_cast<int>(m.functional));
    auto it = crit_cache.find(key);
    if (it == crit_cache.end()) {
      if (m.functional == Functional::Sup) {
        it = crit_cache.emplace(key, simulate_bessel_sup_quantile(s, cfg.alpha, cfg.mc)).first;
      } else {
        auto samples = bessel_functional_samples(s, cfg.mc, BridgeFunctional::Integral);
        it = crit_cache.emplace(key, quantile_of_samples(std::move(samples), cfg.alpha)).first;
      }
    }
    r.config.critical_value_override = it->second;
  } else {
    throw std::invalid_argument("experiment: weighted-sup methods are not supported in the runner");
  }
  return r;
}

}  // namespace

RateTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> values = cfg.sweep == SweepParam::None ? std::vector<double>{0.0}
                                                             : cfg.sweep_values;
  RateTable table;
  std::map<std::pair<int, int>, double> crit_cache;

  for (double value : values) {
    const Scenario sc = make_scenario(cfg, value);
    const int t = generator_t(sc);
    const int p = generator_p(sc);
    const auto n_methods = cfg.methods.size();

    std::vector<ResolvedPsiMethod> psi_methods(n_methods);
    std::vector<int> kind(n_methods);  // 0 = psi, 1 = baseline
    for (std::size_t m = 0; m < n_methods; ++m) {
      if (std::holds_alternative<PsiMethod>(cfg.methods[m].method)) {
        kind[m] = 0;
        psi_methods[m] =
            resolve_psi_method(std::get<PsiMethod>(cfg.methods[m].method), cfg, t, p, crit_cache);
      } else {
        kind[m] = 1;
        if (p != 1) throw std::invalid_argument("experiment: MD/GMD baselines need p = 1");
      }
    }

    // outcome codes: 0 accept, 1 reject, 2 failed
    std::vector<std::uint8_t> outcome(static_cast<std::size_t>(cfg.n_rep) * n_methods, 0);
    auto worker = [&](int lo, int hi) {
      for (int r = lo; r < hi; ++r) {
        Eigen::MatrixXd x;
        bool gen_ok = true;
        try {
          x = generate_series(sc, cfg.seed, static_cast<std::uint32_t>(r));
        } catch (const std::exception&) {
          gen_ok = false;
        }
        for (std::size_t m = 0; m < n_methods; ++m) {
          auto& slot = outcome[static_cast<std::size_t>(r) * n_methods + m];
          if (!gen_ok) {
            slot = 2;
            continue;
          }
          try {
            bool reject;
            if (kind[m] == 0) {
              reject = run_test(x, psi_methods[m].spec, psi_methods[m].config).reject;
            } else {
              const auto& bm = std::get<BaselineMethod>(cfg.methods[m].method);
              reject = scale_cusum_test(x.col(0), bm.estimator, cfg.alpha, bm.correction).reject;
            }
            slot = reject ? 1 : 0;
          } catch (const std::exception&) {
            slot = 2;
          }
        }
      }
    };

    const int n_threads = std::min(resolve_threads(cfg.threads), cfg.n_rep);
    if (n_threads <= 1) {
      worker(0, cfg.n_rep);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (cfg.n_rep + n_threads - 1) / n_threads;
      for (int i = 0; i < n_threads; ++i) {
        const int lo = i * chunk;
        const int hi = std::min(cfg.n_rep, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    for (std::size_t m = 0; m < n_methods; ++m) {
      int rejects = 0;
      int fails = 0;
      for (int r = 0; r < cfg.n_rep; ++r) {
        const auto code = outcome[static_cast<std::size_t>(r) * n_methods + m];
        if (code == 2) ++fails;
        else if (code == 1) ++rejects;
      }
      const int n_eff = cfg.n_rep - fails;
      RateRow row;
      row.scenario = sc.label;
      row.param = sweep_param_name(cfg.sweep);
      row.value = value;
      row.method = cfg.methods[m].name;
      row.rate = n_eff > 0 ? static_cast<double>(rejects) / n_eff
                           : std::numeric_limits<double>::quiet_NaN();
      row.mc_se = n_eff > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / n_eff) : 0.0;
      row.n_fail = fails;
      row.n_rep = cfg.n_rep;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace rcp
