#include "rcp/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcp/errors.hpp"

namespace rcp {

Eigen::VectorXd cusum_process_univariate(const Eigen::VectorXd& y, double v_hat) {
  const auto t = y.size();
  if (t < 2) throw std::invalid_argument("cusum_process_univariate: need T >= 2");
  if (!(v_hat > 0.0)) throw std::invalid_argument("cusum_process_univariate: v_hat must be > 0");
  const double denom = std::sqrt(static_cast<double>(t)) * std::sqrt(v_hat);
  Eigen::VectorXd w(t);
  double run = 0.0;
  double total = y.sum();
  for (Eigen::Index k = 0; k < t; ++k) {
    run += y[k];
    w[k] = (run - (static_cast<double>(k + 1) / t) * total) / denom;
  }
  return w;
}

CusumProcess cusum_process_quadratic(const Eigen::MatrixXd& y, const Eigen::MatrixXd& u_inv) {
  const auto t = y.rows();
  const auto s = y.cols();
  if (t < 2) throw std::invalid_argument("cusum_process_quadratic: need T >= 2");
  if (u_inv.rows() != s || u_inv.cols() != s) {
    throw DimensionError("cusum_process_quadratic: u_inv dimension mismatch");
  }
  const Eigen::RowVectorXd total = y.colwise().sum();
  CusumProcess proc{Eigen::VectorXd(t), static_cast<int>(s), static_cast<int>(t)};
  Eigen::RowVectorXd run = Eigen::RowVectorXd::Zero(s);
  Eigen::RowVectorXd d(s);
  for (Eigen::Index k = 0; k < t; ++k) {
    run += y.row(k);
    d = run - (static_cast<double>(k + 1) / t) * total;
    proc.values[k] = d.dot(d * u_inv) / static_cast<double>(t);
  }
  return proc;
}

std::pair<double, int> sup_statistic(const CusumProcess& proc) {
  if (proc.values.size() == 0) throw std::invalid_argument("sup_statistic: empty process");
  double best = proc.values[0];
  Eigen::Index arg = 0;
  for (Eigen::Index k = 1; k < proc.values.size(); ++k) {
    if (proc.values[k] > best) {
      best = proc.values[k];
      arg = k;
    }
  }
  return {best, static_cast<int>(arg) + 1};
}

double integral_statistic(const CusumProcess& proc) {
  if (proc.values.size() == 0) throw std::invalid_argument("integral_statistic: empty process");
  return proc.values.sum() / static_cast<double>(proc.values.size());
}

double weighted_sup_statistic(const CusumProcess& proc,
                              const std::function<double(double)>& q) {
  const auto t = proc.values.size();
  if (t == 0) throw std::invalid_argument("weighted_sup_statistic: empty process");
  if (!q) throw std::invalid_argument("weighted_sup_statistic: weight function required");
  double best = 0.0;
  for (Eigen::Index k = 0; k + 1 < t; ++k) {
    const double w = q(static_cast<double>(k + 1) / static_cast<double>(t));
    if (!(w > 0.0)) throw std::invalid_argument("weighted_sup_statistic: weight must be > 0");
    best = std::max(best, proc.values[k] / w);
  }
  return best;
}

double finite_sample_correction(double sup_abs, int t) {
  if (t < 2) throw std::invalid_argument("finite_sample_correction: T must be >= 2");
  return sup_abs + sup_correction_constant() / std::sqrt(static_cast<double>(t));
}

std::string functional_name(Functional f) {
  switch (f) {
    case Functional::Sup: return "sup";
    case Functional::Integral: return "integral";
    case Functional::WeightedSup: return "weighted-sup";
  }
  return "?";
}

LocScale pipeline_loc_scale(const Eigen::MatrixXd& x, const PsiSpec& spec,
                            double mad_consistency) {
  const auto p = x.cols();
  if (spec.uses_centering()) {
    LocScale ls{Eigen::VectorXd(p), Eigen::VectorXd(p)};
    for (Eigen::Index j = 0; j < p; ++j) {
      const Eigen::VectorXd col = x.col(j);
      ls.mu[j] = median(col);
      ls.sigma[j] = mad(col, mad_consistency);
      if (!(ls.sigma[j] > 0.0)) throw ZeroScaleError(static_cast<int>(j));
    }
    return ls;
  }
  // ExpScore / LogHuberVar: no centering, scale is the raw median.
  LocScale ls{Eigen::VectorXd::Zero(p), Eigen::VectorXd(p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    ls.sigma[j] = median(Eigen::VectorXd(x.col(j)));
    if (!(ls.sigma[j] > 0.0)) throw ZeroScaleError(static_cast<int>(j));
  }
  return ls;
}

namespace {

BridgeFunctional to_bridge_functional(Functional f) {
  switch (f) {
    case Functional::Sup: return BridgeFunctional::Sup;
    case Functional::Integral: return BridgeFunctional::Integral;
    case Functional::WeightedSup: return BridgeFunctional::WeightedSup;
  }
  throw std::logic_error("unknown functional");
}

}  // namespace

TestOutcome run_test(const Eigen::MatrixXd& x, const PsiSpec& spec, const TestConfig& config) {
  const auto t = x.rows();
  if (t < 20) throw std::invalid_argument("run_test: need T >= 20 observations");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("run_test: alpha must be in (0,1)");
  }
  if (config.functional == Functional::WeightedSup && !config.weight) {
    throw std::invalid_argument("run_test: weighted-sup requires a weight function");
  }
  spec.validate();
  if (x.cols() != spec.input_dim) {
    throw DimensionError("run_test: series has " + std::to_string(x.cols()) +
                         " columns, psi spec expects " + std::to_string(spec.input_dim));
  }

  const LocScale ls = pipeline_loc_scale(x, spec, config.mad_consistency);
  const TransformedSeries ts = apply_psi(x, spec, ls);
  const int s = spec.output_dim();

  const double bandwidth =
      config.bandwidth ? *config.bandwidth : default_bandwidth(static_cast<int>(t), s);
  const LongRunCov lrv = long_run_cov(ts.y, bandwidth, config.kernel);
  const Eigen::MatrixXd u_inv = invert_spd(lrv);
  const CusumProcess proc = cusum_process_quadratic(ts.y, u_inv);

  TestOutcome out;
  out.functional = config.functional;
  out.alpha = config.alpha;
  const auto [sup_val, arg] = sup_statistic(proc);
  out.change_point_index = std::min(arg, static_cast<int>(t) - 1);
  switch (config.functional) {
    case Functional::Sup:
      out.statistic = sup_val;
      break;
    case Functional::Integral:
      out.statistic = integral_statistic(proc);
      break;
    case Functional::WeightedSup:
      out.statistic = weighted_sup_statistic(proc, config.weight);
      break;
  }

  if (config.correction && s == 1 && config.functional == Functional::Sup) {
    const double root = finite_sample_correction(std::sqrt(std::max(out.statistic, 0.0)),
                                                 static_cast<int>(t));
    out.corrected_statistic = root * root;
  }

  // critical value
  const bool sup_functional = config.functional == Functional::Sup;
  bool from_table = false;
  if (config.critical_value_override) {
    out.critical_value = *config.critical_value_override;
    out.critical_value_source = "override";
  } else {
    switch (config.crit_mode) {
      case CritMode::Table:
        out.critical_value = lookup_quantile(s, config.alpha);  // throws if absent
        from_table = true;
        break;
      case CritMode::Auto:
        if (sup_functional && is_tabulated(s, config.alpha)) {
          out.critical_value = lookup_quantile(s, config.alpha);
          from_table = true;
        }
        break;
      case CritMode::MonteCarlo:
        break;
    }
    if (from_table) {
      if (!sup_functional) {
        throw NotTabulatedError("only the sup functional has tabulated critical values");
      }
      out.critical_value_source = "table";
    } else {
      auto samples = bessel_functional_samples(s, config.mc, to_bridge_functional(config.functional),
                                               config.weight);
      if (sup_functional && config.mc.correction) {
        const double c = sup_correction_constant() / std::sqrt(static_cast<double>(config.mc.n_grid));
        for (double& m : samples) {
          const double root = std::sqrt(std::max(m, 0.0)) + c;
          m = root * root;
        }
      }
      std::sort(samples.begin(), samples.end());
      out.critical_value = quantile_of_samples(samples, config.alpha);
      out.critical_value_source = "mc";
      // Monte-Carlo p-value from the same sample
      std::size_t exceed = 0;
      for (double m : samples) {
        if (m > out.statistic_used()) ++exceed;
      }
      out.p_value = static_cast<double>(exceed) / static_cast<double>(samples.size());
      out.p_value_se = 1.0 / std::sqrt(static_cast<double>(samples.size()));
      out.p_value_mode = "mc";
    }
  }

  if (from_table || config.critical_value_override) {
    // bracket the p-value from the tabulated levels
    double lower = 0.0, upper = 1.0;
    const double stat = out.statistic_used();
    if (is_tabulated(s, 0.9)) {
      for (double a : tabulated_alphas()) {
        const double q = lookup_quantile(s, a);
        if (stat > q) upper = std::min(upper, 1.0 - a);
        else lower = std::max(lower, 1.0 - a);
      }
      out.p_bracket = std::make_pair(std::min(lower, upper), std::max(lower, upper));
      out.p_value = out.p_bracket->second;  // conservative upper bound
      out.p_value_se = 0.0;
      out.p_value_mode = "table-bracket";
    } else {
      out.p_value = 1.0;
      out.p_value_mode = "table-bracket";
      out.p_bracket = std::make_pair(0.0, 1.0);
    }
  }

  out.reject = out.statistic_used() > out.critical_value;

  out.diagnostics.bandwidth = bandwidth;
  out.diagnostics.kernel = config.kernel;
  out.diagnostics.eigen_floor_applied = lrv.eigen_floor_applied;
  out.diagnostics.min_eigenvalue = lrv.min_eigenvalue;
  out.diagnostics.psi_bound = spec.bound();
  out.diagnostics.k_used = spec.effective_k();
  out.diagnostics.s = s;
  out.diagnostics.t = static_cast<int>(t);
  return out;
}

}  // namespace rcp
