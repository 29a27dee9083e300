#include "rcp/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "rcp/rng.hpp"

namespace rcp {

void Arch1Spec::validate() const {
  if (!(pi0 > 0.0)) throw std::invalid_argument("Arch1Spec: pi0 must be > 0");
  if (!(pi1 >= 0.0 && pi1 < 1.0)) throw std::invalid_argument("Arch1Spec: pi1 must be in [0,1)");
  if (t < 1) throw std::invalid_argument("Arch1Spec: T must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("Arch1Spec: burn_in must be >= 0");
}

void Var1Spec::validate() const {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("Var1Spec: |rho| must be < 1");
  if (p < 1) throw std::invalid_argument("Var1Spec: p must be >= 1");
  if (!(df > 0.0)) throw std::invalid_argument("Var1Spec: df must be > 0 (or infinity)");
  if (t < 1) throw std::invalid_argument("Var1Spec: T must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("Var1Spec: burn_in must be >= 0");
  if (shape.size() != 0 && (shape.rows() != p || shape.cols() != p)) {
    throw std::invalid_argument("Var1Spec: shape must be p x p");
  }
}

namespace {

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(what) + ": matrix is not positive definite");
  }
  return llt.matrixL();
}

}  // namespace

Eigen::VectorXd gen_arch1(const Arch1Spec& spec, std::uint64_t seed, std::uint32_t rep) {
  spec.validate();
  rng::CounterStream st(seed, {rep, 0, rng::tags::kArch});
  Eigen::VectorXd out(spec.t);
  double x = 0.0;
  for (int i = -spec.burn_in; i < spec.t; ++i) {
    const double sigma2 = spec.pi0 + spec.pi1 * x * x;
    x = std::sqrt(sigma2) * st.normal();
    if (i >= 0) out[i] = x;
  }
  return out;
}

Eigen::MatrixXd gen_var1_t(const Var1Spec& spec, std::uint64_t seed, std::uint32_t rep,
                           const std::optional<InnovationCovSwitch>& cov_switch) {
  spec.validate();
  const int p = spec.p;
  Eigen::MatrixXd shape = spec.shape.size() == 0 ? Eigen::MatrixXd::Identity(p, p) : spec.shape;
  Eigen::MatrixXd l_before = cholesky_or_throw(shape, "gen_var1_t shape");
  Eigen::MatrixXd l_after = l_before;
  int t_switch = spec.t + 1;
  if (cov_switch) {
    if (cov_switch->sigma_before.rows() != p || cov_switch->sigma_after.rows() != p) {
      throw std::invalid_argument("gen_var1_t: switch covariance dimension mismatch");
    }
    l_before = cholesky_or_throw(cov_switch->sigma_before, "gen_var1_t sigma_before");
    l_after = cholesky_or_throw(cov_switch->sigma_after, "gen_var1_t sigma_after");
    t_switch = cov_switch->t_switch;
  }

  rng::CounterStream st(seed, {rep, 0, rng::tags::kVar});
  const bool gaussian = std::isinf(spec.df);
  Eigen::MatrixXd out(spec.t, p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z(p);
  for (int i = -spec.burn_in; i < spec.t; ++i) {
    for (int j = 0; j < p; ++j) z[j] = st.normal();
    // time index in 1..T; burn-in draws use the pre-switch distribution
    const bool after = (i >= 0) && (i + 1 > t_switch);
    Eigen::VectorXd eps = (after ? l_after : l_before) * z;
    if (!gaussian) eps /= std::sqrt(st.chi_square(spec.df) / spec.df);
    x = spec.rho * x + eps;
    if (i >= 0) out.row(i) = x.transpose();
  }
  return out;
}

double jump_height(double s_mag, int t, double b, double pi1) {
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("jump_height: b must be in (0,1)");
  if (!(pi1 >= 0.0 && pi1 < 1.0)) throw std::invalid_argument("jump_height: pi1 must be in [0,1)");
  if (t < 1) throw std::invalid_argument("jump_height: T must be >= 1");
  return 1.0 + s_mag / (std::sqrt(static_cast<double>(t)) * b * (1.0 - b) * (1.0 - pi1));
}

Eigen::MatrixXd apply_break(const Eigen::MatrixXd& x, const BreakSpec& brk) {
  if (std::holds_alternative<std::monostate>(brk) ||
      std::holds_alternative<InnovationCovSwitch>(brk)) {
    return x;
  }
  const auto& jump = std::get<ScaleJump>(brk);
  if (!(jump.b > 0.0 && jump.b < 1.0)) throw std::invalid_argument("apply_break: b must be in (0,1)");
  if (!(jump.delta > 0.0)) throw std::invalid_argument("apply_break: delta must be > 0");
  const auto t = x.rows();
  const auto cut = static_cast<Eigen::Index>(std::floor(jump.b * static_cast<double>(t)));
  Eigen::MatrixXd y = x;
  if (cut < t) y.bottomRows(t - cut) *= jump.delta;
  return y;
}

Eigen::MatrixXd sigma_delta(double delta) {
  if (!(delta >= -0.2 && delta <= 0.2)) {
    throw std::invalid_argument("sigma_delta: delta must be in [-0.2, 0.2]");
  }
  Eigen::MatrixXd m(4, 4);
  m << 1.0, 0.2, delta, 0.2,
       0.2, 1.0, delta, delta,
       delta, delta, 1.0, 0.2,
       0.2, delta, 0.2, 1.0;
  m = ((m + m.transpose()) / 2.0).eval();
  cholesky_or_throw(m, "sigma_delta");
  return m;
}

Eigen::MatrixXd sigma_two() {
  Eigen::MatrixXd m(4, 4);
  m << 1.0, 0.3, 0.0, 0.3,
       0.3, 1.0, 0.0, 0.0,
       0.0, 0.0, 1.0, 0.3,
       0.3, 0.0, 0.3, 1.0;
  m = ((m + m.transpose()) / 2.0).eval();
  cholesky_or_throw(m, "sigma_two");
  return m;
}

}  // namespace rcp
