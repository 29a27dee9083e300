#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>

namespace rcp {

inline constexpr double kInfiniteDf = std::numeric_limits<double>::infinity();

// ARCH(1): X_t = sigma_t eps_t with sigma_t^2 = pi0 + pi1 X_{t-1}^2 and
// standard normal eps_t.
struct Arch1Spec {
  double pi0 = 1.0;
  double pi1 = 0.0;
  int t = 200;
  int burn_in = 500;
  void validate() const;
};

// VAR(1) with multivariate-t innovations: X_t = rho X_{t-1} + eps_t,
// eps_t = L z / sqrt(chi2_df / df), L = chol(shape); Gaussian when df = inf.
struct Var1Spec {
  double rho = 0.0;
  int p = 2;
  double df = kInfiniteDf;
  Eigen::MatrixXd shape;  // defaults to identity when empty
  int t = 200;
  int burn_in = 500;
  void validate() const;
};

struct ScaleJump {
  double delta = 1.0;  // multiplier applied to rows after floor(b T)
  double b = 0.5;
};

struct InnovationCovSwitch {
  Eigen::MatrixXd sigma_before;
  Eigen::MatrixXd sigma_after;
  int t_switch = 0;  // innovations at times > t_switch use sigma_after
};

using BreakSpec = std::variant<std::monostate, ScaleJump, InnovationCovSwitch>;

Eigen::VectorXd gen_arch1(const Arch1Spec& spec, std::uint64_t seed, std::uint32_t rep = 0);

// Covariance-switch breaks are honored inside the generator (the innovation
// distribution changes at t_switch), not post-hoc.
Eigen::MatrixXd gen_var1_t(const Var1Spec& spec, std::uint64_t seed, std::uint32_t rep = 0,
                           const std::optional<InnovationCovSwitch>& cov_switch = std::nullopt);

// delta = 1 + s / (sqrt(T) b (1-b) (1-pi1)); stabilizes power across designs.
double jump_height(double s_mag, int t, double b, double pi1);

// ScaleJump multiplies rows after floor(b T) by delta; covariance switches
// are a no-op here (they belong to the generator).
Eigen::MatrixXd apply_break(const Eigen::MatrixXd& x, const BreakSpec& brk);

// The 4x4 innovation covariance designs (unit diagonal, symmetrized).
Eigen::MatrixXd sigma_delta(double delta);
Eigen::MatrixXd sigma_two();

}  // namespace rcp
