#pragma once

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>

#include "rcp/robust_scale.hpp"

namespace rcp {

// The bounded transformations applied to marginally standardized
// observations. Scalar/vector variants map to R^p or R, covariance variants
// map through the DU/dU vectorization of their p x p matrix value.
enum class PsiVariant {
  SpatialSign,      // x/|x|, 0 at 0
  HuberMultivariate,  // identity inside the k-ball, radial projection outside
  HuberMarginal,    // componentwise clamp to [-k, k]
  SpatialSignCov,   // s(x)s(x)^T, dU-vectorized (trace is constant)
  HuberCovJoint,    // xx^T inside the k-ball, k^2 s(x)s(x)^T outside
  HuberCovMarginal, // products of componentwise-clamped values
  HuberVar,         // min(x^2, k^2)
  LogHuberVar,      // HuberVar of log(x), positive series
  Projection,       // a' * clamp(x)
  ExpScore,         // min(ln2 * x / sigma, k), uncentered exponential score
};

inline constexpr double kInfiniteK = std::numeric_limits<double>::infinity();

struct PsiSpec {
  PsiVariant variant = PsiVariant::HuberVar;
  int input_dim = 1;
  // Threshold; may be the explicit value or derived from chi2_level as
  // sqrt(q_{chi^2_1}(level)). kInfiniteK selects the unbounded classical
  // statistic.
  double k = kInfiniteK;
  std::optional<double> chi2_level;
  Eigen::VectorXd direction;  // projection variant only
  // Literal reading of the marginal Huber cross products: products of
  // squared-clamped values instead of products of clamped values.
  bool literal_marginal_cov = false;

  // Effective threshold after resolving chi2_level.
  double effective_k() const;
  int output_dim() const;
  // Uniform bound C with |psi(x)|_inf <= C (infinity when k is infinite).
  double bound() const;
  bool uses_centering() const {
    return variant != PsiVariant::ExpScore && variant != PsiVariant::LogHuberVar;
  }
  void validate() const;

  std::string variant_name() const;
};

PsiVariant psi_variant_from_name(const std::string& name);

// --- elementwise transformations ------------------------------------------
Eigen::VectorXd spatial_sign(const Eigen::VectorXd& x);
Eigen::VectorXd huber_multivariate(const Eigen::VectorXd& x, double k);
Eigen::VectorXd huber_marginal(const Eigen::VectorXd& x, double k);
double huber_var(double x, double k);
double log_huber_var(double x, double k);
Eigen::MatrixXd psi_scov(const Eigen::VectorXd& x);
Eigen::MatrixXd psi_hcov_joint(const Eigen::VectorXd& x, double k);
Eigen::MatrixXd psi_hcov_marginal(const Eigen::VectorXd& x, double k, bool literal = false);
double projection_psi(const Eigen::VectorXd& x, const Eigen::VectorXd& a, double k);
double exp_score(double x, double sigma_hat, double k);

// --- matrix vectorization ---------------------------------------------------
// Diagonal and lower-triangular entries in column order:
// (M11, M21, ..., Mp1, M22, ..., Mpp). Input must be symmetric to 1e-10.
Eigen::VectorXd du_vectorize(const Eigen::MatrixXd& m);
// Same with the final diagonal entry dropped (for trace-constant transforms);
// requires p >= 2.
Eigen::VectorXd du_minor_vectorize(const Eigen::MatrixXd& m);

struct TransformedSeries {
  Eigen::MatrixXd y;  // T x s
  PsiSpec spec;
  LocScale loc_scale;
};

// Row-wise psi of the standardized series (X_i - mu) / sigma. Covariance
// variants are DU/dU vectorized. For ExpScore and LogHuberVar the caller's
// LocScale must carry mu = 0 (no centering).
TransformedSeries apply_psi(const Eigen::MatrixXd& x, const PsiSpec& spec, const LocScale& ls);

// Threshold from the chi^2_1 tuning convention: k = sqrt(q_{chi^2_1}(level)).
double huber_k_from_chi2_level(double level);

}  // namespace rcp
