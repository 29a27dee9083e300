#include "rcp/psi.hpp"

#include <cmath>
#include <stdexcept>

#include "rcp/errors.hpp"
#include "rcp/rng.hpp"

namespace rcp {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) throw DimensionError("du_vectorize: matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("du_vectorize: matrix not symmetric within tolerance");
  }
}

}  // namespace

double huber_k_from_chi2_level(double level) {
  return std::sqrt(rng::chi_squared1_quantile(level));
}

double PsiSpec::effective_k() const {
  if (chi2_level) return huber_k_from_chi2_level(*chi2_level);
  return k;
}

int PsiSpec::output_dim() const {
  const int p = input_dim;
  switch (variant) {
    case PsiVariant::SpatialSign:
    case PsiVariant::HuberMultivariate:
    case PsiVariant::HuberMarginal:
      return p;
    case PsiVariant::SpatialSignCov:
      return p * (p + 1) / 2 - 1;
    case PsiVariant::HuberCovJoint:
    case PsiVariant::HuberCovMarginal:
      return p * (p + 1) / 2;
    case PsiVariant::HuberVar:
    case PsiVariant::LogHuberVar:
    case PsiVariant::Projection:
    case PsiVariant::ExpScore:
      return 1;
  }
  throw std::logic_error("unknown psi variant");
}

double PsiSpec::bound() const {
  const double ke = effective_k();
  switch (variant) {
    case PsiVariant::SpatialSign:
    case PsiVariant::SpatialSignCov:
      return 1.0;
    case PsiVariant::HuberMultivariate:
    case PsiVariant::HuberMarginal:
    case PsiVariant::ExpScore:
      return ke;
    case PsiVariant::HuberVar:
    case PsiVariant::LogHuberVar:
      return ke * ke;
    case PsiVariant::HuberCovJoint:
      return ke * ke;
    case PsiVariant::HuberCovMarginal:
      return literal_marginal_cov ? ke * ke * ke * ke : ke * ke;
    case PsiVariant::Projection:
      return ke * direction.cwiseAbs().sum();
  }
  throw std::logic_error("unknown psi variant");
}

void PsiSpec::validate() const {
  require(input_dim >= 1, "psi: input_dim must be >= 1");
  if (chi2_level) {
    require(*chi2_level > 0.0 && *chi2_level < 1.0, "psi: chi2_level must be in (0,1)");
  }
  const double ke = effective_k();
  switch (variant) {
    case PsiVariant::SpatialSign:
    case PsiVariant::SpatialSignCov:
      break;
    default:
      require(ke > 0.0, "psi: threshold k must be > 0");
  }
  if (variant == PsiVariant::SpatialSignCov) {
    require(input_dim >= 2, "psi: SpatialSignCov needs p >= 2 (dU drops one diagonal entry)");
  }
  if (variant == PsiVariant::Projection) {
    require(direction.size() == input_dim, "psi: projection direction must have length p");
    require(direction.norm() > 0.0, "psi: projection direction must be nonzero");
  }
  if (variant == PsiVariant::ExpScore || variant == PsiVariant::LogHuberVar ||
      variant == PsiVariant::HuberVar) {
    require(input_dim == 1, "psi: scalar variant requires p = 1");
  }
}

std::string PsiSpec::variant_name() const {
  switch (variant) {
    case PsiVariant::SpatialSign: return "spatialsign";
    case PsiVariant::HuberMultivariate: return "hubermult";
    case PsiVariant::HuberMarginal: return "hubermarg";
    case PsiVariant::SpatialSignCov: return "scov";
    case PsiVariant::HuberCovJoint: return "hcov";
    case PsiVariant::HuberCovMarginal: return "hcovmarg";
    case PsiVariant::HuberVar: return "hubervar";
    case PsiVariant::LogHuberVar: return "loghubervar";
    case PsiVariant::Projection: return "projection";
    case PsiVariant::ExpScore: return "expscore";
  }
  throw std::logic_error("unknown psi variant");
}

PsiVariant psi_variant_from_name(const std::string& name) {
  if (name == "spatialsign") return PsiVariant::SpatialSign;
  if (name == "hubermult") return PsiVariant::HuberMultivariate;
  if (name == "hubermarg") return PsiVariant::HuberMarginal;
  if (name == "scov") return PsiVariant::SpatialSignCov;
  if (name == "hcov") return PsiVariant::HuberCovJoint;
  if (name == "hcovmarg") return PsiVariant::HuberCovMarginal;
  if (name == "hubervar") return PsiVariant::HuberVar;
  if (name == "loghubervar") return PsiVariant::LogHuberVar;
  if (name == "projection") return PsiVariant::Projection;
  if (name == "expscore") return PsiVariant::ExpScore;
  throw std::invalid_argument("unknown psi variant name: " + name);
}

Eigen::VectorXd spatial_sign(const Eigen::VectorXd& x) {
  const double n = x.norm();
  if (n == 0.0) return Eigen::VectorXd::Zero(x.size());
  return x / n;
}

Eigen::VectorXd huber_multivariate(const Eigen::VectorXd& x, double k) {
  require(k > 0.0, "huber_multivariate: k must be > 0");
  const double n = x.norm();
  if (n <= k) return x;
  return x * (k / n);
}

Eigen::VectorXd huber_marginal(const Eigen::VectorXd& x, double k) {
  require(k > 0.0, "huber_marginal: k must be > 0");
  return x.cwiseMax(-k).cwiseMin(k);
}

double huber_var(double x, double k) {
  require(k > 0.0, "huber_var: k must be > 0");
  const double x2 = x * x;
  const double k2 = k * k;
  return x2 <= k2 ? x2 : k2;
}

double log_huber_var(double x, double k) {
  if (!(x > 0.0)) throw NonPositiveInputError("log_huber_var: input must be > 0");
  return huber_var(std::log(x), k);
}

Eigen::MatrixXd psi_scov(const Eigen::VectorXd& x) {
  const Eigen::VectorXd s = spatial_sign(x);
  return s * s.transpose();
}

Eigen::MatrixXd psi_hcov_joint(const Eigen::VectorXd& x, double k) {
  require(k > 0.0, "psi_hcov_joint: k must be > 0");
  const double n = x.norm();
  if (n <= k) return x * x.transpose();
  const Eigen::VectorXd s = x * (k / n);
  return s * s.transpose();
}

Eigen::MatrixXd psi_hcov_marginal(const Eigen::VectorXd& x, double k, bool literal) {
  require(k > 0.0, "psi_hcov_marginal: k must be > 0");
  Eigen::VectorXd v;
  if (literal) {
    v.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = huber_var(x[i], k);
  } else {
    v = huber_marginal(x, k);
  }
  return v * v.transpose();
}

double projection_psi(const Eigen::VectorXd& x, const Eigen::VectorXd& a, double k) {
  if (a.size() != x.size()) throw DimensionError("projection_psi: direction length mismatch");
  require(a.norm() > 0.0, "projection_psi: direction must be nonzero");
  return a.dot(huber_marginal(x, k));
}

double exp_score(double x, double sigma_hat, double k) {
  require(k > 0.0, "exp_score: k must be > 0");
  if (!(sigma_hat > 0.0)) throw NonPositiveInputError("exp_score: sigma_hat must be > 0");
  const double v = std::log(2.0) * x / sigma_hat;
  return v <= k ? v : k;
}

Eigen::VectorXd du_vectorize(const Eigen::MatrixXd& m) {
  check_symmetric(m);
  const auto p = m.rows();
  Eigen::VectorXd out(p * (p + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j; i < p; ++i) out[idx++] = m(i, j);
  }
  return out;
}

Eigen::VectorXd du_minor_vectorize(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw DimensionError("du_minor_vectorize: requires p >= 2");
  const Eigen::VectorXd full = du_vectorize(m);
  return full.head(full.size() - 1);
}

namespace {

// Fills one output row from the standardized observation.
void psi_row(const PsiSpec& spec, double k, const Eigen::VectorXd& z,
             Eigen::Ref<Eigen::RowVectorXd> out) {
  const auto p = z.size();
  switch (spec.variant) {
    case PsiVariant::SpatialSign:
      out = spatial_sign(z).transpose();
      return;
    case PsiVariant::HuberMultivariate: {
      if (std::isinf(k)) { out = z.transpose(); return; }
      out = huber_multivariate(z, k).transpose();
      return;
    }
    case PsiVariant::HuberMarginal: {
      if (std::isinf(k)) { out = z.transpose(); return; }
      out = huber_marginal(z, k).transpose();
      return;
    }
    case PsiVariant::HuberVar: {
      const double x = z[0];
      out[0] = std::isinf(k) ? x * x : huber_var(x, k);
      return;
    }
    case PsiVariant::LogHuberVar: {
      const double lx = std::log(z[0]);  // positivity checked by caller
      out[0] = std::isinf(k) ? lx * lx : huber_var(lx, k);
      return;
    }
    case PsiVariant::ExpScore: {
      const double v = std::log(2.0) * z[0];
      out[0] = v <= k ? v : k;
      return;
    }
    case PsiVariant::Projection: {
      const Eigen::VectorXd c = std::isinf(k) ? z : huber_marginal(z, k);
      out[0] = spec.direction.dot(c);
      return;
    }
    case PsiVariant::SpatialSignCov: {
      const Eigen::VectorXd s = spatial_sign(z);
      Eigen::Index idx = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j; i < p; ++i) {
          if (idx < out.size()) out[idx++] = s[i] * s[j];
        }
      }
      return;
    }
    case PsiVariant::HuberCovJoint: {
      Eigen::VectorXd v = z;
      if (!std::isinf(k)) {
        const double n = z.norm();
        if (n > k) v = z * (k / n);
      }
      Eigen::Index idx = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j; i < p; ++i) out[idx++] = v[i] * v[j];
      }
      return;
    }
    case PsiVariant::HuberCovMarginal: {
      Eigen::VectorXd v(p);
      for (Eigen::Index i = 0; i < p; ++i) {
        if (std::isinf(k)) {
          v[i] = spec.literal_marginal_cov ? z[i] * z[i] : z[i];
        } else {
          v[i] = spec.literal_marginal_cov ? huber_var(z[i], k)
                                           : std::clamp(z[i], -k, k);
        }
      }
      Eigen::Index idx = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j; i < p; ++i) out[idx++] = v[i] * v[j];
      }
      return;
    }
  }
  throw std::logic_error("unknown psi variant");
}

}  // namespace

TransformedSeries apply_psi(const Eigen::MatrixXd& x, const PsiSpec& spec, const LocScale& ls) {
  spec.validate();
  const auto t = x.rows();
  const auto p = x.cols();
  if (p != spec.input_dim) throw DimensionError("apply_psi: series dimension != spec.input_dim");
  if (ls.mu.size() != p || ls.sigma.size() != p) {
    throw DimensionError("apply_psi: LocScale dimension mismatch");
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(ls.sigma[j] > 0.0)) throw ZeroScaleError(static_cast<int>(j));
  }
  if (!spec.uses_centering() && ls.mu.cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument("apply_psi: ExpScore/LogHuberVar require mu = 0 (no centering)");
  }

  const double k = spec.effective_k();
  const int s = spec.output_dim();
  TransformedSeries out{Eigen::MatrixXd(t, s), spec, ls};
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < t; ++i) {
    z = (x.row(i).transpose() - ls.mu).cwiseQuotient(ls.sigma);
    if (spec.variant == PsiVariant::LogHuberVar && !(z[0] > 0.0)) {
      throw NonPositiveInputError("apply_psi: LogHuberVar requires positive values (row " +
                                  std::to_string(i + 1) + ")");
    }
    if (spec.variant == PsiVariant::ExpScore && z[0] < 0.0) {
      throw NonPositiveInputError("apply_psi: ExpScore requires nonnegative values (row " +
                                  std::to_string(i + 1) + ")");
    }
    psi_row(spec, k, z, out.y.row(i));
  }
  return out;
}

}  // namespace rcp
