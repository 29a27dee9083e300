#include "rcp/longrun.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "rcp/errors.hpp"

namespace rcp {

namespace {
constexpr double kEigenFloorRel = 1e-10;
}

double flat_top_kernel(double x) {
  x = std::abs(x);
  if (x <= 0.5) return 1.0;
  if (x <= 1.0) return 2.0 - 2.0 * x;
  return 0.0;
}

double bartlett_kernel(double x) {
  x = std::abs(x);
  return x < 1.0 ? 1.0 - x : 0.0;
}

double kernel_weight(KernelId id, double x) {
  return id == KernelId::FlatTop ? flat_top_kernel(x) : bartlett_kernel(x);
}

std::string kernel_name(KernelId id) {
  return id == KernelId::FlatTop ? "flattop" : "bartlett";
}

namespace {

double log_base_bandwidth(double base_offset, int t) {
  // log_{base}(T/50), floored at 1 for short series where it degenerates.
  const double ratio = t / 50.0;
  if (ratio <= 1.0) return 1.0;
  const double b = std::log(ratio) / std::log(base_offset);
  return b < 1.0 ? 1.0 : b;
}

}  // namespace

double default_bandwidth(int t, int s) {
  if (t < 2) throw std::invalid_argument("default_bandwidth: T too small");
  if (s < 1) throw std::invalid_argument("default_bandwidth: s must be >= 1");
  if (s == 1) return 0.9 * std::cbrt(static_cast<double>(t));
  return log_base_bandwidth(1.8 + s / 40.0, t);
}

double baseline_bandwidth(BaselineBandwidth id, int t, int p) {
  if (t < 2) throw std::invalid_argument("baseline_bandwidth: T too small");
  switch (id) {
    case BaselineBandwidth::Mq:
      return 0.9 * std::cbrt(static_cast<double>(t));
    case BaselineBandwidth::MD:
    case BaselineBandwidth::GMD:
      return std::pow(static_cast<double>(t), 0.25);
    case BaselineBandwidth::CovMultivariate:
      if (p < 1) throw std::invalid_argument("baseline_bandwidth: p must be >= 1");
      return log_base_bandwidth(1.8 + p * (p + 1) / 40.0, t);
  }
  throw std::invalid_argument("baseline_bandwidth: unknown estimator id");
}

LongRunCov long_run_cov(const Eigen::MatrixXd& y, double bandwidth, KernelId kernel) {
  const auto t = y.rows();
  if (t < 2) throw std::invalid_argument("long_run_cov: need T >= 2");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("long_run_cov: bandwidth must be > 0");

  const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  Eigen::MatrixXd u = (yc.transpose() * yc) / static_cast<double>(t);
  const auto h_max = static_cast<Eigen::Index>(std::ceil(bandwidth));
  for (Eigen::Index h = 1; h <= h_max && h < t; ++h) {
    const double w = kernel_weight(kernel, static_cast<double>(h) / bandwidth);
    if (w <= 0.0) continue;
    const Eigen::MatrixXd g =
        (yc.topRows(t - h).transpose() * yc.bottomRows(t - h)) / static_cast<double>(t);
    u.noalias() += w * (g + g.transpose());
  }
  u = ((u + u.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u);
  if (es.info() != Eigen::Success) throw DegenerateLrvError("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double lam_max = ev.maxCoeff();
  if (!(lam_max > 0.0) || !std::isfinite(lam_max)) {
    throw DegenerateLrvError("largest eigenvalue is not positive (constant series?)");
  }
  const double floor = kEigenFloorRel * lam_max;
  LongRunCov out;
  out.bandwidth = bandwidth;
  out.kernel = kernel;
  out.min_eigenvalue = ev.minCoeff();  // pre-repair, for diagnostics
  bool floored = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < floor) {
      ev[i] = floor;
      floored = true;
    }
  }
  out.eigen_floor_applied = floored;
  if (floored) {
    out.u_hat = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    out.u_hat = ((out.u_hat + out.u_hat.transpose()) / 2.0).eval();
  } else {
    out.u_hat = std::move(u);
  }
  return out;
}

Eigen::MatrixXd invert_spd(const LongRunCov& lrv) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lrv.u_hat);
  if (es.info() != Eigen::Success) throw DegenerateLrvError("inverse: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw DegenerateLrvError("inverse: matrix singular after repair");
  Eigen::MatrixXd inv =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return ((inv + inv.transpose()) / 2.0).eval();
}

}  // namespace rcp
