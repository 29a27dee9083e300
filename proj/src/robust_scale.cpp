#include "rcp/robust_scale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rcp/errors.hpp"

namespace rcp {

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lo);
  }
  return m;
}

std::vector<double> checked_copy(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("median/mad: empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("median/mad: non-finite value in sample");
  }
  return v;
}

}  // namespace

double median(std::span<const double> sample) {
  auto v = checked_copy(sample);
  return median_inplace(v);
}

double median(const Eigen::VectorXd& sample) {
  return median(std::span<const double>(sample.data(), static_cast<std::size_t>(sample.size())));
}

double mad(std::span<const double> sample, double consistency_factor) {
  if (!(consistency_factor > 0.0)) throw std::invalid_argument("mad: consistency factor must be > 0");
  if (sample.size() < 2) throw std::invalid_argument("mad: need at least 2 observations");
  auto v = checked_copy(sample);
  const double m = median_inplace(v);
  for (double& x : v) x = std::abs(x - m);
  return consistency_factor * median_inplace(v);
}

double mad(const Eigen::VectorXd& sample, double consistency_factor) {
  return mad(std::span<const double>(sample.data(), static_cast<std::size_t>(sample.size())),
             consistency_factor);
}

std::pair<Eigen::MatrixXd, LocScale> standardize(const Eigen::MatrixXd& x,
                                                 double consistency_factor) {
  const auto t = x.rows();
  const auto p = x.cols();
  if (t < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  LocScale ls{Eigen::VectorXd(p), Eigen::VectorXd(p)};
  Eigen::MatrixXd z(t, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd col = x.col(j);
    ls.mu[j] = median(col);
    ls.sigma[j] = mad(col, consistency_factor);
    if (!(ls.sigma[j] > 0.0)) throw ZeroScaleError(static_cast<int>(j));
    z.col(j) = (col.array() - ls.mu[j]) / ls.sigma[j];
  }
  return {std::move(z), std::move(ls)};
}

}  // namespace rcp
