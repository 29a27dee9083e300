#include "rcp/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rcp/critical_values.hpp"
#include "rcp/cusum.hpp"
#include "rcp/errors.hpp"
#include "rcp/longrun.hpp"
#include "rcp/robust_scale.hpp"

namespace rcp {

std::string scale_estimator_name(ScaleEstimator e) {
  return e == ScaleEstimator::MD ? "md" : "gmd";
}

double md_scale(const Eigen::VectorXd& sample) {
  if (sample.size() < 2) throw std::invalid_argument("md_scale: need n >= 2");
  const double med = median(sample);
  return (sample.array() - med).abs().mean();
}

double gmd_scale(const Eigen::VectorXd& sample) {
  const auto n = sample.size();
  if (n < 2) throw std::invalid_argument("gmd_scale: need n >= 2");
  std::vector<double> v(sample.data(), sample.data() + n);
  std::sort(v.begin(), v.end());
  // sum_{i<j} |x_i - x_j| = sum_i (2i - n - 1) x_(i)  (1-based ranks)
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    total += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * v[i];
  }
  return 2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace {

// Fenwick tree over value ranks carrying counts and sums, supporting
// k-th order statistic and partial count/sum queries.
class RankTree {
 public:
  explicit RankTree(std::vector<double> sorted_values)
      : values_(std::move(sorted_values)),
        count_(values_.size() + 1, 0),
        sum_(values_.size() + 1, 0.0) {}

  void insert(double x) {
    for (std::size_t i = rank_of(x) + 1; i < count_.size(); i += i & (~i + 1)) {
      count_[i] += 1;
      sum_[i] += x;
    }
    ++n_;
  }

  // number and sum of inserted elements with value <= x
  std::pair<long, double> leq(double x) const {
    long c = 0;
    double s = 0.0;
    for (std::size_t i = upper_rank(x); i > 0; i -= i & (~i + 1)) {
      c += count_[i];
      s += sum_[i];
    }
    return {c, s};
  }

  // m-th smallest inserted element (1-based)
  double order_statistic(long m) const {
    std::size_t pos = 0;
    long remaining = m;
    std::size_t bit = std::bit_floor(count_.size() - 1);
    for (; bit > 0; bit >>= 1) {
      const std::size_t next = pos + bit;
      if (next < count_.size() && count_[next] < remaining) {
        pos = next;
        remaining -= count_[next];
      }
    }
    return values_[pos];
  }

  long size() const { return n_; }
  double total_sum() const {
    auto [c, s] = leq(values_.back());
    (void)c;
    return s;
  }

 private:
  std::size_t rank_of(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(values_.begin(), values_.end(), x) - values_.begin());
  }
  std::size_t upper_rank(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
  }

  std::vector<double> values_;
  std::vector<long> count_;
  std::vector<double> sum_;
  long n_ = 0;
};

std::vector<double> sorted_copy(const Eigen::VectorXd& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  return v;
}

double running_median(const RankTree& tree, long k) {
  if (k % 2 == 1) return tree.order_statistic((k + 1) / 2);
  return 0.5 * (tree.order_statistic(k / 2) + tree.order_statistic(k / 2 + 1));
}

}  // namespace

std::vector<double> sequential_md_curve(const Eigen::VectorXd& x) {
  const auto t = x.size();
  if (t < 2) throw std::invalid_argument("sequential_md_curve: need T >= 2");
  RankTree tree(sorted_copy(x));
  std::vector<double> curve;
  curve.reserve(t - 1);
  double total = 0.0;
  for (Eigen::Index k = 0; k < t; ++k) {
    tree.insert(x[k]);
    total += x[k];
    if (k == 0) continue;
    const long n = k + 1;
    const double med = running_median(tree, n);
    const auto [c_below, s_below] = tree.leq(med);
    const double abs_dev =
        (med * c_below - s_below) + ((total - s_below) - med * (n - c_below));
    curve.push_back(abs_dev / static_cast<double>(n));
  }
  return curve;
}

std::vector<double> sequential_gmd_curve(const Eigen::VectorXd& x) {
  const auto t = x.size();
  if (t < 2) throw std::invalid_argument("sequential_gmd_curve: need T >= 2");
  RankTree tree(sorted_copy(x));
  std::vector<double> curve;
  curve.reserve(t - 1);
  double pair_sum = 0.0;
  double total = 0.0;
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto [c_below, s_below] = tree.leq(x[k]);
    const long j = tree.size();  // elements already inserted
    pair_sum += x[k] * c_below - s_below + (total - s_below) - x[k] * (j - c_below);
    tree.insert(x[k]);
    total += x[k];
    if (k == 0) continue;
    const double n = static_cast<double>(k + 1);
    curve.push_back(2.0 * pair_sum / (n * (n - 1.0)));
  }
  return curve;
}

ScaleCusumResult scale_cusum_test(const Eigen::VectorXd& x, ScaleEstimator estimator,
                                  double alpha, bool correction) {
  const auto t = x.size();
  if (t < 20) throw std::invalid_argument("scale_cusum_test: need T >= 20");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("scale_cusum_test: alpha must be in (0,1)");
  }

  const std::vector<double> curve = estimator == ScaleEstimator::MD
                                        ? sequential_md_curve(x)
                                        : sequential_gmd_curve(x);
  const double s_full = curve.back();

  // empirical influence values, long-run variance with the estimator's bandwidth
  Eigen::VectorXd h(t);
  if (estimator == ScaleEstimator::MD) {
    const double med = median(x);
    const double md = md_scale(x);
    h = (x.array() - med).abs() - md;
  } else {
    const double gmd = gmd_scale(x);
    std::vector<double> v = sorted_copy(x);
    std::vector<double> prefix(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];
    const double total = prefix.back();
    for (Eigen::Index i = 0; i < t; ++i) {
      const auto r = static_cast<std::size_t>(
          std::upper_bound(v.begin(), v.end(), x[i]) - v.begin());
      const double abs_sum =
          x[i] * static_cast<double>(r) - prefix[r] + (total - prefix[r]) -
          x[i] * static_cast<double>(v.size() - r);
      h[i] = 2.0 * abs_sum / static_cast<double>(t) - gmd;
    }
  }

  const BaselineBandwidth bw_id =
      estimator == ScaleEstimator::MD ? BaselineBandwidth::MD : BaselineBandwidth::GMD;
  const double bandwidth = baseline_bandwidth(bw_id, static_cast<int>(t));
  const LongRunCov lrv = long_run_cov(h, bandwidth);
  const double v_hat = lrv.u_hat(0, 0);
  if (!(v_hat > 0.0)) throw DegenerateLrvError("scale_cusum_test: v_hat not positive");

  ScaleCusumResult out;
  out.estimator = estimator;
  out.v_hat = v_hat;
  out.alpha = alpha;
  out.bandwidth = bandwidth;
  const double denom = std::sqrt(static_cast<double>(t) * v_hat);
  double best = -1.0;
  int best_k = 2;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double k = static_cast<double>(i + 2);  // curve starts at k = 2
    const double val = k / denom * std::abs(curve[i] - s_full);
    if (val > best) {
      best = val;
      best_k = static_cast<int>(i + 2);
    }
  }
  out.statistic = best;
  out.change_point_index = std::min<int>(best_k, static_cast<int>(t) - 1);
  out.corrected = correction;
  out.corrected_statistic =
      correction ? finite_sample_correction(best, static_cast<int>(t)) : best;
  out.critical_value = std::sqrt(lookup_quantile(1, alpha));
  out.reject = out.corrected_statistic > out.critical_value;
  return out;
}

}  // namespace rcp
