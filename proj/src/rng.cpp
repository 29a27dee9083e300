#include "rcp/rng.hpp"

#include <cmath>
#include <limits>

namespace rcp::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t key,
                                               const std::array<std::uint32_t, 4>& counter) {
  std::array<std::uint32_t, 4> c = counter;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::uint32_t CounterStream::next_u32() {
  if (pos_ >= 4) {
    buf_ = Philox4x32::block(key_, {id_.id0, id_.id1, block_++, id_.tag});
    pos_ = 0;
  }
  return buf_[pos_++];
}

std::uint64_t CounterStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double CounterStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterStream::next_double_pos() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::cauchy() {
  return std::tan(M_PI * (next_double_pos() - 0.5));
}

double CounterStream::exponential() {
  return -std::log(next_double_pos());
}

// ---------------------------------------------------------------------------
// Ziggurat normal sampler, 256 layers (Marsaglia & Tsang 2000 layout adapted
// to 52-bit mantissa draws; index, sign and value bits come from disjoint
// parts of one 64-bit word).

namespace {

struct ZigguratTables {
  static constexpr int kLayers = 256;
  static constexpr double kTail = 3.6541528853610088;
  std::uint64_t kn[kLayers];
  double wn[kLayers];
  double fn[kLayers];

  ZigguratTables() {
    constexpr double m = 4503599627370496.0;  // 2^52
    const double tail_area = std::sqrt(M_PI / 2.0) * std::erfc(kTail / std::sqrt(2.0));
    double dn = kTail;
    double tn = kTail;
    const double f_tail = std::exp(-0.5 * dn * dn);
    const double vn = kTail * f_tail + tail_area;  // common layer area
    const double q = vn / f_tail;

    kn[0] = static_cast<std::uint64_t>((dn / q) * m);
    kn[1] = 0;
    wn[0] = q / m;
    wn[kLayers - 1] = dn / m;
    fn[0] = 1.0;
    fn[kLayers - 1] = f_tail;
    for (int i = kLayers - 2; i >= 1; --i) {
      dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = static_cast<std::uint64_t>((dn / tn) * m);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / m;
    }
    // the recursion must close just below the mode
    if (!(dn > 0.0) || dn > 0.05) throw std::logic_error("ziggurat table construction failed");
  }
};

const ZigguratTables& ziggurat() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace

double CounterStream::normal() {
  const ZigguratTables& z = ziggurat();
  for (;;) {
    const std::uint64_t u = next_u64();
    const int idx = static_cast<int>(u & 0xFF);
    const bool neg = (u >> 8) & 1u;
    const std::uint64_t j = u >> 12;  // 52 bits
    double x = static_cast<double>(j) * z.wn[idx];
    if (j < z.kn[idx]) return neg ? -x : x;
    if (idx == 0) {
      // tail beyond kTail: exponential rejection
      double xt, yt;
      do {
        xt = -std::log(next_double_pos()) / ZigguratTables::kTail;
        yt = -std::log(next_double_pos());
      } while (yt + yt < xt * xt);
      x = ZigguratTables::kTail + xt;
      return neg ? -x : x;
    }
    if (z.fn[idx] + next_double() * (z.fn[idx - 1] - z.fn[idx]) < std::exp(-0.5 * x * x)) {
      return neg ? -x : x;
    }
  }
}

double CounterStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(next_double_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_double_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// ---------------------------------------------------------------------------
// AS 241 (Wichura 1988), PPND16.

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double chi_squared1_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("chi_squared1_quantile: level must be in (0,1)");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  return z * z;
}

}  // namespace rcp::rng
