#pragma once

// Second-order Butterworth low-pass (bilinear transform, pre-warped cutoff),
// available as a causal streaming filter and as a zero-phase batch filter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tramsim/error.hpp"

namespace tramsim {

enum class FilterMode { causal, zero_phase };

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  static Biquad butterworth_lowpass(double sample_rate, double cutoff) {
    if (!(cutoff > 0.0) || !(sample_rate > 2.0 * cutoff)) {
      throw ConfigError("low-pass needs 0 < cutoff < sample_rate / 2 (cutoff " +
                        std::to_string(cutoff) + " Hz, sample rate " + std::to_string(sample_rate) +
                        " Hz)");
    }
    const double k = std::tan(std::numbers::pi * cutoff / sample_rate);
    const double k2 = k * k;
    const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
    Biquad q;
    q.b0 = k2 * norm;
    q.b1 = 2.0 * q.b0;
    q.b2 = q.b0;
    q.a1 = 2.0 * (k2 - 1.0) * norm;
    q.a2 = (1.0 - std::numbers::sqrt2 * k + k2) * norm;
    return q;
  }
};

/// Causal filter in transposed direct form II.
class LowPassFilter {
 public:
  LowPassFilter(double sample_rate, double cutoff)
      : coeffs_(Biquad::butterworth_lowpass(sample_rate, cutoff)) {}

  /// The first sample primes the state to steady state at that value.
  double process(double x) {
    if (!primed_) reset(x);
    const double y = coeffs_.b0 * x + z1_;
    z1_ = coeffs_.b1 * x - coeffs_.a1 * y + z2_;
    z2_ = coeffs_.b2 * x - coeffs_.a2 * y;
    return y;
  }

  void reset(double steady_value) {
    z1_ = (1.0 - coeffs_.b0) * steady_value;
    z2_ = (coeffs_.b2 - coeffs_.a2) * steady_value;
    primed_ = true;
  }

  /// Forget the input history; the next sample primes the state again.
  void clear() { primed_ = false; }

  const Biquad& coefficients() const noexcept { return coeffs_; }

 private:
  Biquad coeffs_;
  double z1_ = 0.0;
  double z2_ = 0.0;
  bool primed_ = false;
};

namespace detail {

inline std::vector<double> filter_pass(const Biquad& q, std::span<const double> x) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  double z1 = (1.0 - q.b0) * x[0];
  double z2 = (q.b2 - q.a2) * x[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = q.b0 * x[i] + z1;
    z1 = q.b1 * x[i] - q.a1 * y[i] + z2;
    z2 = q.b2 * x[i] - q.a2 * y[i];
  }
  return y;
}

}  // namespace detail

/// Low-pass a uniformly sampled signal. Zero-phase mode runs the filter
/// forward and backward over an odd reflection of the ends.
inline std::vector<double> lowpass(std::span<const double> x, double sample_rate, double cutoff,
                                   FilterMode mode) {
  const Biquad q = Biquad::butterworth_lowpass(sample_rate, cutoff);
  if (x.empty()) return {};
  if (mode == FilterMode::causal) {
    LowPassFilter f(sample_rate, cutoff);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f.process(x[i]);
    return y;
  }
  if (x.size() < 2) return {x.begin(), x.end()};

  // Several filter time constants of padding, bounded by the signal length.
  const auto settle = static_cast<std::size_t>(std::ceil(3.0 * sample_rate / cutoff));
  const std::size_t pad = std::min(x.size() - 1, std::max<std::size_t>(9, settle));
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  const std::size_t n = x.size();
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  std::vector<double> fwd = detail::filter_pass(q, ext);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = detail::filter_pass(q, fwd);
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Sample rate implied by the median spacing of strictly increasing timestamps.
inline double estimate_sample_rate(std::span<const double> t) {
  if (t.size() < 2) throw ParameterError("need at least 2 samples to estimate a sample rate");
  std::vector<double> dts;
  dts.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) dts.push_back(t[i] - t[i - 1]);
  std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
  const double dt = dts[dts.size() / 2];
  if (!(dt > 0.0)) throw ParameterError("timestamps must be strictly increasing");
  return 1.0 / dt;
}

}  // namespace tramsim
