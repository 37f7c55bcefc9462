#ifndef TRANSIO_FITTING_HPP
#define TRANSIO_FITTING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "transio/empirical.hpp"

namespace transio {

enum class KernelFamily { epanechnikov, gaussian, biweight, triangular };

inline std::string kernel_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::biweight: return "biweight";
    case KernelFamily::triangular: return "triangular";
  }
  throw std::logic_error("kernel_name: unknown family");
}

inline KernelFamily kernel_from_name(const std::string& s) {
  if (s == "epanechnikov") return KernelFamily::epanechnikov;
  if (s == "gaussian") return KernelFamily::gaussian;
  if (s == "biweight") return KernelFamily::biweight;
  if (s == "triangular") return KernelFamily::triangular;
  throw std::invalid_argument("unknown kernel family: " + s);
}

/// Kernel function with bandwidth r, evaluated at t = dh/r. The Gaussian
/// kernel is (1/sqrt(2pi)) exp(-t^2); its leading constant cancels in the
/// regression ratio, so only the effective bandwidth differs from the
/// conventional exp(-t^2/2) form.
struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double bandwidth = 1.0;

  void validate() const {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be positive");
  }
};

inline double kernel_eval(const KernelSpec& spec, double dh) {
  spec.validate();
  const double t = std::abs(dh) / spec.bandwidth;
  switch (spec.family) {
    case KernelFamily::epanechnikov: return t <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
    case KernelFamily::gaussian: return std::exp(-t * t) / std::sqrt(2.0 * M_PI);
    case KernelFamily::biweight: {
      if (t > 1.0) return 0.0;
      const double q = 1.0 - t * t;
      return (15.0 / 16.0) * q * q;
    }
    case KernelFamily::triangular: return t <= 1.0 ? 1.0 - t : 0.0;
  }
  throw std::logic_error("kernel_eval: unknown family");
}

/// Linear interpolation of sample values at a lag inside [h_1, h_N];
/// extrapolation is rejected.
inline double linear_interpolate(const std::vector<std::pair<double, double>>& samples,
                                 double hstar) {
  if (samples.size() < 2) throw std::invalid_argument("linear_interpolate: need >= 2 samples");
  for (size_t i = 0; i + 1 < samples.size(); ++i)
    if (!(samples[i].first < samples[i + 1].first))
      throw std::invalid_argument("linear_interpolate: lags must be strictly increasing");
  if (hstar < samples.front().first || hstar > samples.back().first)
    throw std::out_of_range("linear_interpolate: lag outside the empirical range");
  const auto it = std::lower_bound(samples.begin(), samples.end(), hstar,
                                   [](const auto& s, double h) { return s.first < h; });
  if (it->first == hstar) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return (lo.second * (hi.first - hstar) + hi.second * (hstar - lo.first)) / (hi.first - lo.first);
}

/// Fitted kernel-regression object: empirical samples shared across all K^2
/// curves plus the kernel. Immutable; evaluation is pure.
struct NonparametricModel {
  EmpiricalTransiogram samples;
  KernelSpec kernel;

  int nclasses() const { return samples.nclasses; }
};

namespace detail {
/// Lags participating for tail k: those whose whole tail row is defined, so
/// all heads share one denominator (the unit-sum proof relies on this).
inline std::vector<size_t> usable_lags(const EmpiricalTransiogram& curve, int tail) {
  std::vector<size_t> out;
  for (size_t l = 0; l < curve.lags.size(); ++l)
    if (curve.at(tail, tail, l).defined()) out.push_back(l);
  return out;
}
}  // namespace detail

/// Nadaraya-Watson regression of the (tail, head) curve at lag hstar, with
/// the origin special cases (identity at h* = 0). Returns nullopt when every
/// usable sample gets zero kernel weight (compact kernel far from data).
inline std::optional<double> kernel_regress(const NonparametricModel& model, int tail, int head,
                                            double hstar, std::optional<size_t> skip_lag = {}) {
  if (hstar < 0.0) throw std::invalid_argument("kernel_regress: negative lag");
  if (hstar == 0.0) return tail == head ? 1.0 : 0.0;
  double num = 0.0, den = 0.0;
  for (size_t l : detail::usable_lags(model.samples, tail)) {
    if (skip_lag && *skip_lag == l) continue;
    const double w = kernel_eval(model.kernel, model.samples.lags[l].distance - hstar);
    if (w <= 0.0) continue;
    num += w * model.samples.at(tail, head, l).value();
    den += w;
  }
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

/// K x K matrix of regressed values at hstar. Rows whose tail is not
/// evaluable are filled with NaN. Defined rows sum to 1 by construction.
inline std::vector<double> regress_matrix(const NonparametricModel& model, double hstar) {
  const int K = model.nclasses();
  std::vector<double> out(static_cast<size_t>(K) * K, std::numeric_limits<double>::quiet_NaN());
  for (int t = 1; t <= K; ++t)
    for (int h = 1; h <= K; ++h) {
      const auto v = kernel_regress(model, t, h, hstar);
      if (v) out[static_cast<size_t>(t - 1) * K + (h - 1)] = *v;
    }
  return out;
}

/// Triangular-kernel regression restricted to the two samples bracketing
/// hstar, with bandwidth equal to the bracket width. Algebraically identical
/// to linear_interpolate on in-range lags.
inline double kernel_regress_two_nearest(const NonparametricModel& model, int tail, int head,
                                         double hstar) {
  if (hstar < 0.0) throw std::invalid_argument("kernel_regress_two_nearest: negative lag");
  if (hstar == 0.0) return tail == head ? 1.0 : 0.0;
  std::vector<std::pair<double, double>> pts;
  for (size_t l : detail::usable_lags(model.samples, tail))
    pts.emplace_back(model.samples.lags[l].distance, model.samples.at(tail, head, l).value());
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2)
    throw std::invalid_argument("kernel_regress_two_nearest: need >= 2 usable samples");
  if (hstar < pts.front().first || hstar > pts.back().first)
    throw std::out_of_range("kernel_regress_two_nearest: lag outside the empirical range");
  const auto it = std::lower_bound(pts.begin(), pts.end(), hstar,
                                   [](const auto& s, double h) { return s.first < h; });
  if (it->first == hstar) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const KernelSpec tri{KernelFamily::triangular, hi.first - lo.first};
  const double wlo = kernel_eval(tri, hstar - lo.first);
  const double whi = kernel_eval(tri, hi.first - hstar);
  return (wlo * lo.second + whi * hi.second) / (wlo + whi);
}

/// Least-squares cross-validation bandwidth selection: argmin over the
/// candidate grid of the leave-one-out error
///   sum_n sum_{k,k'} npairs_n (p(h_n) - fit_without_n(h_n))^2 .
/// Candidates leaving a lag not-evaluable skip that term. Ties break toward
/// the smaller bandwidth.
inline double select_bandwidth_lscv(const EmpiricalTransiogram& samples, KernelFamily family,
                                    const std::vector<double>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_bandwidth_lscv: empty candidate grid");
  size_t ndefined = 0;
  for (size_t l = 0; l < samples.lags.size(); ++l)
    if (samples.at(1, 1, l).defined()) ++ndefined;
  if (ndefined < 3)
    throw std::invalid_argument("select_bandwidth_lscv: need >= 3 lags with defined samples");

  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  const int K = samples.nclasses;

  // roundoff guard so that exact mathematical ties resolve to the smaller r
  double total_weight = 0.0;
  for (int t = 1; t <= K; ++t)
    for (size_t l : detail::usable_lags(samples, t))
      total_weight += static_cast<double>(samples.at(t, t, l).npairs);
  const double tie_tol = 1e-12 * std::max(1.0, total_weight);

  double best_r = sorted.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double r : sorted) {
    if (!(r > 0.0)) throw std::invalid_argument("select_bandwidth_lscv: non-positive candidate");
    NonparametricModel model{samples, KernelSpec{family, r}};
    double err = 0.0;
    for (int t = 1; t <= K; ++t)
      for (size_t l : detail::usable_lags(samples, t)) {
        const double w = static_cast<double>(samples.at(t, t, l).npairs);
        for (int h = 1; h <= K; ++h) {
          const auto fit = kernel_regress(model, t, h, samples.lags[l].distance, l);
          if (!fit) continue;
          const double d = samples.at(t, h, l).value() - *fit;
          err += w * d * d;
        }
      }
    if (err < best_err - tie_tol) {  // ties keep the smaller r
      best_err = err;
      best_r = r;
    }
  }
  return best_r;
}

/// Discontinuity of the fitted curve at the origin: |limit of the regression
/// as h* -> 0+ minus the forced origin value|, evaluated at min lag / 1000.
inline double nugget_estimate(const NonparametricModel& model, int tail, int head) {
  double minlag = std::numeric_limits<double>::infinity();
  for (size_t l : detail::usable_lags(model.samples, tail))
    minlag = std::min(minlag, model.samples.lags[l].distance);
  if (!std::isfinite(minlag))
    throw std::invalid_argument("nugget_estimate: no usable samples for tail");
  const auto v = kernel_regress(model, tail, head, minlag / 1000.0);
  if (!v) throw std::invalid_argument("nugget_estimate: not evaluable near the origin");
  const double origin = (tail == head) ? 1.0 : 0.0;
  return std::abs(*v - origin);
}

}  // namespace transio

#endif
