#ifndef TRANSIO_SHAPE_HPP
#define TRANSIO_SHAPE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "transio/empirical.hpp"
#include "transio/grid.hpp"

namespace transio {

/// First derivative of an auto-transiogram at the origin (per map unit).
/// Non-positive for auto curves, which decrease from 1.
struct TransitionRate {
  int classlabel = 0;
  double direction = 0.0;
  double rate = 0.0;
  double stderr_proxy = 0.0;  // rms residual of the anchored fit
};

struct ShapeMetric {
  int classlabel = 0;
  double psi = 0.0;
  enum class Method { isotropic, directional, raster_oracle } method = Method::isotropic;
};

/// Anchored least-squares slope through (0,1) of the first nlags samples of
/// the auto curve for class k: minimizes sum (v_i - 1 - m h_i)^2, so
/// m = sum h_i (v_i - 1) / sum h_i^2. nlags = 1 is the one-sided difference.
inline TransitionRate transition_rate(const EmpiricalTransiogram& curve, int k, int nlags) {
  if (nlags < 1) throw std::invalid_argument("transition_rate: nlags must be >= 1");
  if (static_cast<size_t>(nlags) > curve.lags.size())
    throw std::invalid_argument("transition_rate: curve has fewer lags than requested");
  double sum_hh = 0.0, sum_hv = 0.0;
  for (int i = 0; i < nlags; ++i) {
    const auto& s = curve.at(k, k, static_cast<size_t>(i));
    if (!s.defined())
      throw std::invalid_argument("transition_rate: undefined sample at one of the smallest lags");
    const double h = s.lag.distance;
    sum_hh += h * h;
    sum_hv += h * (s.value() - 1.0);
  }
  TransitionRate r;
  r.classlabel = k;
  r.direction = curve.lags.front().direction;
  r.rate = sum_hv / sum_hh;
  double ss = 0.0;
  for (int i = 0; i < nlags; ++i) {
    const auto& s = curve.at(k, k, static_cast<size_t>(i));
    const double resid = s.value() - 1.0 - r.rate * s.lag.distance;
    ss += resid * resid;
  }
  r.stderr_proxy = std::sqrt(ss / nlags);
  return r;
}

/// Isotropic perimeter-to-area ratio: Psi = -pi * rate.
inline ShapeMetric psi_isotropic(const TransitionRate& rate) {
  if (rate.rate > 0.0)
    throw std::invalid_argument("psi_isotropic: positive transition rate is non-physical");
  ShapeMetric m;
  m.classlabel = rate.classlabel;
  m.psi = -M_PI * rate.rate;
  m.method = ShapeMetric::Method::isotropic;
  return m;
}

/// Directional integral Psi = -(1/2) int_0^2pi rate(phi) dphi, discretized by
/// the periodic trapezoid rule. Each estimated direction contributes phi and
/// phi + pi with the same rate (auto-scan symmetry).
inline ShapeMetric psi_directional(const std::vector<TransitionRate>& rates) {
  if (rates.size() < 2) throw std::invalid_argument("psi_directional: need >= 2 distinct directions");
  for (const auto& r : rates)
    if (r.rate > 0.0)
      throw std::invalid_argument("psi_directional: positive transition rate is non-physical");

  std::vector<std::pair<double, double>> pts;  // (angle, rate) over the full circle
  for (const auto& r : rates) {
    double phi = std::fmod(r.direction, 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    pts.emplace_back(phi, r.rate);
    pts.emplace_back(std::fmod(phi + M_PI, 2.0 * M_PI), r.rate);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            pts.end());
  if (pts.size() < 2) throw std::invalid_argument("psi_directional: need >= 2 distinct directions");

  double integral = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& cur = pts[i];
    const auto& nxt = pts[(i + 1) % pts.size()];
    const double dphi = (i + 1 < pts.size()) ? nxt.first - cur.first
                                             : 2.0 * M_PI - cur.first + pts.front().first;
    integral += 0.5 * dphi * (cur.second + nxt.second);
  }
  ShapeMetric m;
  m.classlabel = rates.front().classlabel;
  m.psi = -0.5 * integral;
  m.method = ShapeMetric::Method::directional;
  return m;
}

/// Analytic auto-transiogram of a disk of radius R on a unit-area map:
/// lens-overlap area ratio, zero once the disk and its translate are
/// disjoint (h >= 2R).
inline double circle_auto_transiogram(double R, double h) {
  if (!(R > 0.0)) throw std::invalid_argument("circle_auto_transiogram: radius must be positive");
  if (h < 0.0) throw std::invalid_argument("circle_auto_transiogram: negative lag");
  const double t = h / (2.0 * R);
  if (t >= 1.0) return 0.0;
  return (2.0 / M_PI) * (std::acos(t) - t * std::sqrt(1.0 - t * t));
}

/// Raster perimeter/area oracle with 4-connectivity. Perimeter counts cell
/// edges separating class k from other classes; edges on the map boundary
/// are excluded unless include_boundary is set. Psi is reported on the map
/// rescaled to unit total area.
inline ShapeMetric raster_perimeter_area(const CategoricalGrid& g, int k,
                                         bool include_boundary = false) {
  if (k < 1 || k > g.nclasses) throw std::invalid_argument("raster_perimeter_area: class out of range");
  long cellcount = 0;
  long edges = 0;
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) {
      if (g.label(r, c) != k) continue;
      ++cellcount;
      const int dr[4] = {-1, 1, 0, 0};
      const int dc[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const int rr = r + dr[d], cc = c + dc[d];
        if (!g.inside(rr, cc)) {
          if (include_boundary) ++edges;
        } else if (g.label(rr, cc) != k) {
          ++edges;
        }
      }
    }
  if (cellcount == 0) throw std::invalid_argument("raster_perimeter_area: class absent from grid");
  const double total_area = static_cast<double>(g.ncells()) * g.cellsize * g.cellsize;
  const double perimeter = edges * g.cellsize;
  const double area = cellcount * g.cellsize * g.cellsize;
  ShapeMetric m;
  m.classlabel = k;
  // rescale the map to unit total area: lengths shrink by sqrt(total_area)
  m.psi = (perimeter / std::sqrt(total_area)) / (area / total_area);
  m.method = ShapeMetric::Method::raster_oracle;
  return m;
}

/// Diagnostic for fractal-like boundaries: estimates the one-sided rate at a
/// sequence of shrinking lags and flags divergence (|rate| growing without
/// apparent bound) instead of reporting a limit.
struct RateConvergence {
  std::vector<double> lags;
  std::vector<double> rates;
  bool diverging = false;
  double limit_estimate = 0.0;  // finest-lag rate when not diverging
};

inline RateConvergence rate_convergence(const std::vector<double>& lags,
                                        const std::vector<double>& values) {
  if (lags.size() != values.size() || lags.size() < 3)
    throw std::invalid_argument("rate_convergence: need >= 3 matched lag/value pairs");
  RateConvergence rc;
  rc.lags = lags;
  for (size_t i = 0; i < lags.size(); ++i) rc.rates.push_back((values[i] - 1.0) / lags[i]);
  // diverging if |rate| keeps growing by >10% at every halving
  bool growing = true;
  for (size_t i = 1; i < rc.rates.size(); ++i)
    if (std::abs(rc.rates[i]) <= 1.1 * std::abs(rc.rates[i - 1])) growing = false;
  rc.diverging = growing;
  rc.limit_estimate = rc.rates.back();
  return rc;
}

}  // namespace transio

#endif
