#ifndef TRANSIO_EMPIRICAL_HPP
#define TRANSIO_EMPIRICAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "transio/grid.hpp"

namespace transio {

/// One empirical transition-probability sample at a fixed lag.
/// value = ntransitions/npairs when npairs > 0, otherwise undefined.
struct TransiogramSample {
  int tail = 0;
  int head = 0;
  LagVector lag;
  long npairs = 0;        // in-bounds pairs whose tail cell has class `tail`
  long ntransitions = 0;  // those pairs whose head cell has class `head`

  // Curves read back from CSV (e.g. fitted curves) carry the value directly
  // instead of integer counts.
  bool has_explicit_value = false;
  double explicit_value = std::numeric_limits<double>::quiet_NaN();

  bool defined() const { return has_explicit_value || npairs > 0; }
  double value() const {
    if (has_explicit_value) return explicit_value;
    return npairs > 0 ? static_cast<double>(ntransitions) / static_cast<double>(npairs)
                      : std::numeric_limits<double>::quiet_NaN();
  }
};

/// K x K x nlags family of samples; samples are stored lag-major.
struct EmpiricalTransiogram {
  int nclasses = 0;
  std::vector<LagVector> lags;
  std::vector<TransiogramSample> samples;  // size nclasses*nclasses*lags.size()

  const TransiogramSample& at(int tail, int head, size_t lagindex) const {
    return samples[(lagindex * nclasses + (tail - 1)) * nclasses + (head - 1)];
  }
  TransiogramSample& at(int tail, int head, size_t lagindex) {
    return samples[(lagindex * nclasses + (tail - 1)) * nclasses + (head - 1)];
  }
};

/// Exhaustive scan of all in-bounds ordered pairs (x, x+h). Pairs whose head
/// falls outside the grid are discarded. Returns the K*K sample matrix
/// (tail-major) for this single lag.
inline std::vector<TransiogramSample> scan_lag(const CategoricalGrid& g, int drow, int dcol) {
  const int K = g.nclasses;
  std::vector<TransiogramSample> out(static_cast<size_t>(K) * K);
  const LagVector lag = LagVector::from_offsets(drow, dcol, g.cellsize);
  for (int t = 1; t <= K; ++t)
    for (int h = 1; h <= K; ++h) {
      auto& s = out[static_cast<size_t>(t - 1) * K + (h - 1)];
      s.tail = t;
      s.head = h;
      s.lag = lag;
    }
  const int r0 = std::max(0, -drow), r1 = std::min(g.nrows, g.nrows - drow);
  const int c0 = std::max(0, -dcol), c1 = std::min(g.ncols, g.ncols - dcol);
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) {
      const int t = g.label(r, c);
      const int h = g.label(r + drow, c + dcol);
      for (int hh = 1; hh <= K; ++hh) out[static_cast<size_t>(t - 1) * K + (hh - 1)].npairs++;
      out[static_cast<size_t>(t - 1) * K + (h - 1)].ntransitions++;
    }
  return out;
}

/// Literal form of the empirical estimator with whole-map proportion
/// normalization: (1/(pi_k N(h))) sum i_k(x) i_k'(x+h). Undefined (NaN) for
/// tails with pi_k = 0. Kept for fidelity; the conditional estimator in
/// scan_lag is the default.
inline std::vector<double> scan_lag_global_norm(const CategoricalGrid& g, int drow, int dcol) {
  const int K = g.nclasses;
  const auto counts = scan_lag(g, drow, dcol);
  const auto pi = proportions(g);
  long npairs_total = 0;
  for (int t = 1; t <= K; ++t) npairs_total += counts[static_cast<size_t>(t - 1) * K].npairs;
  std::vector<double> out(static_cast<size_t>(K) * K, std::numeric_limits<double>::quiet_NaN());
  if (npairs_total == 0) return out;
  for (int t = 1; t <= K; ++t) {
    if (pi[static_cast<size_t>(t - 1)] <= 0.0) continue;
    for (int h = 1; h <= K; ++h) {
      const auto& s = counts[static_cast<size_t>(t - 1) * K + (h - 1)];
      out[static_cast<size_t>(t - 1) * K + (h - 1)] =
          static_cast<double>(s.ntransitions) / (pi[static_cast<size_t>(t - 1)] * npairs_total);
    }
  }
  return out;
}

/// Directional curve: scan_lag at integer multiples 1..maxlag of the unit
/// step (steprow, stepcol), recorded with true Euclidean distances.
inline EmpiricalTransiogram directional_curve(const CategoricalGrid& g, int steprow, int stepcol,
                                              int maxlag) {
  if (maxlag < 1) throw std::invalid_argument("directional_curve: maxlag must be >= 1");
  if (steprow == 0 && stepcol == 0)
    throw std::invalid_argument("directional_curve: zero unit step");
  EmpiricalTransiogram curve;
  curve.nclasses = g.nclasses;
  for (int m = 1; m <= maxlag; ++m) {
    curve.lags.push_back(LagVector::from_offsets(m * steprow, m * stepcol, g.cellsize));
    auto mat = scan_lag(g, m * steprow, m * stepcol);
    curve.samples.insert(curve.samples.end(), mat.begin(), mat.end());
  }
  return curve;
}

/// Omnidirectional curve: pools integer counts of every ordered integer lag
/// vector (h and -h both included) whose distance falls in each bin, then
/// divides. Bin lags are recorded as midpoint distances with (drow,dcol)=(0,0).
inline EmpiricalTransiogram omnidirectional_curve(const CategoricalGrid& g,
                                                  const std::vector<double>& binedges) {
  if (binedges.size() < 2) throw std::invalid_argument("omnidirectional_curve: need >= 2 bin edges");
  for (size_t i = 0; i + 1 < binedges.size(); ++i)
    if (!(binedges[i] < binedges[i + 1]))
      throw std::invalid_argument("omnidirectional_curve: bin edges must be strictly increasing");
  if (!(binedges.front() > 0.0))
    throw std::invalid_argument("omnidirectional_curve: bin edges must start above zero");

  const int K = g.nclasses;
  const size_t nbins = binedges.size() - 1;
  EmpiricalTransiogram curve;
  curve.nclasses = K;
  for (size_t b = 0; b < nbins; ++b) {
    LagVector mid;
    mid.distance = 0.5 * (binedges[b] + binedges[b + 1]);
    curve.lags.push_back(mid);
  }
  curve.samples.resize(nbins * K * K);
  for (size_t b = 0; b < nbins; ++b)
    for (int t = 1; t <= K; ++t)
      for (int h = 1; h <= K; ++h) {
        auto& s = curve.at(t, h, b);
        s.tail = t;
        s.head = h;
        s.lag = curve.lags[b];
      }

  const int dmax = static_cast<int>(std::ceil(binedges.back() / g.cellsize));
  for (int dr = -dmax; dr <= dmax; ++dr)
    for (int dc = -dmax; dc <= dmax; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const double dist = g.cellsize * std::sqrt(double(dr) * dr + double(dc) * dc);
      if (dist < binedges.front() || dist >= binedges.back()) continue;
      const size_t b =
          std::upper_bound(binedges.begin(), binedges.end(), dist) - binedges.begin() - 1;
      auto mat = scan_lag(g, dr, dc);
      for (int t = 1; t <= K; ++t)
        for (int h = 1; h <= K; ++h) {
          auto& s = curve.at(t, h, b);
          const auto& m = mat[static_cast<size_t>(t - 1) * K + (h - 1)];
          s.npairs += m.npairs;
          s.ntransitions += m.ntransitions;
        }
    }
  return curve;
}

/// Curve CSV: header `tail,head,drow,dcol,distance,value,npairs`; undefined
/// values serialize as an empty field.
inline void write_curve_csv(std::ostream& out, const EmpiricalTransiogram& curve) {
  out << "tail,head,drow,dcol,distance,value,npairs\n";
  out.precision(17);
  for (size_t l = 0; l < curve.lags.size(); ++l)
    for (int t = 1; t <= curve.nclasses; ++t)
      for (int h = 1; h <= curve.nclasses; ++h) {
        const auto& s = curve.at(t, h, l);
        out << t << ',' << h << ',' << s.lag.drow << ',' << s.lag.dcol << ',' << s.lag.distance
            << ',';
        if (s.defined()) out << s.value();
        out << ',' << s.npairs << "\n";
      }
}

inline EmpiricalTransiogram read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("tail,head,drow,dcol,distance,value,npairs", 0) != 0)
    throw std::runtime_error("curve csv: bad or missing header");

  struct Row {
    int tail, head, drow, dcol;
    double distance, value;
    long npairs;
    bool defined;
  };
  std::vector<Row> rows;
  int K = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    Row r{};
    auto next = [&](const char* what) {
      if (!std::getline(ls, field, ','))
        throw std::runtime_error("curve csv: line " + std::to_string(lineno) + ": missing " + what);
      return field;
    };
    r.tail = std::stoi(next("tail"));
    r.head = std::stoi(next("head"));
    r.drow = std::stoi(next("drow"));
    r.dcol = std::stoi(next("dcol"));
    r.distance = std::stod(next("distance"));
    next("value");
    r.defined = !field.empty();
    r.value = r.defined ? std::stod(field) : std::numeric_limits<double>::quiet_NaN();
    r.npairs = std::stol(next("npairs"));
    if (r.tail < 1 || r.head < 1)
      throw std::runtime_error("curve csv: line " + std::to_string(lineno) + ": bad class label");
    K = std::max(K, std::max(r.tail, r.head));
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("curve csv: no data rows");

  // distinct lags in file order
  EmpiricalTransiogram curve;
  curve.nclasses = K;
  std::vector<std::pair<double, std::pair<int, int>>> seen;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.distance, std::make_pair(r.drow, r.dcol));
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      LagVector lag;
      lag.drow = r.drow;
      lag.dcol = r.dcol;
      lag.distance = r.distance;
      curve.lags.push_back(lag);
    }
  }
  curve.samples.resize(curve.lags.size() * K * K);
  for (size_t l = 0; l < curve.lags.size(); ++l)
    for (int t = 1; t <= K; ++t)
      for (int h = 1; h <= K; ++h) {
        auto& s = curve.at(t, h, l);
        s.tail = t;
        s.head = h;
        s.lag = curve.lags[l];
      }
  for (const auto& r : rows) {
    auto key = std::make_pair(r.distance, std::make_pair(r.drow, r.dcol));
    const size_t l = std::find(seen.begin(), seen.end(), key) - seen.begin();
    auto& s = curve.at(r.tail, r.head, l);
    s.npairs = r.npairs;
    s.has_explicit_value = r.defined;
    s.explicit_value = r.value;
  }
  return curve;
}

}  // namespace transio

#endif
