#ifndef TRANSIO_GRFSIM_HPP
#define TRANSIO_GRFSIM_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "transio/grid.hpp"
#include "transio/numerics.hpp"
#include "transio/rng.hpp"
#include "transio/validity.hpp"

namespace transio {

enum class CorrelogramFamily { exponential, gaussian, spherical };

inline CorrelogramFamily correlogram_from_name(const std::string& s) {
  if (s == "exponential") return CorrelogramFamily::exponential;
  if (s == "gaussian") return CorrelogramFamily::gaussian;
  if (s == "spherical") return CorrelogramFamily::spherical;
  throw std::invalid_argument("unknown correlogram family: " + s);
}

inline std::string correlogram_name(CorrelogramFamily f) {
  switch (f) {
    case CorrelogramFamily::exponential: return "exponential";
    case CorrelogramFamily::gaussian: return "gaussian";
    case CorrelogramFamily::spherical: return "spherical";
  }
  throw std::logic_error("correlogram_name: unknown family");
}

/// Correlation function of the latent unit-variance field.
struct CorrelogramSpec {
  CorrelogramFamily family = CorrelogramFamily::exponential;
  double range = 1.0;

  double rho(double h) const {
    if (!(range > 0.0)) throw std::invalid_argument("correlogram: range must be positive");
    const double t = std::abs(h) / range;
    switch (family) {
      case CorrelogramFamily::exponential: return std::exp(-t);
      case CorrelogramFamily::gaussian: return std::exp(-t * t);
      case CorrelogramFamily::spherical:
        return t >= 1.0 ? 0.0 : 1.0 - 1.5 * t + 0.5 * t * t * t;
    }
    throw std::logic_error("correlogram: unknown family");
  }
};

/// Strictly increasing cutoffs z_1 < ... < z_{K-1}; class k collects field
/// values in [z_{k-1}, z_k).
struct ThresholdSet {
  std::vector<double> cutoffs;

  void validate() const {
    if (cutoffs.empty()) throw std::invalid_argument("thresholds: need at least one cutoff");
    for (size_t i = 0; i + 1 < cutoffs.size(); ++i)
      if (!(cutoffs[i] < cutoffs[i + 1]))
        throw std::invalid_argument("thresholds: cutoffs must be strictly increasing");
  }

  int nclasses() const { return static_cast<int>(cutoffs.size()) + 1; }

  std::vector<double> implied_proportions() const {
    validate();
    std::vector<double> p;
    double prev = 0.0;
    for (double z : cutoffs) {
      const double cdf = normal_cdf(z);
      p.push_back(cdf - prev);
      prev = cdf;
    }
    p.push_back(1.0 - prev);
    return p;
  }

  /// Cutoffs hitting given target proportions (must sum to 1).
  static ThresholdSet from_proportions(const std::vector<double>& props) {
    if (props.size() < 2) throw std::invalid_argument("thresholds: need >= 2 proportions");
    double sum = 0.0;
    for (double p : props) {
      if (!(p > 0.0)) throw std::invalid_argument("thresholds: proportions must be positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("thresholds: proportions must sum to 1");
    ThresholdSet t;
    double cum = 0.0;
    for (size_t i = 0; i + 1 < props.size(); ++i) {
      cum += props[i];
      t.cutoffs.push_back(normal_quantile(cum));
    }
    return t;
  }
};

/// Real-valued lattice field (row-major), zero mean, unit variance.
struct RealField {
  int nrows = 0;
  int ncols = 0;
  double cellsize = 1.0;
  std::vector<double> values;

  double at(int r, int c) const { return values[static_cast<size_t>(r) * ncols + c]; }
};

namespace detail {

inline double lattice_distance(int dr, int dc, double cellsize) {
  return cellsize * std::sqrt(double(dr) * dr + double(dc) * dc);
}

/// Exact dense-factorization simulation; intended for grids up to 64 x 64.
inline RealField simulate_grf_dense(int nrows, int ncols, double cellsize,
                                    const CorrelogramSpec& spec, std::uint64_t seed) {
  const long n = static_cast<long>(nrows) * ncols;
  Eigen::MatrixXd cov(n, n);
  for (long i = 0; i < n; ++i) {
    const int ri = static_cast<int>(i / ncols), ci = static_cast<int>(i % ncols);
    for (long j = i; j < n; ++j) {
      const int rj = static_cast<int>(j / ncols), cj = static_cast<int>(j % ncols);
      const double rho = spec.rho(lattice_distance(ri - rj, ci - cj, cellsize));
      cov(i, j) = rho;
      cov(j, i) = rho;
    }
  }

  Eigen::MatrixXd factor;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    // near-singular correlation matrix (e.g. gaussian family on a fine grid):
    // eigen-factorize and clamp numerically-negative eigenvalues
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double lmin = es.eigenvalues()(0);
    if (lmin < -1e-8 * n)
      throw std::runtime_error("simulate_grf: correlation matrix is not positive semidefinite");
    Eigen::VectorXd sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor = es.eigenvectors() * sqrt_ev.asDiagonal();
  }

  Rng rng(seed);
  Eigen::VectorXd w(n);
  for (long i = 0; i < n; ++i) w(i) = rng.normal();
  Eigen::VectorXd z = factor * w;

  RealField f;
  f.nrows = nrows;
  f.ncols = ncols;
  f.cellsize = cellsize;
  f.values.assign(z.data(), z.data() + n);
  return f;
}

inline void fft2(std::vector<std::complex<double>>& a, int nrows, int ncols) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> buf(std::max(nrows, ncols));
  std::vector<std::complex<double>> out(std::max(nrows, ncols));
  for (int r = 0; r < nrows; ++r) {
    buf.assign(a.begin() + static_cast<size_t>(r) * ncols,
               a.begin() + static_cast<size_t>(r + 1) * ncols);
    out.resize(ncols);
    fft.fwd(out, buf);
    std::copy(out.begin(), out.end(), a.begin() + static_cast<size_t>(r) * ncols);
  }
  for (int c = 0; c < ncols; ++c) {
    buf.resize(nrows);
    for (int r = 0; r < nrows; ++r) buf[r] = a[static_cast<size_t>(r) * ncols + c];
    out.resize(nrows);
    fft.fwd(out, buf);
    for (int r = 0; r < nrows; ++r) a[static_cast<size_t>(r) * ncols + c] = out[r];
  }
}

/// Circulant-embedding simulation on a 2x padded torus. Throws when the
/// embedding spectrum has a significantly negative eigenvalue.
inline RealField simulate_grf_circulant(int nrows, int ncols, double cellsize,
                                        const CorrelogramSpec& spec, std::uint64_t seed) {
  const int M = 2 * nrows, N = 2 * ncols;
  const size_t MN = static_cast<size_t>(M) * N;

  std::vector<std::complex<double>> base(MN);
  for (int p = 0; p < M; ++p) {
    const int dr = std::min(p, M - p);
    for (int q = 0; q < N; ++q) {
      const int dc = std::min(q, N - q);
      base[static_cast<size_t>(p) * N + q] = spec.rho(lattice_distance(dr, dc, cellsize));
    }
  }
  fft2(base, M, N);

  double lmax = 0.0, lmin = 0.0;
  for (const auto& v : base) {
    lmax = std::max(lmax, v.real());
    lmin = std::min(lmin, v.real());
  }
  if (lmin < -1e-6 * lmax)
    throw std::runtime_error(
        "simulate_grf: circulant embedding is not positive semidefinite (min eigenvalue " +
        std::to_string(lmin) + ")");

  // spectral-domain complex white noise, one split stream per torus row
  Rng rngbase(seed);
  std::vector<std::complex<double>> a(MN);
  for (int p = 0; p < M; ++p) {
    Rng row = rngbase.split(static_cast<std::uint64_t>(p));
    for (int q = 0; q < N; ++q) {
      const double u = row.normal();
      const double v = row.normal();
      const double lambda = std::max(0.0, base[static_cast<size_t>(p) * N + q].real());
      a[static_cast<size_t>(p) * N + q] = std::sqrt(lambda) * std::complex<double>(u, v);
    }
  }
  fft2(a, M, N);

  const double norm = 1.0 / std::sqrt(static_cast<double>(MN));
  RealField f;
  f.nrows = nrows;
  f.ncols = ncols;
  f.cellsize = cellsize;
  f.values.resize(static_cast<size_t>(nrows) * ncols);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c)
      f.values[static_cast<size_t>(r) * ncols + c] =
          a[static_cast<size_t>(r) * N + c].real() * norm;
  return f;
}

}  // namespace detail

/// Stationary zero-mean unit-variance GRF on a lattice: exact dense
/// factorization up to 64 x 64, circulant embedding beyond. Deterministic
/// per seed.
inline RealField simulate_grf(int nrows, int ncols, double cellsize, const CorrelogramSpec& spec,
                              std::uint64_t seed) {
  if (nrows <= 0 || ncols <= 0) throw std::invalid_argument("simulate_grf: non-positive dimensions");
  if (!(cellsize > 0.0)) throw std::invalid_argument("simulate_grf: cellsize must be positive");
  if (static_cast<long>(nrows) * ncols <= 64 * 64)
    return detail::simulate_grf_dense(nrows, ncols, cellsize, spec, seed);
  return detail::simulate_grf_circulant(nrows, ncols, cellsize, spec, seed);
}

/// Truncates a real field into K = #cutoffs + 1 classes:
/// label = 1 + #{cutoffs at or below the value}, so class k+1 is the
/// excursion set {Z >= z_k} minus higher bands.
inline CategoricalGrid truncate(const RealField& field, const ThresholdSet& thresholds) {
  thresholds.validate();
  CategoricalGrid g;
  g.nrows = field.nrows;
  g.ncols = field.ncols;
  g.cellsize = field.cellsize;
  g.nclasses = thresholds.nclasses();
  g.labels.reserve(field.values.size());
  for (double v : field.values) {
    int label = 1;
    for (double z : thresholds.cutoffs)
      if (v >= z) ++label;
    g.labels.push_back(label);
  }
  return g;
}

/// Theoretical auto-transiogram of the excursion set {Z >= z}: the
/// indicator-variogram integral of the correlogram mapped through the
/// variogram-transiogram link, with pi_k = 1 - Phi(z).
inline double theoretical_auto_transiogram(const CorrelogramSpec& spec, double z, double h) {
  if (h < 0.0) throw std::invalid_argument("theoretical_auto_transiogram: negative lag");
  const double pi_k = 1.0 - normal_cdf(z);
  if (!(pi_k > 0.0)) throw std::invalid_argument("theoretical_auto_transiogram: empty class");
  const double gamma = indicator_variogram_from_correlogram(spec.rho(h), z);
  return 1.0 - gamma / pi_k;
}

}  // namespace transio

#endif
