// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "transio/empirical.hpp"
#include "transio/fitting.hpp"
#include "transio/grfsim.hpp"
#include "transio/grid.hpp"
#include "transio/models.hpp"
#include "transio/rng.hpp"
#include "transio/shape.hpp"
#include "transio/validity.hpp"

using namespace transio;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%d] %-34s %s  (%s)\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

EmpiricalTransiogram curve_from_values(const std::vector<std::pair<double, double>>& pts) {
  EmpiricalTransiogram c;
  c.nclasses = 2;
  for (const auto& [h, v] : pts) {
    LagVector lag;
    lag.distance = h;
    c.lags.push_back(lag);
  }
  c.samples.resize(c.lags.size() * 4);
  for (size_t l = 0; l < c.lags.size(); ++l)
    for (int t = 1; t <= 2; ++t)
      for (int hh = 1; hh <= 2; ++hh) {
        auto& s = c.at(t, hh, l);
        s.tail = t;
        s.head = hh;
        s.lag = c.lags[l];
        if (t == 1) {
          s.has_explicit_value = true;
          s.explicit_value = (hh == 1) ? pts[l].second : 1.0 - pts[l].second;
        }
      }
  return c;
}

CategoricalGrid disk_grid(int n, double R) {
  CategoricalGrid g;
  g.nrows = n;
  g.ncols = n;
  g.cellsize = 1.0 / n;
  g.nclasses = 2;
  g.labels.reserve(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double x = (c + 0.5) * g.cellsize - 0.5, y = (r + 0.5) * g.cellsize - 0.5;
      g.labels.push_back(x * x + y * y <= R * R ? 1 : 2);
    }
  return g;
}

double disk_psi_directional(int n, double R) {
  const auto g = disk_grid(n, R);
  const std::vector<std::pair<int, int>> steps = {{0, 1}, {1, 1}, {1, 0}, {1, -1}};
  std::vector<TransitionRate> rates;
  for (const auto& [dr, dc] : steps) {
    const auto curve = directional_curve(g, dr, dc, 1);
    rates.push_back(transition_rate(curve, 1, 1));
  }
  return psi_directional(rates).psi;
}

EmpiricalTransiogram random_samples(Rng& rng, int K, int N) {
  EmpiricalTransiogram c;
  c.nclasses = K;
  for (int l = 0; l < N; ++l) {
    LagVector lag;
    lag.distance = 0.5 * (l + 1) + 0.3 * rng.uniform();
    c.lags.push_back(lag);
  }
  c.samples.resize(static_cast<size_t>(N) * K * K);
  for (int l = 0; l < N; ++l)
    for (int t = 1; t <= K; ++t) {
      std::vector<double> row(K);
      double sum = 0.0;
      for (int h = 0; h < K; ++h) {
        row[h] = rng.uniform() + 1e-3;
        sum += row[h];
      }
      for (int h = 1; h <= K; ++h) {
        auto& s = c.at(t, h, static_cast<size_t>(l));
        s.tail = t;
        s.head = h;
        s.lag = c.lags[static_cast<size_t>(l)];
        s.has_explicit_value = true;
        s.explicit_value = row[h - 1] / sum;
        s.npairs = rng.uniform_int(1, 500);
        s.ntransitions = 0;
      }
    }
  return c;
}

// naive oracle for criterion 8
std::vector<TransiogramSample> naive_scan(const CategoricalGrid& g, int dr, int dc) {
  const int K = g.nclasses;
  std::vector<TransiogramSample> out(static_cast<size_t>(K) * K);
  for (int t = 1; t <= K; ++t)
    for (int h = 1; h <= K; ++h) {
      auto& s = out[static_cast<size_t>(t - 1) * K + (h - 1)];
      s.tail = t;
      s.head = h;
      s.lag = LagVector::from_offsets(dr, dc, g.cellsize);
    }
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) {
      const int r2 = r + dr, c2 = c + dc;
      if (r2 < 0 || r2 >= g.nrows || c2 < 0 || c2 >= g.ncols) continue;
      const int t = g.label(r, c), h = g.label(r2, c2);
      for (int hh = 1; hh <= K; ++hh) out[static_cast<size_t>(t - 1) * K + (hh - 1)].npairs++;
      out[static_cast<size_t>(t - 1) * K + (h - 1)].ntransitions++;
    }
  return out;
}

CategoricalGrid coherent_map(int n, Rng& rng) {
  CategoricalGrid g;
  g.nrows = n;
  g.ncols = n;
  g.cellsize = 1.0 / n;
  g.nclasses = 2;
  g.labels.assign(static_cast<size_t>(n) * n, 2);
  const int height = static_cast<int>(std::lround(0.4 * n));
  const int start = rng.uniform_int(0, n - height);
  for (int r = start; r < start + height; ++r)
    for (int c = 0; c < n; ++c) g.labels[static_cast<size_t>(r) * n + c] = 1;
  return g;
}

CategoricalGrid fragmented_map(int n, Rng& rng) {
  CategoricalGrid g;
  g.nrows = n;
  g.ncols = n;
  g.cellsize = 1.0 / n;
  g.nclasses = 2;
  g.labels.assign(static_cast<size_t>(n) * n, 2);
  const int block = 5;
  const long target = std::lround(0.4 * n * n);
  long count = 0;
  while (count < target) {
    const int r0 = rng.uniform_int(0, n - block);
    const int c0 = rng.uniform_int(0, n - block);
    for (int r = r0; r < r0 + block; ++r)
      for (int c = c0; c < c0 + block; ++c) {
        auto& v = g.labels[static_cast<size_t>(r) * n + c];
        if (v == 2) {
          v = 1;
          ++count;
        }
      }
  }
  return g;
}

double mean_abs_axis_rate(const CategoricalGrid& g) {
  double sum = 0.0;
  for (const auto& [dr, dc] : {std::pair{0, 1}, std::pair{1, 0}}) {
    const auto curve = directional_curve(g, dr, dc, 1);
    sum += std::abs(transition_rate(curve, 1, 1).rate);
  }
  return sum / 2.0;
}

void criterion1() {
  const double R = 0.25;
  double rate = 0.0;
  for (double h : {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
    const auto c = curve_from_values({{h, circle_auto_transiogram(R, h)}});
    rate = transition_rate(c, 1, 1).rate;
  }
  const double rate_err = std::abs(rate - (-8.0 / M_PI)) / (8.0 / M_PI);
  TransitionRate tr;
  tr.classlabel = 1;
  tr.rate = rate;
  const double psi = psi_isotropic(tr).psi;
  const double psi_err = std::abs(psi - 8.0) / 8.0;
  report(1, "circle rate -> -8/pi, psi -> 8", rate_err < 0.01 && psi_err < 0.01,
         fmt("rate rel err %.2e, psi rel err %.2e", rate_err, psi_err));
}

void criterion2() {
  const double psi_full = disk_psi_directional(512, 0.25);
  const double psi_half = disk_psi_directional(512, 0.125);
  const double err = std::abs(psi_full - 8.0) / 8.0;
  report(2, "rasterized disk psi_directional", err < 0.10 && psi_half > psi_full,
         fmt("psi=%.4f (half-radius %.4f)", psi_full, psi_half));
}

void criterion3() {
  ParametricModel m;
  m.range = 1.0;
  m.proportion = 0.5;

  m.family = ModelFamily::gaussian;
  const auto tri = check_triangle(m, 0.2, 0.2);
  bool ok = !tri.pass && tri.margin <= -1e-3;

  std::vector<double> spacings;
  for (int i = 1; i <= 19; ++i) spacings.push_back(i / 20.0);
  const auto cfgs = build_configurations(10, spacings, 1000, 3, 2.0);
  double worst_exp = 1.0;
  for (auto f : {ModelFamily::spherical, ModelFamily::circular, ModelFamily::triangular}) {
    const auto rep = excursion_eligibility(f, 1.0, 0.0, cfgs);
    ok = ok && !rep.all_pass() && rep.checks.back().margin < -1e-6;
  }
  m.family = ModelFamily::exponential;
  const auto expo = search_violation(m, 8, {}, 1000, 3);
  const auto expo_psd = excursion_eligibility(ModelFamily::exponential, 1.0, 0.0, cfgs);
  ok = ok && expo.all_pass() && expo_psd.all_pass();
  worst_exp = expo_psd.checks.back().margin;
  report(3, "validity verdict table", ok,
         fmt("gaussian triangle %.4f, exp psd min eig %.2e", tri.margin, worst_exp));
}

void criterion4() {
  bool ok = std::abs(indicator_variogram_from_correlogram(0.0, 0.0) - 0.25) < 1e-8;
  ok = ok && indicator_variogram_from_correlogram(1.0, 0.0) == 0.0;
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double rho = -1.0 + 2.0 * i / 50.0;
    const double g = indicator_variogram_from_correlogram(rho, 0.4);
    const double back = invert_indicator_variogram(g, 0.4);
    worst = std::max(worst, std::abs(back - rho));
  }
  ok = ok && worst < 1e-7;
  report(4, "excursion variogram quadrature", ok, fmt("round-trip worst err %.2e", worst));
}

void criterion5() {
  const CorrelogramSpec spec{CorrelogramFamily::exponential, 10.0};
  ThresholdSet cut;
  cut.cutoffs = {0.0};
  const int nlags = 20, nseeds = 10;
  std::vector<double> mean_emp(nlags, 0.0), theo(nlags, 0.0);
  for (int s = 0; s < nseeds; ++s) {
    const auto g = truncate(simulate_grf(256, 256, 1.0, spec, 9000 + s), cut);
    const auto curve = directional_curve(g, 0, 1, nlags);
    for (int l = 0; l < nlags; ++l) {
      const auto& emp = curve.at(2, 2, static_cast<size_t>(l));
      theo[static_cast<size_t>(l)] = theoretical_auto_transiogram(spec, 0.0, emp.lag.distance);
      mean_emp[static_cast<size_t>(l)] += emp.value() / nseeds;
    }
  }
  double worst = 0.0;
  for (int l = 0; l < nlags; ++l)
    worst = std::max(worst, std::abs(mean_emp[static_cast<size_t>(l)] - theo[static_cast<size_t>(l)]));
  report(5, "GRF excursion oracle agreement", worst <= 0.02,
         fmt("worst seed-averaged abs err %.4f", worst));
}

void criterion6() {
  Rng rng(606);
  bool ok = true;
  double worst = 0.0;
  const KernelFamily kernels[] = {KernelFamily::epanechnikov, KernelFamily::gaussian,
                                  KernelFamily::biweight, KernelFamily::triangular};
  for (int rep = 0; rep < 100 && ok; ++rep) {
    const int K = std::vector<int>{2, 3, 5}[rng.uniform_int(0, 2)];
    const int N = rng.uniform_int(5, 50);
    const auto samples = random_samples(rng, K, N);
    for (auto kf : kernels)
      for (double r : {0.8, 3.0, 12.0}) {
        NonparametricModel model{samples, {kf, r}};
        for (double hstar : {0.0, 1.3, 0.5 * N, 0.25 * N + 0.1}) {
          const auto mat = regress_matrix(model, hstar);
          for (int t = 0; t < K; ++t) {
            if (std::isnan(mat[static_cast<size_t>(t) * K])) continue;
            double sum = 0.0;
            for (int h = 0; h < K; ++h) {
              const double v = mat[static_cast<size_t>(t) * K + h];
              ok = ok && v >= 0.0 && v <= 1.0;
              sum += v;
            }
            worst = std::max(worst, std::abs(sum - 1.0));
            if (hstar == 0.0) {
              for (int h = 0; h < K; ++h) {
                const double want = (h == t) ? 1.0 : 0.0;
                ok = ok && mat[static_cast<size_t>(t) * K + h] == want;
              }
            }
          }
        }
      }
  }
  ok = ok && worst < 1e-12;
  report(6, "kernel regression validity", ok, fmt("worst row-sum dev %.2e", worst));
}

void criterion7() {
  Rng rng(707);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int K = 2 + rng.uniform_int(0, 2);
    const auto samples = random_samples(rng, K, rng.uniform_int(5, 30));
    NonparametricModel model{samples, {KernelFamily::triangular, 1.0}};
    std::vector<double> lags, vals;
    for (const auto& l : samples.lags) lags.push_back(l.distance);
    for (int i = 0; i < 50; ++i) {
      const double h = lags.front() + (lags.back() - lags.front()) * rng.uniform();
      for (int t = 1; t <= K; ++t)
        for (int hh = 1; hh <= K; ++hh) {
          std::vector<std::pair<double, double>> pts;
          for (size_t l = 0; l < samples.lags.size(); ++l)
            pts.emplace_back(lags[l], samples.at(t, hh, l).value());
          const double expect = linear_interpolate(pts, h);
          const double got = kernel_regress_two_nearest(model, t, hh, h);
          worst = std::max(worst, std::abs(got - expect));
        }
    }
  }
  report(7, "2-NN == linear interpolation", worst < 1e-12, fmt("worst dev %.2e", worst));
}

void criterion8() {
  Rng rng(808);
  bool ok = true;
  for (int rep = 0; rep < 100 && ok; ++rep) {
    CategoricalGrid g;
    g.nrows = rng.uniform_int(1, 8);
    g.ncols = rng.uniform_int(1, 8);
    g.cellsize = 1.0;
    g.nclasses = rng.uniform_int(2, 4);
    for (int i = 0; i < g.nrows * g.ncols; ++i)
      g.labels.push_back(rng.uniform_int(1, g.nclasses));
    for (int dr = -3; dr <= 3; ++dr)
      for (int dc = -3; dc <= 3; ++dc) {
        const auto fast = scan_lag(g, dr, dc);
        const auto slow = naive_scan(g, dr, dc);
        for (size_t i = 0; i < fast.size(); ++i)
          ok = ok && fast[i].npairs == slow[i].npairs &&
               fast[i].ntransitions == slow[i].ntransitions;
      }
  }
  report(8, "exhaustive-scan oracle", ok, "100 grids, |dr|,|dc|<=3");
}

void criterion9() {
  Rng rng(909);
  bool ok = true;
  double min_gap = 1e9;
  for (int inst = 0; inst < 10; ++inst) {
    Rng local = rng.split(static_cast<std::uint64_t>(inst));
    const auto coh = coherent_map(128, local);
    const auto frag = fragmented_map(128, local);
    const double pc = proportions(coh)[0], pf = proportions(frag)[0];
    ok = ok && std::abs(pc - 0.4) <= 0.01 && std::abs(pf - 0.4) <= 0.01;
    const double rc = mean_abs_axis_rate(coh), rf = mean_abs_axis_rate(frag);
    ok = ok && rf > rc;
    min_gap = std::min(min_gap, rf - rc);
  }
  report(9, "fragmentation rate ordering", ok, fmt("min |rate| gap %.3f", min_gap));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures != 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria PASS\n");
  return 0;
}
