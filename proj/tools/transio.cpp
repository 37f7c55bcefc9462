// Command-line front end: simulate -> scan -> fit / validate / shape.
// Exit codes: 0 success, 2 usage/input error, 3 numerical infeasibility.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "transio/empirical.hpp"
#include "transio/fitting.hpp"
#include "transio/grfsim.hpp"
#include "transio/grid.hpp"
#include "transio/models.hpp"
#include "transio/shape.hpp"
#include "transio/validity.hpp"

using json = nlohmann::json;
using namespace transio;

namespace {

constexpr const char* kArtifactVersion = "1.0.0";
constexpr const char* kCurveSchema = "curve-csv-v1";

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ManifestWriter {
 public:
  ManifestWriter(std::string subcommand, std::string output_path)
      : start_(std::chrono::steady_clock::now()) {
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["artifact_version"] = kArtifactVersion;
    manifest_["csv_schema"] = kCurveSchema;
    manifest_["output"] = output_path;
    output_path_ = std::move(output_path);
  }

  json& params() { return manifest_["parameters"]; }

  void write() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    manifest_["wall_clock_ms"] = elapsed;
    std::ofstream out(output_path_ + ".manifest.json");
    out << manifest_.dump(2) << "\n";
  }

 private:
  json manifest_;
  std::string output_path_;
  std::chrono::steady_clock::time_point start_;
};

CategoricalGrid load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grid file: " + path);
  return load_grid(in);
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void write_curve_file(const std::string& path, const EmpiricalTransiogram& curve, bool fitted) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  if (!fitted) {
    write_curve_csv(out, curve);
    return;
  }
  out << "tail,head,drow,dcol,distance,value,npairs,fitted\n";
  out.precision(17);
  for (size_t l = 0; l < curve.lags.size(); ++l)
    for (int t = 1; t <= curve.nclasses; ++t)
      for (int h = 1; h <= curve.nclasses; ++h) {
        const auto& s = curve.at(t, h, l);
        out << t << ',' << h << ',' << s.lag.drow << ',' << s.lag.dcol << ',' << s.lag.distance
            << ',';
        if (s.defined()) out << s.value();
        out << ',' << s.npairs << ",1\n";
      }
}

// ---------------------------------------------------------------------------

int cmd_scan(const std::string& gridfile, std::optional<std::pair<int, int>> single_lag,
             std::optional<std::pair<int, int>> direction, int maxlag,
             const std::vector<double>& omni_edges, const std::string& output) {
  const auto grid = load_grid_file(gridfile);
  ManifestWriter manifest("scan", output);
  manifest.params()["grid"] = gridfile;

  EmpiricalTransiogram curve;
  if (single_lag) {
    curve.nclasses = grid.nclasses;
    curve.lags.push_back(LagVector::from_offsets(single_lag->first, single_lag->second, grid.cellsize));
    auto mat = scan_lag(grid, single_lag->first, single_lag->second);
    curve.samples = std::move(mat);
    manifest.params()["lag"] = {single_lag->first, single_lag->second};
  } else if (direction) {
    curve = directional_curve(grid, direction->first, direction->second, maxlag);
    manifest.params()["direction"] = {direction->first, direction->second};
    manifest.params()["maxlag"] = maxlag;
  } else if (!omni_edges.empty()) {
    curve = omnidirectional_curve(grid, omni_edges);
    manifest.params()["binedges"] = omni_edges;
  } else {
    throw InputError("scan: one of --lag, --direction, --omni is required");
  }
  write_curve_file(output, curve, false);
  manifest.write();
  return 0;
}

int cmd_fit(const std::string& curvefile, const std::string& kernel, double bandwidth,
            const std::vector<double>& lscv_grid, bool two_nearest,
            const std::vector<double>& hgrid, const std::string& output) {
  std::ifstream in(curvefile);
  if (!in) throw InputError("cannot open curve file: " + curvefile);
  const auto samples = read_curve_csv(in);
  if (hgrid.empty()) throw InputError("fit: --hgrid is required");

  // reject corrupt input: defined tail rows must satisfy unit-sum
  for (size_t l = 0; l < samples.lags.size(); ++l)
    for (int t = 1; t <= samples.nclasses; ++t) {
      if (!samples.at(t, t, l).defined()) continue;
      double sum = 0.0;
      bool allrow = true;
      for (int h = 1; h <= samples.nclasses; ++h) {
        if (!samples.at(t, h, l).defined()) {
          allrow = false;
          break;
        }
        sum += samples.at(t, h, l).value();
      }
      if (allrow && std::abs(sum - 1.0) > 1e-9)
        throw InputError("fit: input curve violates unit-sum at lag index " + std::to_string(l));
    }

  const KernelFamily family = kernel_from_name(kernel);
  ManifestWriter manifest("fit", output);
  manifest.params()["curve"] = curvefile;
  manifest.params()["kernel"] = kernel;
  manifest.params()["two_nearest"] = two_nearest;

  double r = bandwidth;
  if (!lscv_grid.empty()) {
    r = select_bandwidth_lscv(samples, family, lscv_grid);
    manifest.params()["lscv_grid"] = lscv_grid;
  }
  if (!(r > 0.0)) throw InputError("fit: bandwidth must be positive");
  manifest.params()["bandwidth"] = r;

  NonparametricModel model{samples, {family, r}};
  EmpiricalTransiogram fitted;
  fitted.nclasses = samples.nclasses;
  for (double h : hgrid) {
    LagVector lag;
    lag.distance = h;
    fitted.lags.push_back(lag);
  }
  fitted.samples.resize(hgrid.size() * samples.nclasses * samples.nclasses);
  for (size_t l = 0; l < hgrid.size(); ++l)
    for (int t = 1; t <= samples.nclasses; ++t)
      for (int h = 1; h <= samples.nclasses; ++h) {
        auto& s = fitted.at(t, h, l);
        s.tail = t;
        s.head = h;
        s.lag = fitted.lags[l];
        std::optional<double> v;
        if (two_nearest) {
          try {
            v = kernel_regress_two_nearest(model, t, h, hgrid[l]);
          } catch (const std::out_of_range&) {
            v.reset();
          }
        } else {
          v = kernel_regress(model, t, h, hgrid[l]);
        }
        if (v) {
          s.has_explicit_value = true;
          s.explicit_value = *v;
        }
      }
  write_curve_file(output, fitted, true);
  manifest.write();
  return 0;
}

int cmd_validate(const std::string& modelfile, int maxpoints, int nrandom, std::uint64_t seed,
                 const std::string& output) {
  std::ifstream in(modelfile);
  if (!in) throw InputError("cannot open model config: " + modelfile);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model config: ") + e.what());
  }
  ParametricModel model;
  try {
    model.family = family_from_name(config.at("family").get<std::string>());
    model.range = config.at("range").get<double>();
    model.proportion = config.at("proportion").get<double>();
    if (config.contains("tail")) model.tailclass = config["tail"].get<int>();
    if (config.contains("head")) model.headclass = config["head"].get<int>();
    model.validate();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("malformed model config: ") + e.what());
  }

  ManifestWriter manifest("validate", output);
  manifest.params()["model"] = modelfile;
  manifest.params()["maxpoints"] = maxpoints;
  manifest.params()["nrandom"] = nrandom;
  manifest.params()["seed"] = seed;

  auto report = search_violation(model, std::min(maxpoints, 8), {}, nrandom, seed);

  // excursion-set eligibility at the cutoff implied by the model proportion
  const double z = normal_quantile(1.0 - model.proportion);
  std::vector<double> spacings;
  for (int i = 1; i <= 19; ++i) spacings.push_back(model.range * i / 20.0);
  const auto cfgs = build_configurations(std::max(maxpoints, 10), spacings, nrandom, seed + 1,
                                         2.0 * model.range);
  const auto psd = excursion_eligibility(model.family, model.range, z, cfgs);
  report.checks.push_back(psd.checks.back());

  json out_json;
  out_json["model"] = {{"family", family_name(model.family)},
                       {"range", model.range},
                       {"proportion", model.proportion}};
  out_json["cutoff"] = z;
  out_json["verdict"] = report.all_pass() ? "PASS" : "FAIL";
  for (const auto& c : report.checks)
    out_json["checks"].push_back({{"name", c.name},
                                  {"verdict", c.pass ? "pass" : "fail"},
                                  {"margin", c.margin},
                                  {"witness", c.witness}});
  std::ofstream outf(output);
  if (!outf) throw InputError("cannot open output file: " + output);
  outf << out_json.dump(2) << "\n";

  // human-readable table
  std::cout << "model: " << family_name(model.family) << " a=" << model.range
            << " pi=" << model.proportion << "\n";
  std::cout << "check           verdict  margin\n";
  for (const auto& c : report.checks) {
    std::cout.width(16);
    std::cout << std::left << c.name;
    std::cout << (c.pass ? "PASS" : "FAIL") << "     " << c.margin << "\n";
  }
  std::cout << "overall: " << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  manifest.write();
  return 0;
}

int cmd_shape(const std::string& gridfile, int classlabel, int ndirections, int nlags,
              const std::string& output) {
  const auto grid = load_grid_file(gridfile);
  if (classlabel < 1 || classlabel > grid.nclasses) throw InputError("shape: class out of range");
  bool present = false;
  for (int v : grid.labels)
    if (v == classlabel) present = true;
  if (!present) throw InputError("shape: class absent from grid");
  if (ndirections != 2 && ndirections != 4)
    throw InputError("shape: --directions must be 2 (axes) or 4 (axes + diagonals)");
  if (nlags < 1) throw InputError("shape: --nlags must be >= 1");

  ManifestWriter manifest("shape", output);
  manifest.params()["grid"] = gridfile;
  manifest.params()["class"] = classlabel;
  manifest.params()["directions"] = ndirections;
  manifest.params()["nlags"] = nlags;

  const std::vector<std::pair<int, int>> steps4 = {{0, 1}, {1, 1}, {1, 0}, {1, -1}};
  const std::vector<std::pair<int, int>> steps2 = {{0, 1}, {1, 0}};
  const auto& steps = (ndirections == 4) ? steps4 : steps2;

  std::vector<TransitionRate> rates;
  bool fractal = false;
  for (const auto& [dr, dc] : steps) {
    const auto curve = directional_curve(grid, dr, dc, std::max(nlags, 3));
    auto rate = transition_rate(curve, classlabel, nlags);
    rates.push_back(rate);
    // divergence diagnostic over the coarse-to-fine one-sided rates
    std::vector<double> lags, vals;
    for (int l = std::max(nlags, 3) - 1; l >= 0; --l) {
      const auto& s = curve.at(classlabel, classlabel, static_cast<size_t>(l));
      if (!s.defined()) continue;
      lags.push_back(s.lag.distance);
      vals.push_back(s.value());
    }
    if (lags.size() >= 3 && rate_convergence(lags, vals).diverging) fractal = true;
  }

  std::ofstream out(output);
  if (!out) throw InputError("cannot open output file: " + output);
  out.precision(17);
  out << "kind,direction,value\n";
  for (const auto& r : rates) out << "rate," << r.direction << "," << r.rate << "\n";
  if (fractal) {
    out << "fractal_flag,,1\n";
  } else {
    const auto psi_dir = psi_directional(rates);
    out << "psi_directional,," << psi_dir.psi << "\n";
    double mean_rate = 0.0;
    for (const auto& r : rates) mean_rate += r.rate / rates.size();
    TransitionRate iso;
    iso.classlabel = classlabel;
    iso.rate = mean_rate;
    out << "psi_isotropic,," << psi_isotropic(iso).psi << "\n";
  }
  out << "psi_raster_oracle,," << raster_perimeter_area(grid, classlabel).psi << "\n";
  manifest.write();
  return 0;
}

int cmd_simulate(int nrows, int ncols, double cellsize, const std::string& family, double range,
                 const std::vector<double>& thresholds, const std::vector<double>& target_props,
                 std::uint64_t seed, const std::string& output) {
  CorrelogramSpec spec;
  spec.family = correlogram_from_name(family);
  spec.range = range;

  ThresholdSet cutoffs;
  if (!thresholds.empty()) {
    cutoffs.cutoffs = thresholds;
  } else if (!target_props.empty()) {
    cutoffs = ThresholdSet::from_proportions(target_props);
  } else {
    throw InputError("simulate: one of --thresholds, --proportions is required");
  }
  cutoffs.validate();

  ManifestWriter manifest("simulate", output);
  manifest.params()["nrows"] = nrows;
  manifest.params()["ncols"] = ncols;
  manifest.params()["cellsize"] = cellsize;
  manifest.params()["family"] = family;
  manifest.params()["range"] = range;
  manifest.params()["cutoffs"] = cutoffs.cutoffs;
  manifest.params()["seed"] = seed;

  RealField field;
  try {
    field = simulate_grf(nrows, ncols, cellsize, spec, seed);
  } catch (const std::runtime_error& e) {
    throw InfeasibleError(e.what());
  }
  const auto grid = truncate(field, cutoffs);
  std::ofstream out(output);
  if (!out) throw InputError("cannot open output file: " + output);
  save_grid(out, grid);

  // sidecar metadata
  std::ofstream meta(output + ".meta");
  meta << "family " << family << "\n";
  meta << "range " << range << "\n";
  meta << "cellsize " << cellsize << "\n";
  meta << "seed " << seed << "\n";
  meta << "cutoffs";
  for (double z : cutoffs.cutoffs) meta << " " << z;
  meta << "\n";
  const auto implied = cutoffs.implied_proportions();
  meta << "implied_proportions";
  for (double p : implied) meta << " " << p;
  meta << "\n";
  manifest.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transiogram estimation, fitting, validation and interpretation"};
  app.require_subcommand(1);

  int threads = 0;  // 0 = auto; results are independent of this setting
  app.add_option("--threads", threads, "worker threads (0 = auto; does not change results)");

  // scan
  auto* scan = app.add_subcommand("scan", "empirical transiogram scan of a grid");
  std::string scan_grid, scan_output = "curve.csv";
  std::vector<int> scan_lag_opt, scan_dir;
  int scan_maxlag = 10;
  std::string scan_omni;
  scan->add_option("--grid", scan_grid, "grid file")->required();
  scan->add_option("--lag", scan_lag_opt, "single lag: drow dcol")->expected(2);
  scan->add_option("--direction", scan_dir, "unit step: drow dcol")->expected(2);
  scan->add_option("--maxlag", scan_maxlag, "number of lag multiples");
  scan->add_option("--omni", scan_omni, "omnidirectional bin edges, comma separated");
  scan->add_option("--output", scan_output, "output curve CSV");

  // fit
  auto* fit = app.add_subcommand("fit", "non-parametric transiogram fitting");
  std::string fit_curve, fit_kernel = "epanechnikov", fit_output = "fitted.csv";
  double fit_bandwidth = 0.0;
  std::string fit_lscv, fit_hgrid;
  bool fit_two_nearest = false;
  fit->add_option("--curve", fit_curve, "input curve CSV")->required();
  fit->add_option("--kernel", fit_kernel, "epanechnikov|gaussian|biweight|triangular");
  fit->add_option("--bandwidth", fit_bandwidth, "kernel bandwidth (map units)");
  fit->add_option("--lscv", fit_lscv, "candidate bandwidths for cross-validation");
  fit->add_flag("--two-nearest", fit_two_nearest, "triangular 2-NN mode (piecewise linear)");
  fit->add_option("--hgrid", fit_hgrid, "output lag grid, comma separated")->required();
  fit->add_option("--output", fit_output, "output fitted CSV");

  // validate
  auto* validate = app.add_subcommand("validate", "audit a parametric model");
  std::string val_model, val_output = "report.json";
  int val_maxpoints = 8, val_nrandom = 1000;
  std::uint64_t val_seed = 1;
  validate->add_option("--model", val_model, "model config JSON")->required();
  validate->add_option("--maxpoints", val_maxpoints, "max points per configuration");
  validate->add_option("--nrandom", val_nrandom, "number of random configurations");
  validate->add_option("--seed", val_seed, "search seed");
  validate->add_option("--output", val_output, "report JSON path");

  // shape
  auto* shape = app.add_subcommand("shape", "transition rates and perimeter-to-area ratio");
  std::string shape_grid, shape_output = "shape.csv";
  int shape_class = 1, shape_dirs = 4, shape_nlags = 1;
  shape->add_option("--grid", shape_grid, "grid file")->required();
  shape->add_option("--class", shape_class, "class label")->required();
  shape->add_option("--directions", shape_dirs, "2 (axes) or 4 (axes + diagonals)");
  shape->add_option("--nlags", shape_nlags, "lags per rate estimate");
  shape->add_option("--output", shape_output, "output metrics CSV");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "truncated Gaussian random field");
  int sim_nrows = 64, sim_ncols = 64;
  double sim_cellsize = 1.0, sim_range = 10.0;
  std::string sim_family = "exponential", sim_thresholds, sim_props, sim_output = "sim.grid";
  std::uint64_t sim_seed = 1;
  simulate->add_option("--nrows", sim_nrows, "rows")->required();
  simulate->add_option("--ncols", sim_ncols, "columns")->required();
  simulate->add_option("--cellsize", sim_cellsize, "map units per cell");
  simulate->add_option("--family", sim_family, "latent correlogram family");
  simulate->add_option("--range", sim_range, "correlogram range (map units)");
  simulate->add_option("--thresholds", sim_thresholds, "cutoffs, comma separated");
  simulate->add_option("--proportions", sim_props, "target proportions, comma separated");
  simulate->add_option("--seed", sim_seed, "simulation seed");
  simulate->add_option("--output", sim_output, "output grid file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (scan->parsed()) {
      std::optional<std::pair<int, int>> lag, dir;
      if (!scan_lag_opt.empty()) lag = {scan_lag_opt[0], scan_lag_opt[1]};
      if (!scan_dir.empty()) dir = {scan_dir[0], scan_dir[1]};
      return cmd_scan(scan_grid, lag, dir, scan_maxlag, parse_doubles(scan_omni), scan_output);
    }
    if (fit->parsed())
      return cmd_fit(fit_curve, fit_kernel, fit_bandwidth, parse_doubles(fit_lscv),
                     fit_two_nearest, parse_doubles(fit_hgrid), fit_output);
    if (validate->parsed())
      return cmd_validate(val_model, val_maxpoints, val_nrandom, val_seed, val_output);
    if (shape->parsed()) return cmd_shape(shape_grid, shape_class, shape_dirs, shape_nlags, shape_output);
    if (simulate->parsed())
      return cmd_simulate(sim_nrows, sim_ncols, sim_cellsize, sim_family, sim_range,
                          parse_doubles(sim_thresholds), parse_doubles(sim_props), sim_seed,
                          sim_output);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
