#ifndef TRANSIO_GRID_HPP
#define TRANSIO_GRID_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace transio {

/// 2D lattice of class labels 1..K, row-major, with a square cell size in
/// map units. Immutable after construction.
struct CategoricalGrid {
  int nrows = 0;
  int ncols = 0;
  double cellsize = 1.0;
  int nclasses = 0;
  std::vector<int> labels;  // row-major, values in 1..nclasses

  int label(int r, int c) const { return labels[static_cast<size_t>(r) * ncols + c]; }
  bool inside(int r, int c) const { return r >= 0 && r < nrows && c >= 0 && c < ncols; }
  long ncells() const { return static_cast<long>(nrows) * ncols; }

  void validate() const {
    if (nrows <= 0 || ncols <= 0) throw std::invalid_argument("grid: dimensions must be positive");
    if (nclasses < 2) throw std::invalid_argument("grid: nclasses must be >= 2");
    if (!(cellsize > 0.0)) throw std::invalid_argument("grid: cellsize must be positive");
    if (labels.size() != static_cast<size_t>(ncells()))
      throw std::invalid_argument("grid: label count does not match dimensions");
    for (int v : labels)
      if (v < 1 || v > nclasses) throw std::invalid_argument("grid: label out of range");
  }
};

/// Binary view of one class: values[i] = 1 iff labels[i] = classlabel.
struct IndicatorField {
  int nrows = 0;
  int ncols = 0;
  int classlabel = 0;
  std::vector<std::uint8_t> values;
};

/// Integer cell offset with its Euclidean distance (map units) and angle.
struct LagVector {
  int drow = 0;
  int dcol = 0;
  double distance = 0.0;
  double direction = 0.0;  // angle in [0, 2pi), measured from +col axis toward +row

  static LagVector from_offsets(int drow, int dcol, double cellsize) {
    LagVector h;
    h.drow = drow;
    h.dcol = dcol;
    h.distance = cellsize * std::sqrt(double(drow) * drow + double(dcol) * dcol);
    h.direction = (drow == 0 && dcol == 0) ? 0.0 : std::atan2(double(drow), double(dcol));
    if (h.direction < 0.0) h.direction += 2.0 * M_PI;
    return h;
  }
};

namespace detail {
inline std::string expect_header_line(std::istream& in, const std::string& key, int lineno) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("grid file: unexpected end of stream at line " + std::to_string(lineno));
  std::istringstream ls(line);
  std::string k, v, extra;
  if (!(ls >> k >> v) || k != key || (ls >> extra))
    throw std::runtime_error("grid file: line " + std::to_string(lineno) + ": expected '" + key + " <value>'");
  return v;
}
}  // namespace detail

/// Parses the plain-text grid format: four header lines (nrows, ncols,
/// cellsize, nclasses) then nrows rows of ncols labels. Rejects trailing
/// garbage and reports errors with line numbers.
inline CategoricalGrid load_grid(std::istream& in) {
  CategoricalGrid g;
  try {
    g.nrows = std::stoi(detail::expect_header_line(in, "nrows", 1));
    g.ncols = std::stoi(detail::expect_header_line(in, "ncols", 2));
    g.cellsize = std::stod(detail::expect_header_line(in, "cellsize", 3));
    g.nclasses = std::stoi(detail::expect_header_line(in, "nclasses", 4));
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("grid file: malformed header value");
  }
  if (g.nrows <= 0 || g.ncols <= 0) throw std::runtime_error("grid file: non-positive dimensions in header");
  if (g.nclasses < 2) throw std::runtime_error("grid file: nclasses must be >= 2");
  if (!(g.cellsize > 0.0)) throw std::runtime_error("grid file: cellsize must be positive");

  g.labels.reserve(static_cast<size_t>(g.ncells()));
  std::string line;
  for (int r = 0; r < g.nrows; ++r) {
    const int lineno = 5 + r;
    if (!std::getline(in, line))
      throw std::runtime_error("grid file: line " + std::to_string(lineno) + ": missing data row");
    std::istringstream ls(line);
    int v = 0;
    for (int c = 0; c < g.ncols; ++c) {
      if (!(ls >> v))
        throw std::runtime_error("grid file: line " + std::to_string(lineno) + ": row length mismatch");
      if (v < 1 || v > g.nclasses)
        throw std::runtime_error("grid file: line " + std::to_string(lineno) + ": label out of range");
      g.labels.push_back(v);
    }
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error("grid file: line " + std::to_string(lineno) + ": row length mismatch");
  }
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string extra;
    if (ls >> extra) throw std::runtime_error("grid file: trailing garbage after data rows");
  }
  g.validate();
  return g;
}

inline void save_grid(std::ostream& out, const CategoricalGrid& g) {
  out.precision(17);
  out << "nrows " << g.nrows << "\n";
  out << "ncols " << g.ncols << "\n";
  out << "cellsize " << g.cellsize << "\n";
  out << "nclasses " << g.nclasses << "\n";
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) {
      if (c) out << ' ';
      out << g.label(r, c);
    }
    out << "\n";
  }
}

inline IndicatorField indicator(const CategoricalGrid& g, int k) {
  if (k < 1 || k > g.nclasses) throw std::invalid_argument("indicator: class label out of range");
  IndicatorField f;
  f.nrows = g.nrows;
  f.ncols = g.ncols;
  f.classlabel = k;
  f.values.resize(g.labels.size());
  for (size_t i = 0; i < g.labels.size(); ++i) f.values[i] = (g.labels[i] == k) ? 1 : 0;
  return f;
}

inline std::vector<double> proportions(const CategoricalGrid& g) {
  std::vector<long> counts(static_cast<size_t>(g.nclasses), 0);
  for (int v : g.labels) counts[static_cast<size_t>(v - 1)]++;
  std::vector<double> p(counts.size());
  const double total = static_cast<double>(g.ncells());
  for (size_t k = 0; k < counts.size(); ++k) p[k] = counts[k] / total;
  return p;
}

}  // namespace transio

#endif
