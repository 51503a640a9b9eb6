#include "ccn/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "ccn/errors.hpp"

namespace ccn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::vector<std::size_t>> input_coordinates_of(const CellGraph& g) {
  std::vector<std::vector<std::size_t>> coords(g.size());
  for (CellIndex i = 0; i < g.size(); ++i) {
    for (CellIndex j : g.inputs(i)) {
      for (std::size_t c = 0; c < g.dim(j); ++c) coords[i].push_back(g.offset(j) + c);
    }
  }
  return coords;
}

double wrap_unit(double v) { return v - std::floor(v); }

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      hash_ ^= p[k];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t digest() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TrigPolyField::TrigPolyField(CellGraph graph, std::vector<std::vector<ComponentTerms>> cells, int degree)
    : graph_(std::move(graph)), cells_(std::move(cells)), degree_(degree) {
  if (degree_ < 0) throw DomainError("field degree must be non-negative");
  if (cells_.size() != graph_.size()) {
    throw DomainError("field has " + std::to_string(cells_.size()) + " cell blocks for a graph of " +
                      std::to_string(graph_.size()) + " cells");
  }
  input_coords_ = input_coordinates_of(graph_);
  for (CellIndex i = 0; i < graph_.size(); ++i) {
    const std::string where = "cell " + std::to_string(i + 1);
    if (cells_[i].size() != graph_.dim(i)) {
      throw DomainError(where + " has " + std::to_string(cells_[i].size()) + " output components, expected " +
                        std::to_string(graph_.dim(i)));
    }
    const std::size_t n_inputs = input_coords_[i].size();
    for (const ComponentTerms& terms : cells_[i]) {
      for (const FourierTerm& t : terms) {
        if (t.k.size() != n_inputs) {
          throw DomainError(where + ": wave vector of length " + std::to_string(t.k.size()) +
                            " but the cell reads " + std::to_string(n_inputs) + " input coordinates");
        }
        for (int kc : t.k) {
          if (std::abs(kc) > degree_) {
            throw DomainError(where + ": wave number " + std::to_string(kc) + " exceeds degree " +
                              std::to_string(degree_));
          }
        }
        if (!std::isfinite(t.a) || !std::isfinite(t.b)) throw DomainError(where + ": non-finite coefficient");
      }
    }
  }
}

const ComponentTerms& TrigPolyField::terms(CellIndex i, std::size_t component) const {
  graph_.check_index(i);
  if (component >= cells_[i].size()) throw DomainError("component index out of range");
  return cells_[i][component];
}

void TrigPolyField::check_point(const Point& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) {
    throw DomainError("point has dimension " + std::to_string(x.size()) + ", field expects " +
                      std::to_string(dimension()));
  }
}

void TrigPolyField::accumulate(const Point& x, Point& value, JacobianMatrix* jac) const {
  check_point(x);
  const auto d = static_cast<Eigen::Index>(dimension());
  value = Point::Zero(d);
  if (jac) *jac = JacobianMatrix::Zero(d, d);
  // e^{2 pi i k u_c} for k in [-m, m], stored at c * width + m + k.
  const auto m = static_cast<std::size_t>(degree_);
  const std::size_t width = 2 * m + 1;
  std::vector<std::complex<double>> powers;
  for (CellIndex i = 0; i < graph_.size(); ++i) {
    const auto& coords = input_coords_[i];
    powers.resize(coords.size() * width);
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const double theta = kTwoPi * wrap_unit(x[static_cast<Eigen::Index>(coords[c])]);
      std::complex<double>* row = powers.data() + c * width + m;
      row[0] = 1.0;
      for (std::size_t k = 1; k <= m; ++k) {
        const double phase = static_cast<double>(k) * theta;
        row[k] = {std::cos(phase), std::sin(phase)};
        row[-static_cast<std::ptrdiff_t>(k)] = std::conj(row[k]);
      }
    }
    const std::size_t row0 = graph_.offset(i);
    for (std::size_t r = 0; r < cells_[i].size(); ++r) {
      const auto row = static_cast<Eigen::Index>(row0 + r);
      double acc = 0.0;
      for (const FourierTerm& t : cells_[i][r]) {
        std::complex<double> z = 1.0;
        for (std::size_t c = 0; c < coords.size(); ++c) {
          if (t.k[c] != 0) z *= powers[c * width + static_cast<std::size_t>(t.k[c] + degree_)];
        }
        acc += t.a * z.real() + t.b * z.imag();
        if (!jac) continue;
        const double slope = kTwoPi * (t.b * z.real() - t.a * z.imag());
        for (std::size_t c = 0; c < coords.size(); ++c) {
          if (t.k[c] != 0) (*jac)(row, static_cast<Eigen::Index>(coords[c])) += t.k[c] * slope;
        }
      }
      value[row] = acc;
    }
  }
}

Point TrigPolyField::evaluate(const Point& x) const {
  Point value;
  accumulate(x, value, nullptr);
  return value;
}

void TrigPolyField::evaluate_with_jacobian(const Point& x, Point& value, JacobianMatrix& jac) const {
  accumulate(x, value, &jac);
}

JacobianMatrix TrigPolyField::jacobian(const Point& x) const {
  Point value;
  JacobianMatrix jac;
  evaluate_with_jacobian(x, value, jac);
  return jac;
}

std::string TrigPolyField::fingerprint() const {
  Fnv1a h;
  for (std::size_t d : graph_.dims()) h.value(static_cast<std::uint64_t>(d));
  for (const Arrow& a : graph_.arrows()) {
    h.value(static_cast<std::uint64_t>(a.from));
    h.value(static_cast<std::uint64_t>(a.to));
  }
  h.value(static_cast<std::int64_t>(degree_));
  for (const auto& cell : cells_) {
    for (const auto& terms : cell) {
      h.value(static_cast<std::uint64_t>(terms.size()));
      for (const FourierTerm& t : terms) {
        for (int kc : t.k) h.value(static_cast<std::int32_t>(kc));
        h.value(std::bit_cast<std::uint64_t>(t.a));
        h.value(std::bit_cast<std::uint64_t>(t.b));
      }
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h.digest();
  return os.str();
}

FieldBuilder::FieldBuilder(CellGraph graph) : graph_(std::move(graph)) {
  cells_.resize(graph_.size());
  for (CellIndex i = 0; i < graph_.size(); ++i) cells_[i].resize(graph_.dim(i));
}

FieldBuilder& FieldBuilder::add(CellIndex cell, std::vector<Mode> modes, double a, double b, std::size_t component) {
  graph_.check_index(cell);
  if (component >= graph_.dim(cell)) throw DomainError("component index out of range");
  std::size_t n_inputs = 0;
  for (CellIndex j : graph_.inputs(cell)) n_inputs += graph_.dim(j);
  std::vector<int> k(n_inputs, 0);
  for (const Mode& m : modes) {
    if (!graph_.has_arrow(m.cell, cell)) {
      throw DomainError("cell " + std::to_string(m.cell + 1) + " is not a direct input of cell " +
                        std::to_string(cell + 1));
    }
    if (m.coord >= graph_.dim(m.cell)) throw DomainError("input coordinate out of range");
    std::size_t pos = 0;
    for (CellIndex j : graph_.inputs(cell)) {
      if (j == m.cell) break;
      pos += graph_.dim(j);
    }
    k[pos + m.coord] += m.k;
  }
  ComponentTerms& terms = cells_[cell][component];
  auto it = std::find_if(terms.begin(), terms.end(), [&](const FourierTerm& t) { return t.k == k; });
  if (it == terms.end()) {
    terms.push_back({std::move(k), a, b});
  } else {
    it->a += a;
    it->b += b;
  }
  return *this;
}

FieldBuilder& FieldBuilder::add_constant(CellIndex cell, double value, std::size_t component) {
  return add(cell, {}, value, 0.0, component);
}

TrigPolyField FieldBuilder::build(int degree) const {
  if (degree <= 0) {
    degree = 1;
    for (const auto& cell : cells_)
      for (const auto& terms : cell)
        for (const auto& t : terms)
          for (int kc : t.k) degree = std::max(degree, std::abs(kc));
  }
  return TrigPolyField(graph_, cells_, degree);
}

std::vector<std::vector<int>> canonical_wave_vectors(std::size_t n, int degree) {
  if (degree < 0) throw DomainError("degree must be non-negative");
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, -degree);
  while (true) {
    auto first = std::find_if(k.begin(), k.end(), [](int v) { return v != 0; });
    if (first == k.end() || *first > 0) out.push_back(k);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (k[pos] < degree) {
        ++k[pos];
        break;
      }
      k[pos] = -degree;
      if (pos == 0) return out;
    }
    if (n == 0) return out;
  }
}

TrigPolyField sample_random(const CellGraph& g, int degree, double sigma, std::uint64_t seed) {
  if (degree < 1) throw DomainError("sampling degree must be at least 1");
  if (!(sigma > 0.0)) throw DomainError("sampling amplitude must be positive");
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<ComponentTerms>> cells(g.size());
  for (CellIndex i = 0; i < g.size(); ++i) {
    std::size_t n_inputs = 0;
    for (CellIndex j : g.inputs(i)) n_inputs += g.dim(j);
    const auto waves = canonical_wave_vectors(n_inputs, degree);
    cells[i].resize(g.dim(i));
    for (ComponentTerms& terms : cells[i]) {
      terms.reserve(waves.size());
      for (const auto& k : waves) {
        double norm2 = 0.0;
        for (int kc : k) norm2 += double(kc) * kc;
        const double scale = sigma / std::pow(1.0 + std::sqrt(norm2), 2);
        const bool zero = norm2 == 0.0;
        const double a = scale * normal(rng);
        const double b = zero ? 0.0 : scale * normal(rng);
        terms.push_back({k, a, b});
      }
    }
  }
  return TrigPolyField(g, std::move(cells), degree);
}

TrigPolyField counterexample_two_cell() {
  CellGraph g({1, 1}, {{1, 0}, {0, 1}});
  return FieldBuilder(g).add(0, {{1, 1}}, 0.0, 1.0).add(1, {{0, 1}}, 0.0, 1.0).build(1);
}

TrigPolyField restrict_field(const TrigPolyField& f, const CellSet& I) {
  CellGraph sub = restrict_to(f.graph(), I);
  // Inputs of a closed set stay inside it and keep their relative order, so
  // every wave vector carries over unchanged.
  std::vector<std::vector<ComponentTerms>> cells;
  for (CellIndex i : I.members()) {
    std::vector<ComponentTerms> block;
    for (std::size_t r = 0; r < f.graph().dim(i); ++r) block.push_back(f.terms(i, r));
    cells.push_back(std::move(block));
  }
  return TrigPolyField(std::move(sub), std::move(cells), f.degree());
}

TrigPolyField embed_field(const TrigPolyField& f, const CellGraph& supergraph) {
  const CellGraph& g = f.graph();
  if (!std::equal(g.dims().begin(), g.dims().end(), supergraph.dims().begin(), supergraph.dims().end())) {
    throw DomainError("embedding requires identical cell dimensions");
  }
  for (const Arrow& a : g.arrows()) {
    if (!supergraph.has_arrow(a.from, a.to)) throw DomainError("supergraph lacks an arrow of the field's graph");
  }
  const auto old_coords = input_coordinates_of(g);
  const auto new_coords = input_coordinates_of(supergraph);
  std::vector<std::vector<ComponentTerms>> cells(g.size());
  for (CellIndex i = 0; i < g.size(); ++i) {
    std::vector<std::size_t> position(old_coords[i].size());
    for (std::size_t c = 0; c < old_coords[i].size(); ++c) {
      position[c] = static_cast<std::size_t>(
          std::find(new_coords[i].begin(), new_coords[i].end(), old_coords[i][c]) - new_coords[i].begin());
    }
    for (std::size_t r = 0; r < g.dim(i); ++r) {
      ComponentTerms terms;
      for (const FourierTerm& t : f.terms(i, r)) {
        std::vector<int> k(new_coords[i].size(), 0);
        for (std::size_t c = 0; c < t.k.size(); ++c) k[position[c]] = t.k[c];
        terms.push_back({std::move(k), t.a, t.b});
      }
      cells[i].push_back(std::move(terms));
    }
  }
  return TrigPolyField(supergraph, std::move(cells), f.degree());
}

Point project(const CellGraph& g, const Point& x, const CellSet& I) {
  if (static_cast<std::size_t>(x.size()) != g.total_dimension()) throw DomainError("point dimension mismatch");
  Point out(static_cast<Eigen::Index>(I.dim_total()));
  Eigen::Index pos = 0;
  for (CellIndex i : I.members()) {
    const auto d = static_cast<Eigen::Index>(g.dim(i));
    out.segment(pos, d) = x.segment(static_cast<Eigen::Index>(g.offset(i)), d);
    pos += d;
  }
  return out;
}

}  // namespace ccn
