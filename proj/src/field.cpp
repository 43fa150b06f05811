#include "uhom/field.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "uhom/errors.hpp"

namespace uhom {

Box Box::unit(int dim) { return cube(dim, 0.0, 1.0); }

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.dim = dim;
  b.lower = {lo, lo};
  b.upper = {hi, hi};
  b.validate();
  return b;
}

double Box::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= extent(k);
  return v;
}

void Box::validate() const {
  if (dim < 1 || dim > kMaxDim) {
    throw ContractError("box dimension must be 1 or 2, got " + std::to_string(dim));
  }
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || !(lower[k] < upper[k])) {
      throw ContractError("box requires finite lower < upper on every axis");
    }
  }
}

Grid::Grid(Box box, Index resolution) : box_(box), resolution_(resolution) {
  box_.validate();
  for (int k = 0; k < kMaxDim; ++k) {
    if (k >= box_.dim) {
      resolution_[k] = 1;
      spacing_[k] = 1.0;
      continue;
    }
    if (resolution_[k] < 1) throw ContractError("grid resolution must be positive");
    spacing_[k] = box_.extent(k) / resolution_[k];
  }
}

Grid Grid::uniform(const Box& box, int resolution) { return Grid(box, {resolution, resolution}); }

std::size_t Grid::cell_count() const {
  std::size_t n = 1;
  for (int k = 0; k < dim(); ++k) n *= static_cast<std::size_t>(resolution_[k]);
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= spacing_[k];
  return v;
}

Point Grid::cell_center(const Index& cell) const {
  Point p{0.0, 0.0};
  for (int k = 0; k < dim(); ++k) p[k] = box_.lower[k] + (cell[k] + 0.5) * spacing_[k];
  return p;
}

Point Grid::node(const Index& node) const {
  Point p{0.0, 0.0};
  for (int k = 0; k < dim(); ++k) p[k] = box_.lower[k] + node[k] * spacing_[k];
  return p;
}

bool Grid::operator==(const Grid& other) const {
  if (dim() != other.dim()) return false;
  for (int k = 0; k < dim(); ++k) {
    if (resolution_[k] != other.resolution_[k] || box_.lower[k] != other.box_.lower[k] ||
        box_.upper[k] != other.box_.upper[k]) {
      return false;
    }
  }
  return true;
}

const char* to_string(Boundary bc) {
  switch (bc) {
    case Boundary::ZeroBoundary: return "zero";
    case Boundary::Periodic: return "periodic";
    case Boundary::Free: return "free";
  }
  return "free";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "zero" || name == "zero-boundary") return Boundary::ZeroBoundary;
  if (name == "periodic") return Boundary::Periodic;
  if (name == "free") return Boundary::Free;
  throw ContractError("unknown boundary tag '" + name + "'");
}

GridField::GridField(Grid grid, int components, Boundary bc, Centering centering,
                     std::vector<double> values)
    : grid_(std::move(grid)), components_(components), bc_(bc), centering_(centering),
      values_(std::move(values)) {
  if (components_ < 1 || components_ > kMaxDim * kMaxDim) {
    throw ContractError("field component count out of range");
  }
  if (values_.size() != point_count() * static_cast<std::size_t>(components_)) {
    throw ContractError("field value array has length " + std::to_string(values_.size()) +
                        ", expected " + std::to_string(point_count() * components_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("field contains non-finite values");
  }
  if (bc_ == Boundary::ZeroBoundary && centering_ == Centering::Node) {
    for (std::size_t p = 0; p < point_count(); ++p) {
      if (!on_boundary(unravel(p))) continue;
      for (int c = 0; c < components_; ++c) {
        if (at(p, c) != 0.0) throw ContractError("zero-boundary field is nonzero on the boundary");
      }
    }
  }
}

GridField GridField::zeros(const Grid& grid, int components, Boundary bc, Centering centering) {
  GridField f;
  f.grid_ = grid;
  f.components_ = components;
  f.bc_ = bc;
  f.centering_ = centering;
  f.values_.assign(f.point_count() * components, 0.0);
  return f;
}

int GridField::extent(int axis) const {
  if (axis >= dim()) return 1;
  const int n = grid_.resolution(axis);
  if (centering_ == Centering::Cell || bc_ == Boundary::Periodic) return n;
  return n + 1;
}

std::size_t GridField::point_count() const {
  std::size_t n = 1;
  for (int k = 0; k < dim(); ++k) n *= static_cast<std::size_t>(extent(k));
  return n;
}

std::size_t GridField::index(const Index& point) const {
  if (dim() == 1) return static_cast<std::size_t>(point[0]);
  return static_cast<std::size_t>(point[0]) * extent(1) + point[1];
}

Index GridField::unravel(std::size_t point) const {
  if (dim() == 1) return {static_cast<int>(point), 0};
  const auto n1 = static_cast<std::size_t>(extent(1));
  return {static_cast<int>(point / n1), static_cast<int>(point % n1)};
}

Point GridField::position(std::size_t point) const {
  const Index idx = unravel(point);
  return centering_ == Centering::Cell ? grid_.cell_center(idx) : grid_.node(idx);
}

bool GridField::on_boundary(const Index& point) const {
  if (centering_ == Centering::Cell || bc_ == Boundary::Periodic) return false;
  for (int k = 0; k < dim(); ++k) {
    if (point[k] == 0 || point[k] == grid_.resolution(k)) return true;
  }
  return false;
}

GridField sample(const ScalarMap& fn, const Grid& grid, Boundary bc) {
  return sample_vector([&](const Point& x) { return std::vector<double>{fn(x)}; }, 1, grid, bc);
}

GridField sample_vector(const VectorMap& fn, int components, const Grid& grid, Boundary bc) {
  GridField f = GridField::zeros(grid, components, bc, Centering::Node);
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    const Index idx = f.unravel(p);
    if (bc == Boundary::ZeroBoundary && f.on_boundary(idx)) continue;
    const std::vector<double> v = fn(grid.node(idx));
    if (static_cast<int>(v.size()) != components) {
      throw ContractError("sampled map returned the wrong number of components");
    }
    for (int c = 0; c < components; ++c) {
      if (!std::isfinite(v[c])) throw DataError("sampled map returned a non-finite value");
      f.at(p, c) = v[c];
    }
  }
  return f;
}

GridField sample_cells(const ScalarMap& fn, const Grid& grid) {
  return sample_cells_vector([&](const Point& x) { return std::vector<double>{fn(x)}; }, 1, grid);
}

GridField sample_cells_vector(const VectorMap& fn, int components, const Grid& grid) {
  GridField f = GridField::zeros(grid, components, Boundary::Free, Centering::Cell);
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    const std::vector<double> v = fn(grid.cell_center(f.unravel(p)));
    if (static_cast<int>(v.size()) != components) {
      throw ContractError("sampled map returned the wrong number of components");
    }
    for (int c = 0; c < components; ++c) {
      if (!std::isfinite(v[c])) throw DataError("sampled map returned a non-finite value");
      f.at(p, c) = v[c];
    }
  }
  return f;
}

namespace {

// Node index of `cell + e_axis`, wrapping for periodic fields.
Index shifted(const GridField& u, Index node, int axis) {
  node[axis] += 1;
  if (u.boundary() == Boundary::Periodic && node[axis] == u.extent(axis)) node[axis] = 0;
  return node;
}

}  // namespace

GridField gradient(const GridField& u) {
  if (u.centering() != Centering::Node) {
    throw ContractError("gradient needs a node field; cell data carries no neighbour nodes");
  }
  const int n_dim = u.dim();
  const Grid& grid = u.grid();
  for (int k = 0; k < n_dim; ++k) {
    if (grid.resolution(k) < 2) throw ContractError("gradient needs resolution >= 2 per axis");
  }
  const int d = u.components();
  GridField g = GridField::zeros(grid, d * n_dim, Boundary::Free, Centering::Cell);
  for (std::size_t cell = 0; cell < g.point_count(); ++cell) {
    const Index idx = g.unravel(cell);
    const std::size_t base = u.index(idx);
    for (int k = 0; k < n_dim; ++k) {
      const std::size_t next = u.index(shifted(u, idx, k));
      const double inv_h = 1.0 / grid.spacing(k);
      for (int c = 0; c < d; ++c) {
        g.at(cell, c * n_dim + k) = (u.at(next, c) - u.at(base, c)) * inv_h;
      }
    }
  }
  return g;
}

GridField center_values(const GridField& u) {
  if (u.centering() == Centering::Cell) return u;
  const Grid& grid = u.grid();
  const int d = u.components();
  GridField out = GridField::zeros(grid, d, Boundary::Free, Centering::Cell);
  for (std::size_t cell = 0; cell < out.point_count(); ++cell) {
    const Index idx = out.unravel(cell);
    if (u.dim() == 1) {
      const std::size_t a = u.index(idx);
      const std::size_t b = u.index(shifted(u, idx, 0));
      for (int c = 0; c < d; ++c) out.at(cell, c) = 0.5 * (u.at(a, c) + u.at(b, c));
    } else {
      const Index i10 = shifted(u, idx, 0);
      const Index i01 = shifted(u, idx, 1);
      const Index i11 = shifted(u, i10, 1);
      const std::size_t p00 = u.index(idx), p10 = u.index(i10), p01 = u.index(i01),
                        p11 = u.index(i11);
      for (int c = 0; c < d; ++c) {
        out.at(cell, c) = 0.25 * (u.at(p00, c) + u.at(p10, c) + u.at(p01, c) + u.at(p11, c));
      }
    }
  }
  return out;
}

double integrate(const GridField& u, int component) {
  if (component < 0 || component >= u.components()) {
    throw ContractError("integrate: component index out of range");
  }
  const GridField centers = center_values(u);
  double s = 0.0;
  for (std::size_t p = 0; p < centers.point_count(); ++p) s += centers.at(p, component);
  return s * u.grid().cell_volume();
}

std::vector<double> magnitudes(const GridField& u) {
  const GridField centers = center_values(u);
  std::vector<double> out(centers.point_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    double s = 0.0;
    for (int c = 0; c < centers.components(); ++c) s += centers.at(p, c) * centers.at(p, c);
    out[p] = std::sqrt(s);
  }
  return out;
}

GridField scaled(const GridField& u, double factor) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x *= factor;
  return GridField(u.grid(), u.components(), u.boundary(), u.centering(), std::move(v));
}

GridField sum(const GridField& u, const GridField& v) {
  if (!(u.grid() == v.grid()) || u.components() != v.components() ||
      u.centering() != v.centering() || u.boundary() != v.boundary()) {
    throw ContractError("sum: fields live on different layouts");
  }
  std::vector<double> out(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v.values()[i];
  return GridField(u.grid(), u.components(), u.boundary(), u.centering(), std::move(out));
}

void write_csv(const GridField& u, std::ostream& os) {
  os << "x";
  if (u.dim() == 2) os << ",y";
  for (int c = 0; c < u.components(); ++c) os << ",c" << c;
  os << '\n';
  os.precision(17);
  for (std::size_t p = 0; p < u.point_count(); ++p) {
    const Point x = u.position(p);
    os << x[0];
    if (u.dim() == 2) os << ',' << x[1];
    for (int c = 0; c < u.components(); ++c) os << ',' << u.at(p, c);
    os << '\n';
  }
}

void write_binary(const GridField& u, std::ostream& os) {
  const auto v = u.values();
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace uhom
