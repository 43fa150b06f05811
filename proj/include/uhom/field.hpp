#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace uhom {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

//! Axis-aligned box in R^N, N in {1, 2}. Unused trailing coordinates are ignored.
struct Box {
  int dim = 1;
  Point lower{0.0, 0.0};
  Point upper{1.0, 1.0};

  static Box unit(int dim);
  static Box cube(int dim, double lo, double hi);

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
  //! Throws ContractError unless dim in {1,2} and lower < upper componentwise.
  void validate() const;
};

/// Regular partition of a box into resolution[i] cells per axis.
class Grid {
 public:
  Grid() = default;
  Grid(Box box, Index resolution);
  static Grid uniform(const Box& box, int resolution);

  int dim() const { return box_.dim; }
  const Box& box() const { return box_; }
  int resolution(int axis) const { return resolution_[axis]; }
  const Index& resolution() const { return resolution_; }
  double spacing(int axis) const { return spacing_[axis]; }

  std::size_t cell_count() const;
  double cell_volume() const;
  Point cell_center(const Index& cell) const;
  Point node(const Index& node) const;

  bool operator==(const Grid& other) const;

 private:
  Box box_{};
  Index resolution_{1, 1};
  Point spacing_{1.0, 1.0};
};

enum class Boundary { ZeroBoundary, Periodic, Free };
enum class Centering { Node, Cell };

const char* to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

/*!
 * Values of a d-component function on a grid, stored node- or cell-centred.
 *
 * Storage is row-major over the point index (axis 0 slowest) with the
 * component index innermost. Node fields carry resolution+1 points per axis,
 * except periodic ones which drop the duplicate last node. Cell fields carry
 * resolution points per axis.
 */
class GridField {
 public:
  GridField() = default;
  GridField(Grid grid, int components, Boundary bc, Centering centering,
            std::vector<double> values);
  static GridField zeros(const Grid& grid, int components, Boundary bc, Centering centering);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  int components() const { return components_; }
  Boundary boundary() const { return bc_; }
  Centering centering() const { return centering_; }

  //! Points per axis for this centring/bc combination.
  int extent(int axis) const;
  std::size_t point_count() const;
  std::size_t index(const Index& point) const;
  Index unravel(std::size_t point) const;
  Point position(std::size_t point) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double at(std::size_t point, int component = 0) const {
    return values_[point * components_ + component];
  }
  double& at(std::size_t point, int component = 0) {
    return values_[point * components_ + component];
  }

  //! True when the point lies on the outer boundary of the box (node fields only).
  bool on_boundary(const Index& point) const;

 private:
  Grid grid_{};
  int components_ = 1;
  Boundary bc_ = Boundary::Free;
  Centering centering_ = Centering::Node;
  std::vector<double> values_;
};

using ScalarMap = std::function<double(const Point&)>;
using VectorMap = std::function<std::vector<double>(const Point&)>;

//! Nodal sampling of a scalar map; zero-boundary fields get exact zeros on the boundary.
GridField sample(const ScalarMap& fn, const Grid& grid, Boundary bc);
GridField sample_vector(const VectorMap& fn, int components, const Grid& grid, Boundary bc);
//! Cell-centred sampling (values at cell centres).
GridField sample_cells(const ScalarMap& fn, const Grid& grid);
GridField sample_cells_vector(const VectorMap& fn, int components, const Grid& grid);

/*!
 * Forward-difference gradient of a node field, one value per cell.
 *
 * Cell (i, j) carries (u(node + e_k) - u(node)) / h_k evaluated at node (i, j),
 * wrapped across the box for periodic fields. Output components are laid out
 * as c * N + k for field component c and direction k.
 */
GridField gradient(const GridField& u);

//! Cell-centre values: identity for cell fields, multilinear average of corners for nodes.
GridField center_values(const GridField& u);

//! Midpoint rule over the box for one component.
double integrate(const GridField& u, int component = 0);

//! Pointwise Euclidean norm over components at cell centres.
std::vector<double> magnitudes(const GridField& u);

GridField scaled(const GridField& u, double factor);
GridField sum(const GridField& u, const GridField& v);

void write_csv(const GridField& u, std::ostream& os);
void write_binary(const GridField& u, std::ostream& os);

}  // namespace uhom
