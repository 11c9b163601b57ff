#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cmfrac {

// Nodal values of a piecewise-linear function on a SpaceGrid.
struct Field {
  std::vector<double> values;
};

// m x m nodes on [0,1]^2, each cell split into two right triangles along the
// (i,j)-(i+1,j+1) diagonal. Interior nodes carry the unknowns.
class SpaceGrid {
 public:
  explicit SpaceGrid(std::size_t m);

  std::size_t m() const { return m_; }
  double spacing() const { return dx_; }
  std::size_t num_nodes() const { return m_ * m_; }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_dofs() const { return node_of_dof_.size(); }

  std::size_t node(std::size_t i, std::size_t j) const { return j * m_ + i; }
  std::array<double, 2> coords(std::size_t node) const;
  bool on_boundary(std::size_t node) const { return dof_of_node_[node] < 0; }
  long dof_of_node(std::size_t node) const { return dof_of_node_[node]; }
  std::size_t node_of_dof(std::size_t dof) const { return node_of_dof_[dof]; }

  const std::array<std::size_t, 3>& element(std::size_t e) const { return elements_[e]; }
  double area(std::size_t e) const { return area_[e]; }
  // Gradients of the three local hat functions (constant per element).
  const std::array<std::array<double, 2>, 3>& basis_gradients(std::size_t e) const {
    return grads_[e];
  }
  std::array<double, 2> gradient(std::size_t e, const Field& u) const;

  // Degree-4 six-point rule on every element, used for all L^s integrals.
  std::span<const double> quadrature_weights() const { return qweights_; }
  std::vector<double> sample(const Field& u) const;

  // Consistent P1 mass matrix restricted to interior dofs.
  const Eigen::SparseMatrix<double>& interior_mass() const { return mass_; }

  Field zero() const { return Field{std::vector<double>(num_nodes(), 0.0)}; }
  // Nodal interpolant of f; boundary nodes are set to zero if requested.
  Field interpolate(const std::function<double(double, double)>& f,
                    bool zero_boundary = true) const;

  Eigen::VectorXd to_dofs(const Field& u) const;
  Field from_dofs(const Eigen::VectorXd& x) const;

 private:
  std::size_t m_;
  double dx_;
  std::vector<std::array<std::size_t, 3>> elements_;
  std::vector<double> area_;
  std::vector<std::array<std::array<double, 2>, 3>> grads_;
  std::vector<long> dof_of_node_;
  std::vector<std::size_t> node_of_dof_;
  std::vector<double> qweights_;
  Eigen::SparseMatrix<double> mass_;
};

// Barycentric points and weights (summing to 1) of the six-point rule.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};
const TriangleRule& degree4_rule();
// Edge-midpoint rule, exact for quadratics.
const TriangleRule& midpoint_rule();

double ls_norm(const SpaceGrid& grid, const Field& u, double s);

}  // namespace cmfrac
