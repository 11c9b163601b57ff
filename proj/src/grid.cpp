#include "cmfrac/grid.hpp"

#include <cmath>

#include "cmfrac/error.hpp"

namespace cmfrac {

const TriangleRule& degree4_rule() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1;
    const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2;
    const double w1 = 0.223381589678011, w2 = 0.109951743655322;
    r.points = {{a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

const TriangleRule& midpoint_rule() {
  static const TriangleRule rule{
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  return rule;
}

SpaceGrid::SpaceGrid(std::size_t m) : m_(m) {
  if (m < 3) throw InvalidArgument("space grid needs m >= 3 nodes per side");
  dx_ = 1.0 / static_cast<double>(m - 1);
  dof_of_node_.assign(m * m, -1);
  for (std::size_t j = 1; j + 1 < m; ++j)
    for (std::size_t i = 1; i + 1 < m; ++i) {
      dof_of_node_[node(i, j)] = static_cast<long>(node_of_dof_.size());
      node_of_dof_.push_back(node(i, j));
    }
  for (std::size_t j = 0; j + 1 < m; ++j)
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const std::size_t n00 = node(i, j), n10 = node(i + 1, j);
      const std::size_t n01 = node(i, j + 1), n11 = node(i + 1, j + 1);
      elements_.push_back({n00, n10, n11});
      elements_.push_back({n00, n11, n01});
    }
  const TriangleRule& q4 = degree4_rule();
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& el : elements_) {
    const auto p0 = coords(el[0]), p1 = coords(el[1]), p2 = coords(el[2]);
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * std::abs(det);
    area_.push_back(area);
    std::array<std::array<double, 2>, 3> g;
    g[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
    g[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
    g[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
    grads_.push_back(g);
    for (double w : q4.weights) qweights_.push_back(w * area);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const long da = dof_of_node_[el[a]], db = dof_of_node_[el[b]];
        if (da < 0 || db < 0) continue;
        trip.emplace_back(da, db, area * (a == b ? 2.0 : 1.0) / 12.0);
      }
  }
  mass_.resize(static_cast<long>(num_dofs()), static_cast<long>(num_dofs()));
  mass_.setFromTriplets(trip.begin(), trip.end());
}

std::array<double, 2> SpaceGrid::coords(std::size_t nd) const {
  return {static_cast<double>(nd % m_) * dx_, static_cast<double>(nd / m_) * dx_};
}

std::array<double, 2> SpaceGrid::gradient(std::size_t e, const Field& u) const {
  const auto& el = elements_[e];
  const auto& g = grads_[e];
  std::array<double, 2> r{0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    r[0] += u.values[el[a]] * g[a][0];
    r[1] += u.values[el[a]] * g[a][1];
  }
  return r;
}

std::vector<double> SpaceGrid::sample(const Field& u) const {
  if (u.values.size() != num_nodes()) throw InvalidArgument("field does not match grid");
  const TriangleRule& q4 = degree4_rule();
  std::vector<double> out;
  out.reserve(qweights_.size());
  for (const auto& el : elements_) {
    const double u0 = u.values[el[0]], u1 = u.values[el[1]], u2 = u.values[el[2]];
    for (const auto& b : q4.points) out.push_back(b[0] * u0 + b[1] * u1 + b[2] * u2);
  }
  return out;
}

Field SpaceGrid::interpolate(const std::function<double(double, double)>& f,
                             bool zero_boundary) const {
  Field u = zero();
  for (std::size_t nd = 0; nd < num_nodes(); ++nd) {
    if (zero_boundary && on_boundary(nd)) continue;
    const auto x = coords(nd);
    u.values[nd] = f(x[0], x[1]);
  }
  return u;
}

Eigen::VectorXd SpaceGrid::to_dofs(const Field& u) const {
  Eigen::VectorXd x(static_cast<long>(num_dofs()));
  for (std::size_t d = 0; d < num_dofs(); ++d) x[static_cast<long>(d)] = u.values[node_of_dof_[d]];
  return x;
}

Field SpaceGrid::from_dofs(const Eigen::VectorXd& x) const {
  Field u = zero();
  for (std::size_t d = 0; d < num_dofs(); ++d) u.values[node_of_dof_[d]] = x[static_cast<long>(d)];
  return u;
}

double ls_norm(const SpaceGrid& grid, const Field& u, double s) {
  if (!(s >= 1.0)) throw InvalidArgument("L^s norm needs s >= 1");
  const auto w = grid.quadrature_weights();
  const std::vector<double> uq = grid.sample(u);
  double acc = 0.0;
  if (s == 2.0) {
    for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * uq[q] * uq[q];
    return std::sqrt(acc);
  }
  for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * std::pow(std::abs(uq[q]), s);
  return std::pow(acc, 1.0 / s);
}

}  // namespace cmfrac
