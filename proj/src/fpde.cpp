#include "cmfrac/fpde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "cmfrac/error.hpp"
#include "cmfrac/format.hpp"

namespace cmfrac {

Nonlinearity Nonlinearity::p_laplace(double p, double eps) {
  if (!(p > 1.0)) throw InvalidArgument("p-Laplace needs p > 1");
  if (!(eps > 0.0)) throw InvalidArgument("p-Laplace regularization must be positive");
  return Nonlinearity(Kind::PLaplace, p, eps);
}

Nonlinearity Nonlinearity::mean_curvature() { return Nonlinearity(Kind::MeanCurvature, 2.0, 0.0); }

double Nonlinearity::a(double q) const {
  if (kind_ == Kind::MeanCurvature) return 1.0 / std::sqrt(1.0 + q);
  if (p_ == 2.0) return 1.0;
  return std::pow(q + eps_ * eps_, 0.5 * (p_ - 2.0));
}

double Nonlinearity::da_dq(double q) const {
  if (kind_ == Kind::MeanCurvature) return -0.5 * std::pow(1.0 + q, -1.5);
  if (p_ == 2.0) return 0.0;
  return 0.5 * (p_ - 2.0) * std::pow(q + eps_ * eps_, 0.5 * (p_ - 2.0) - 1.0);
}

std::array<double, 2> Nonlinearity::j_grad(const std::array<double, 2>& g) const {
  const double c = 2.0 * da_dq(g[0] * g[0] + g[1] * g[1]);
  return {c * g[0], c * g[1]};
}

double Nonlinearity::gamma() const { return kind_ == Kind::PLaplace ? p_ - 1.0 : 1.0; }

std::string Nonlinearity::name() const {
  return kind_ == Kind::PLaplace ? "p-laplace" : "mean-curvature";
}

namespace {

double dot(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  return x[0] * y[0] + x[1] * y[1];
}

// Reference mass of the unit-area triangle from the midpoint rule.
const Eigen::Matrix3d& reference_mass() {
  static const Eigen::Matrix3d m = [] {
    const TriangleRule& rule = midpoint_rule();
    Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) r(a, b) += rule.weights[q] * lam[a] * lam[b];
    }
    return r;
  }();
  return m;
}

Eigen::Matrix3d local_mass(const SpaceGrid& grid, std::size_t e) {
  return grid.area(e) * reference_mass();
}

struct Assembly {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd mass_w, mass_b, flux;
};

Assembly assemble(const SpaceGrid& grid, const Nonlinearity& nl, double beta,
                  const Field& b, const Field& w, bool with_matrix) {
  if (!(beta > 0.0)) throw InvalidArgument("step system needs beta > 0");
  if (w.values.size() != grid.num_nodes() || b.values.size() != grid.num_nodes())
    throw InvalidArgument("field does not match grid");
  const long nd = static_cast<long>(grid.num_dofs());
  Assembly as;
  as.mass_w = Eigen::VectorXd::Zero(nd);
  as.mass_b = Eigen::VectorXd::Zero(nd);
  as.flux = Eigen::VectorXd::Zero(nd);
  if (with_matrix) as.triplets.reserve(9 * grid.num_elements());
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto& el = grid.element(e);
    const auto& gr = grid.basis_gradients(e);
    const Eigen::Matrix3d me = local_mass(grid, e);
    const auto g = grid.gradient(e, w);
    const double aq = nl.a(dot(g, g));
    Eigen::Matrix3d ke;
    if (with_matrix) ke = element_matrix(grid, e, nl, beta, w);
    for (int i = 0; i < 3; ++i) {
      const long di = grid.dof_of_node(el[i]);
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        as.mass_w[di] += me(i, j) * w.values[el[j]];
        as.mass_b[di] += me(i, j) * b.values[el[j]];
        const long dj = grid.dof_of_node(el[j]);
        if (with_matrix && dj >= 0) as.triplets.emplace_back(di, dj, ke(i, j));
      }
      as.flux[di] += beta * grid.area(e) * aq * dot(g, gr[i]);
    }
  }
  return as;
}

double relative_norm(const Assembly& as) {
  const Eigen::VectorXd r = as.mass_w + as.mass_b + as.flux;
  const double scale = std::max({as.mass_w.norm(), as.mass_b.norm(), as.flux.norm()});
  return scale > 0.0 ? r.norm() / scale : r.norm();
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& rhs,
                             double tol) {
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(std::max<long>(1000, 4 * a.rows()));
  cg.compute(a);
  if (cg.info() == Eigen::Success) {
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() == Eigen::Success) return x;
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw InternalError("step system factorization failed");
  return ldlt.solve(rhs);
}

double l2_dofs(const SpaceGrid& grid, const Eigen::VectorXd& x) {
  return std::sqrt(std::max(0.0, x.dot(grid.interior_mass() * x)));
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads <= 1 || n < 2 * threads) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

double signed_pow(double u, double e) { return std::copysign(std::pow(std::abs(u), e), u); }

}  // namespace

Eigen::Matrix3d element_matrix(const SpaceGrid& grid, std::size_t e,
                               const Nonlinearity& nl, double beta, const Field& w) {
  const auto& gr = grid.basis_gradients(e);
  const auto g = grid.gradient(e, w);
  const double q = dot(g, g);
  const double aq = nl.a(q);
  const auto jg = nl.j_grad(g);
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k(i, j) = aq * dot(gr[j], gr[i]) + dot(jg, gr[j]) * dot(g, gr[i]);
  return local_mass(grid, e) + beta * grid.area(e) * k;
}

StepSystem assemble_step_system(const SpaceGrid& grid, const Nonlinearity& nl,
                                double beta, const Field& b, const Field& w) {
  Assembly as = assemble(grid, nl, beta, b, w, true);
  StepSystem sys;
  const long nd = static_cast<long>(grid.num_dofs());
  sys.matrix.resize(nd, nd);
  sys.matrix.setFromTriplets(as.triplets.begin(), as.triplets.end());
  sys.residual = as.mass_w + as.mass_b + as.flux;
  return sys;
}

Eigen::VectorXd step_residual(const SpaceGrid& grid, const Nonlinearity& nl, double beta,
                              const Field& b, const Field& w) {
  const Assembly as = assemble(grid, nl, beta, b, w, false);
  return as.mass_w + as.mass_b + as.flux;
}

PicardResult picard_step(const SpaceGrid& grid, const Nonlinearity& nl, double beta,
                         const Field& b, const Field& guess, const PicardOptions& opts) {
  PicardResult res;
  res.w = guess;
  for (std::size_t nd = 0; nd < grid.num_nodes(); ++nd)
    if (grid.on_boundary(nd)) res.w.values[nd] = 0.0;

  Assembly as = assemble(grid, nl, beta, b, res.w, true);
  double rel = relative_norm(as);
  res.residual_history.push_back(rel);
  bool converged = rel <= 1e-13;
  while (!converged && res.iterations < opts.max_iterations) {
    const long nd = static_cast<long>(grid.num_dofs());
    Eigen::SparseMatrix<double> a(nd, nd);
    a.setFromTriplets(as.triplets.begin(), as.triplets.end());
    const Eigen::VectorXd r = as.mass_w + as.mass_b + as.flux;
    const Eigen::VectorXd dw = solve_linear(a, -r, opts.linear_tol);
    const Eigen::VectorXd w0 = grid.to_dofs(res.w);

    double step = 1.0;
    Field trial;
    Assembly next;
    double rel_next = 0.0;
    for (int k = 0; k < 8; ++k) {
      trial = grid.from_dofs(w0 + step * dw);
      next = assemble(grid, nl, beta, b, trial, true);
      rel_next = relative_norm(next);
      if (rel_next <= rel || rel_next <= opts.residual_tol) break;
      step *= 0.5;
    }
    res.w = std::move(trial);
    as = std::move(next);
    rel = rel_next;
    ++res.iterations;
    res.residual_history.push_back(rel);
    const double wn = l2_dofs(grid, w0 + step * dw);
    const bool small_update = step * l2_dofs(grid, dw) <= opts.update_tol * std::max(1.0, wn);
    converged = rel <= 1e-10 || (small_update && rel <= opts.residual_tol);
  }
  res.residual = rel;
  if (!converged || !(rel <= opts.residual_tol))
    throw ConvergenceFailure("Picard iteration did not converge", res.residual_history);
  return res;
}

Field sine_field(const SpaceGrid& grid, double amplitude) {
  return grid.interpolate([amplitude](double x, double y) {
    return amplitude * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
  });
}

PdeTrajectory solve_fpde(const SpaceGrid& grid, const Nonlinearity& nl,
                         std::shared_ptr<const DiscreteCaputo> op, const Field& u0,
                         const FpdeOptions& opts) {
  if (!op) throw InvalidArgument("solve_fpde needs an operator");
  if (u0.values.size() != grid.num_nodes()) throw InvalidArgument("u0 does not match grid");
  for (std::size_t nd = 0; nd < grid.num_nodes(); ++nd) {
    if (grid.on_boundary(nd) && u0.values[nd] != 0.0)
      throw InvalidArgument("u0 must vanish on the boundary");
    if (u0.values[nd] < 0.0) throw InvalidArgument("u0 must be nonnegative");
  }
  const std::size_t n_steps = op->max_index();
  const std::size_t nn = grid.num_nodes();
  const auto qw = grid.quadrature_weights();

  PdeTrajectory tr;
  tr.model = nl.name();
  tr.alpha = op->alpha();
  tr.gamma = nl.gamma();
  tr.s = opts.s;
  tr.times.assign(op->mesh().points().begin(), op->mesh().points().end());
  tr.norms.push_back(ls_norm(grid, u0, opts.s));
  tr.picard_iterations.push_back(0);
  tr.residuals.push_back(0.0);
  tr.min_values.push_back(*std::min_element(u0.values.begin(), u0.values.end()));
  tr.energy.emplace_back();

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&](std::size_t n, const Field& u) {
    const double tn = tr.times[n];
    const double tnext = n + 1 < tr.times.size() ? tr.times[n + 1] : INFINITY;
    while (next_snap < snaps.size() && snaps[next_snap] < 0.5 * (tn + tnext)) {
      tr.snapshots.emplace_back(tn, u);
      ++next_snap;
    }
  };
  take_snapshots(0, u0);

  std::vector<std::vector<double>> hist;
  hist.reserve(n_steps + 1);
  hist.push_back(u0.values);
  Field b{std::vector<double>(nn)};
  std::vector<double> hsum(nn);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const DiscreteCaputo::Row row = op->row(n);
    parallel_for(nn, opts.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) hsum[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double c = row.history[j];
        const double* u = hist[j].data();
        for (std::size_t i = lo; i < hi; ++i) hsum[i] += c * u[i];
      }
    });
    const double beta = 1.0 / row.diag;
    for (std::size_t i = 0; i < nn; ++i) b.values[i] = beta * hsum[i];

    PicardResult pr;
    try {
      pr = picard_step(grid, nl, beta, b, Field{hist.back()}, opts.picard);
    } catch (const ConvergenceFailure& e) {
      throw ConvergenceFailure(e.what(), e.residual_history, static_cast<long>(n));
    }
    tr.picard_iterations.push_back(pr.iterations);
    tr.residuals.push_back(pr.residual);
    tr.min_values.push_back(*std::min_element(pr.w.values.begin(), pr.w.values.end()));
    tr.norms.push_back(ls_norm(grid, pr.w, opts.s));

    if (opts.check_energy) {
      Field deriv{std::vector<double>(nn)};
      for (std::size_t i = 0; i < nn; ++i) deriv.values[i] = row.diag * pr.w.values[i] + hsum[i];
      const std::vector<double> cur = grid.sample(pr.w);
      const std::vector<double> dq = grid.sample(deriv);
      EnergyCheck ec = energy_inequality_from_parts(qw, cur, dq, tr.norms, *op, opts.s);
      if (!ec.pass) ++tr.energy_failures;
      tr.energy.push_back(ec);
    } else {
      tr.energy.emplace_back();
    }
    take_snapshots(n, pr.w);
    hist.push_back(std::move(pr.w.values));
  }
  tr.final_field = Field{hist.back()};
  return tr;
}

StructuralDiagnostic structural_diagnostic(const SpaceGrid& grid, const Field& u,
                                           const Nonlinearity& nl, double s) {
  if (!(s > 1.0)) throw InvalidArgument("structural diagnostic needs s > 1");
  StructuralDiagnostic d;
  d.lhs = std::pow(ls_norm(grid, u, s), s - 1.0 + nl.gamma());
  Field us = grid.zero();
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) us.values[i] = signed_pow(u.values[i], s - 1.0);
  for (std::size_t e = 0; e < grid.num_elements(); ++e) {
    const auto g = grid.gradient(e, u);
    const auto gs = grid.gradient(e, us);
    d.rhs += grid.area(e) * nl.a(dot(g, g)) * dot(gs, g);
  }
  d.conclusive = d.rhs > 0.0;
  d.ratio = d.conclusive ? d.lhs / d.rhs : INFINITY;
  return d;
}

EnergyCheck energy_inequality_check(const SpaceGrid& grid, std::span<const Field> history,
                                    const DiscreteCaputo& op, double s) {
  std::vector<std::vector<double>> samples;
  samples.reserve(history.size());
  for (const Field& f : history) {
    if (f.values.size() != grid.num_nodes()) throw InvalidArgument("energy check: mismatched grids");
    samples.push_back(grid.sample(f));
  }
  return energy_inequality_check(grid.quadrature_weights(), samples, op, s);
}

void write_pde_csv(std::ostream& os, const PdeTrajectory& tr) {
  os << "n,t,V_n,picard_iters,residual\n";
  for (std::size_t n = 0; n < tr.norms.size(); ++n)
    os << n << ',' << format_double(tr.times[n]) << ',' << format_double(tr.norms[n]) << ','
       << tr.picard_iterations[n] << ',' << format_double(tr.residuals[n]) << '\n';
}

void write_field_csv(std::ostream& os, const SpaceGrid& grid, const Field& u) {
  os << "i,j,x1,x2,U\n";
  for (std::size_t j = 0; j < grid.m(); ++j)
    for (std::size_t i = 0; i < grid.m(); ++i) {
      const auto x = grid.coords(grid.node(i, j));
      os << i << ',' << j << ',' << format_double(x[0]) << ',' << format_double(x[1]) << ','
         << format_double(u.values[grid.node(i, j)]) << '\n';
    }
}

}  // namespace cmfrac
