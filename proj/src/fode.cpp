#include "cmfrac/fode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cmfrac/error.hpp"
#include "cmfrac/format.hpp"

namespace cmfrac {

void FodeProblem::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!(y0 > 0.0)) throw InvalidArgument("y0 must be positive");
}

double solve_implicit_scalar(double c, double lambda, double gamma, double rhs,
                             double guess) {
  if (!(c > 0.0) || !(rhs > 0.0) || !std::isfinite(rhs))
    throw InternalError("implicit step: no positive root (corrupted history?)");
  const auto f = [&](double y) { return c * y + lambda * std::pow(y, gamma) - rhs; };
  double lo = 0.0;
  double hi = rhs / c;
  double y = (guess > lo && guess < hi) ? guess : hi;
  for (int it = 0; it < 400; ++it) {
    const double fy = f(y);
    if (fy == 0.0) break;
    (fy > 0.0 ? hi : lo) = y;
    const double dfy = c + lambda * gamma * std::pow(y, gamma - 1.0);
    double next = y - fy / dfy;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - y) <= 1e-15 * next || next == lo || next == hi;
    y = next;
    if (done) break;
  }
  const double scale = std::max({1.0, c * y, lambda * std::pow(y, gamma), rhs});
  if (!(y > 0.0) || std::abs(f(y)) > 1e-13 * scale)
    throw InternalError("implicit step: root solve did not reach tolerance");
  return y;
}

namespace {

// sum_j coeff_j v_j in a fixed order; compensated beyond 1e4 terms.
double history_sum(std::span<const double> coeff, std::span<const double> v) {
  if (coeff.size() <= 10000) {
    double s = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) s += coeff[j] * v[j];
    return s;
  }
  double s = 0.0, comp = 0.0;
  for (std::size_t j = 0; j < coeff.size(); ++j) {
    const double x = coeff[j] * v[j];
    const double t = s + x;
    comp += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + comp;
}

}  // namespace

double step(const FodeProblem& problem, const DiscreteCaputo& op,
            std::span<const double> history) {
  const std::size_t n = history.size();
  const DiscreteCaputo::Row r = op.row(n);
  const double rhs = -history_sum(r.history, history);
  return solve_implicit_scalar(r.diag, problem.lambda, problem.gamma, rhs,
                               history.back());
}

double step_uniform(const FodeProblem& problem, const WeightSequence& w, double h,
                    std::span<const double> history) {
  const std::size_t n = history.size();
  if (n < 1 || w.length() < n) throw OutOfRange("step_uniform: weights too short");
  if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
  const double hp = std::pow(h, -problem.alpha);
  double s = w.delta[n] * history[0];
  for (std::size_t k = 1; k < n; ++k) s += w.omega[n - k] * history[k];
  return solve_implicit_scalar(hp * w.omega[0], problem.lambda, problem.gamma, -hp * s,
                               history.back());
}

double step_l1_nonuniform(const FodeProblem& problem, const L1Row& d,
                          std::span<const double> history) {
  const std::size_t n = history.size();
  if (d.n() != n) throw InvalidArgument("L1 row does not match history length");
  const double g = 1.0 / std::tgamma(2.0 - problem.alpha);
  double s = -d(n) * history[0];
  for (std::size_t k = 1; k < n; ++k) s += history[n - k] * (d(k + 1) - d(k));
  return solve_implicit_scalar(g * d(1), problem.lambda, problem.gamma, -g * s,
                               history.back());
}

Trajectory solve(const FodeProblem& problem, std::shared_ptr<const DiscreteCaputo> op,
                 std::optional<double> h0) {
  problem.validate();
  if (std::abs(op->alpha() - problem.alpha) > 1e-15)
    throw InvalidArgument("operator order differs from problem alpha");
  Trajectory tr;
  tr.problem = problem;
  tr.op = op;
  if (h0 && op->kind() == DiscreteCaputo::Kind::UniformWeights && op->h() > *h0)
    tr.warnings.push_back("step size h = " + format_double(op->h()) +
                          " exceeds h0 = " + format_double(*h0));
  const std::size_t N = op->max_index();
  tr.y.reserve(N + 1);
  tr.y.push_back(problem.y0);
  for (std::size_t n = 1; n <= N; ++n) tr.y.push_back(step(problem, *op, tr.y));
  return tr;
}

Trajectory solve(const FodeProblem& problem, Scheme scheme, const TimeMesh& mesh) {
  const bool uniform = mesh.is_uniform(1e-12);
  if (scheme == Scheme::GrunwaldLetnikov && !uniform)
    throw InvalidArgument("Grunwald-Letnikov weights need a uniform mesh");
  std::shared_ptr<const DiscreteCaputo> op;
  if (uniform) {
    const std::size_t N = mesh.num_steps();
    op = std::make_shared<DiscreteCaputo>(DiscreteCaputo::uniform(
        make_weights(scheme, problem.alpha, N), mesh.tau(1), N));
  } else {
    op = std::make_shared<DiscreteCaputo>(DiscreteCaputo::l1(mesh, problem.alpha));
  }
  return solve(problem, std::move(op));
}

double apply_derivative(const DiscreteCaputo& op, std::span<const double> v,
                        std::size_t n) {
  const double a = op.apply(v, n);
  const double b = op.apply_difference_form(v, n);
  const double scale = std::max(1.0, op.magnitude(v, n));
  if (std::abs(a - b) > 1e-11 * scale)
    throw InternalError("derivative forms disagree; weights corrupted?");
  return a;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "n,t,y\n";
  for (std::size_t n = 0; n < tr.y.size(); ++n)
    os << n << ',' << format_double(tr.mesh().t(n)) << ',' << format_double(tr.y[n])
       << '\n';
}

}  // namespace cmfrac
