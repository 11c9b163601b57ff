#include "cmfrac/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "cmfrac/error.hpp"
#include "cmfrac/format.hpp"

namespace cmfrac {

double g_beta(double t, double beta) {
  if (!(beta > 0.0)) throw DomainError("g_beta needs beta > 0");
  if (t < 0.0) throw DomainError("g_beta needs t >= 0");
  if (t == 0.0) {
    if (beta <= 1.0) throw DomainError("g_beta(0) undefined for beta <= 1");
    return 0.0;
  }
  return std::pow(t, beta - 1.0) / std::tgamma(beta);
}

UniformEnvelopeParams uniform_envelope_params(const FodeProblem& problem,
                                              const WeightSequence& weights, double h) {
  problem.validate();
  if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
  const double a = problem.alpha, g = problem.gamma, lam = problem.lambda, y0 = problem.y0;
  const DecayConstants dc = estimate_decay_constants(weights);
  UniformEnvelopeParams p;
  p.c3 = 0.9 * dc.c3;
  p.c4 = 1.1 * dc.c4;

  const double thr0 = p.c3 * std::pow(y0, 1.0 - g) / (2.0 * lam);
  p.h0 = 0.5 * std::pow(thr0, 1.0 / a);
  p.mu = lam * std::pow(y0, g) * std::tgamma(1.0 + a) / p.c3;

  // n0: last mesh point with t_n^alpha <= thr0.
  auto n0 = static_cast<std::size_t>(std::floor(2.0 * p.h0 / h));
  while (std::pow(static_cast<double>(n0 + 1) * h, a) <= thr0) ++n0;
  while (n0 > 0 && std::pow(static_cast<double>(n0) * h, a) > thr0) --n0;
  p.n0 = n0;
  p.t_n0 = static_cast<double>(n0) * h;
  p.c7 = 0.5 * y0 * std::pow(p.t_n0, a / g);
  p.c7_lower = std::pow(2.0, -1.0 - a / g) * std::pow(y0 * p.c3 / (2.0 * lam), 1.0 / g);

  p.c8 = std::pow(2.0, a) * p.c4 * (a * std::pow(2.0, a / g) / (g * (1.0 - a)) + 1.0);
  const double thr1 = std::pow(y0, 1.0 - g) / lam *
                      std::max(a * std::pow(2.0, a) * p.c4 / (g * (1.0 - a)), p.c8);
  auto n1 = static_cast<std::size_t>(std::ceil(std::pow(thr1, 1.0 / a) / h));
  n1 = std::max<std::size_t>(n1, 1);
  while (n1 > 1 && std::pow(static_cast<double>(n1 - 1) * h, a) >= thr1) --n1;
  while (std::pow(static_cast<double>(n1) * h, a) < thr1) ++n1;
  p.n1 = n1;
  p.t_n1 = static_cast<double>(n1) * h;
  p.c9 = y0 * std::pow(p.t_n1, a / g);
  return p;
}

BoundEnvelope build_uniform_envelope(const FodeProblem& problem,
                                     std::shared_ptr<const DiscreteCaputo> op) {
  if (op->kind() != DiscreteCaputo::Kind::UniformWeights)
    throw InvalidArgument("uniform envelope needs a uniform-weight operator");
  const double h = op->h();
  const UniformEnvelopeParams p = uniform_envelope_params(problem, op->weights(), h);
  if (h > p.h0)
    throw PreconditionViolation("step size h = " + format_double(h) +
                                " exceeds h0 = " + format_double(p.h0));
  if (p.n0 < 2) throw PreconditionViolation("no admissible n0 >= 2");

  const double a = problem.alpha, g = problem.gamma, y0 = problem.y0;
  const double ga = std::tgamma(1.0 + a);
  const std::size_t N = op->max_index();
  BoundEnvelope env;
  env.problem = problem;
  env.op = op;
  env.sub.resize(N + 1);
  env.super.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double t = op->mesh().t(n);
    env.sub[n] = n <= p.n0 ? y0 - p.mu * std::pow(t, a) / ga : p.c7 * std::pow(t, -a / g);
    env.super[n] = n <= p.n1 ? y0 : p.c9 * std::pow(t, -a / g);
  }
  env.params = p;
  return env;
}

BoundEnvelope build_uniform_envelope(const FodeProblem& problem,
                                     const WeightSequence& weights, double h,
                                     std::size_t N) {
  return build_uniform_envelope(
      problem, std::make_shared<DiscreteCaputo>(DiscreteCaputo::uniform(weights, h, N)));
}

namespace {

double nonuniform_mu(const FodeProblem& pr) {
  const double a = pr.alpha;
  const double gg = std::tgamma(1.0 + a) * std::tgamma(1.0 - a);
  return pr.lambda * std::pow(pr.y0, pr.gamma) *
         std::max(1.0, 2.0 * std::pow(0.75, pr.gamma) * gg);
}

}  // namespace

Window hat_window(const FodeProblem& problem) {
  problem.validate();
  const double a = problem.alpha;
  const double base = problem.y0 * std::tgamma(1.0 + a) / nonuniform_mu(problem);
  return {std::pow(base / 4.0, 1.0 / a), std::pow(base / 2.0, 1.0 / a)};
}

BoundEnvelope build_nonuniform_envelope(const FodeProblem& problem,
                                        std::shared_ptr<const DiscreteCaputo> op) {
  if (op->kind() != DiscreteCaputo::Kind::L1Mesh)
    throw InvalidArgument("nonuniform envelope needs an L1 mesh operator");
  problem.validate();
  const TimeMesh& mesh = op->mesh();
  const double a = problem.alpha, g = problem.gamma, lam = problem.lambda, y0 = problem.y0;

  NonuniformEnvelopeParams p;
  p.mu = nonuniform_mu(problem);
  const Window win = hat_window(problem);
  p.window_lo = win.lo;
  p.window_hi = win.hi;
  const auto pts = mesh.points();
  auto it = std::lower_bound(pts.begin() + 1, pts.end(), win.lo);
  if (it == pts.end() || *it > win.hi)
    throw PreconditionViolation("no mesh point in the t_hat window", win.lo, win.hi);
  p.hat_index = static_cast<std::size_t>(it - pts.begin());
  p.t_hat = *it;
  p.c1p = std::pow(p.t_hat, a / g) * (y0 - p.mu * g_beta(p.t_hat, 1.0 + a));

  p.K = mesh.ratio_bound();
  const double K = p.K;
  p.c2p = std::pow(K + 2.0, a) / std::tgamma(1.0 - a) *
          (1.0 + a * std::pow(K + 1.0, 1.0 - a) * std::pow(K + 2.0, a / g) /
                     (g * (1.0 - a)));
  const double first = a * std::pow(K + 1.0, 1.0 - a) * std::pow(K + 2.0, a) /
                       (g * std::tgamma(2.0 - a));
  const double thr = std::pow(y0, 1.0 - g) / lam * std::max(first, p.c2p);
  p.t_switch_threshold = std::pow(thr, 1.0 / a);
  for (std::size_t n = 1; n < pts.size(); ++n) {
    if (std::pow(pts[n], a) >= thr) {
      p.switch_index = n;
      p.t_switch = pts[n];
      p.c3p = y0 * std::pow(pts[n], a / g);
      break;
    }
  }

  const std::size_t N = op->max_index();
  BoundEnvelope env;
  env.problem = problem;
  env.op = op;
  env.sub.resize(N + 1);
  env.super.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double t = pts[n];
    env.sub[n] = n <= p.hat_index ? y0 - p.mu * (n == 0 ? 0.0 : g_beta(t, 1.0 + a))
                                  : p.c1p * std::pow(t, -a / g);
    env.super[n] = n <= p.switch_index ? y0 : p.c3p * std::pow(t, -a / g);
  }
  env.params = p;
  return env;
}

BoundEnvelope build_nonuniform_envelope(const FodeProblem& problem, const TimeMesh& mesh) {
  return build_nonuniform_envelope(
      problem, std::make_shared<DiscreteCaputo>(DiscreteCaputo::l1(mesh, problem.alpha)));
}

EnvelopeReport verify_envelope(const BoundEnvelope& env, const Trajectory& tr) {
  EnvelopeReport rep;
  const bool same_op =
      env.op == tr.op || (env.op->kind() == tr.op->kind() && env.op->mesh() == tr.mesh());
  if (!same_op || env.sub.size() != tr.y.size()) {
    rep.ordering_ok = rep.sub_residual_ok = rep.super_residual_ok = false;
    return rep;
  }
  const FodeProblem& pr = tr.problem;
  const double rate = pr.alpha / pr.gamma;
  const std::size_t N = tr.y.size() - 1;
  rep.c5 = std::numeric_limits<double>::infinity();
  rep.c6 = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    const double y = tr.y[n];
    const double w = y * (1.0 + std::pow(tr.mesh().t(n), rate));
    rep.c5 = std::min(rep.c5, w);
    rep.c6 = std::max(rep.c6, w);
    if (rep.ordering_ok &&
        (env.sub[n] > y + kEnvelopeSlack || y > env.super[n] + kEnvelopeSlack)) {
      rep.ordering_ok = false;
      rep.first_ordering_failure = n;
    }
    if (n == 0) continue;
    try {
      const double rs = apply_derivative(*env.op, env.sub, n) +
                        pr.lambda * std::pow(env.sub[n], pr.gamma);
      const double rv = apply_derivative(*env.op, env.super, n) +
                        pr.lambda * std::pow(env.super[n], pr.gamma);
      rep.max_sub_residual = std::max(rep.max_sub_residual, rs);
      rep.min_super_residual = std::min(rep.min_super_residual, rv);
      if (rep.sub_residual_ok && !(rs <= kEnvelopeSlack)) {
        rep.sub_residual_ok = false;
        rep.first_sub_failure = n;
      }
      if (rep.super_residual_ok && !(rv >= -kEnvelopeSlack)) {
        rep.super_residual_ok = false;
        rep.first_super_failure = n;
      }
    } catch (const InternalError&) {
      rep.sub_residual_ok = rep.super_residual_ok = false;
      if (rep.first_sub_failure == kNoIndex) rep.first_sub_failure = n;
      if (rep.first_super_failure == kNoIndex) rep.first_super_failure = n;
    }
  }
  return rep;
}

void write_envelope_csv(std::ostream& os, const BoundEnvelope& env, const Trajectory& tr) {
  os << "n,t,u,y,v\n";
  for (std::size_t n = 0; n < tr.y.size(); ++n)
    os << n << ',' << format_double(tr.mesh().t(n)) << ',' << format_double(env.sub[n])
       << ',' << format_double(tr.y[n]) << ',' << format_double(env.super[n]) << '\n';
}

}  // namespace cmfrac
