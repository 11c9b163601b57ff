#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cmfrac/bounds.hpp"
#include "cmfrac/error.hpp"

using namespace cmfrac;

TEST_CASE("g_beta") {
  for (double t : {0.1, 1.0, 7.0}) {
    CHECK(g_beta(t, 1.0) == doctest::Approx(1.0));
    CHECK(g_beta(t, 2.0) == doctest::Approx(t));
  }
  CHECK(g_beta(1.0, 1.5) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(g_beta(1.0, 1.5) == doctest::Approx(1.1283791671).epsilon(1e-10));
  CHECK(g_beta(0.0, 1.4) == 0.0);
  CHECK_THROWS_AS(g_beta(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(g_beta(-1.0, 2.0), DomainError);
}

TEST_CASE("uniform envelope for GL") {
  const FodeProblem pr{0.4, 2.0, 1.0, 5.0};
  const WeightSequence w = gl_weights(0.4, 2000);
  const UniformEnvelopeParams p0 = uniform_envelope_params(pr, w, 1e-4);
  const double h = p0.h0 / 2;
  auto op = std::make_shared<DiscreteCaputo>(DiscreteCaputo::uniform(w, h, 2000));
  const BoundEnvelope env = build_uniform_envelope(pr, op);
  const auto& p = std::get<UniformEnvelopeParams>(env.params);

  CHECK(p.h0 > 0.0);
  CHECK(p.n0 >= 2);
  CHECK(p.c7 >= p.c7_lower);
  CHECK(p.c9 == doctest::Approx(5.0 * std::pow(p.t_n1, 0.4)));
  CHECK(p.mu == doctest::Approx(2.0 * 5.0 * std::tgamma(1.4) / p.c3));
  CHECK(env.sub[0] == 5.0);
  CHECK(env.super[0] == 5.0);
  CHECK(env.sub[p.n0] >= env.sub[p.n0 + 1]);
  for (std::size_t n = 1; n <= 2000; ++n) {
    CHECK(env.sub[n] > 0.0);
    CHECK(env.sub[n] <= env.sub[n - 1]);
    CHECK(env.super[n] > 0.0);
    CHECK(env.super[n] <= env.super[n - 1]);
    if (n <= p.n1) CHECK(env.super[n] == 5.0);
  }

  const Trajectory tr = solve(pr, op);
  const EnvelopeReport rep = verify_envelope(env, tr);
  CHECK(rep.ordering_ok);
  CHECK(rep.sub_residual_ok);
  CHECK(rep.super_residual_ok);
  CHECK(rep.c5 > 0.0);
  CHECK(std::isfinite(rep.c6));

  // falsification control
  BoundEnvelope bad = env;
  for (double& u : bad.sub) u *= 1.5;
  const EnvelopeReport br = verify_envelope(bad, tr);
  CHECK_FALSE(br.ordering_ok);
  CHECK(br.first_ordering_failure == 0);
  CHECK_FALSE(br.pass());
}

TEST_CASE("uniform envelope rejects h > h0") {
  const FodeProblem pr{0.4, 2.0, 1.0, 5.0};
  const WeightSequence w = gl_weights(0.4, 100);
  try {
    build_uniform_envelope(pr, w, 0.1, 100);
    FAIL("expected PreconditionViolation");
  } catch (const PreconditionViolation&) {
  }
}

TEST_CASE("nonuniform mu closed form") {
  // gamma = 1, alpha = 1/2: 2 (3/4) Gamma(3/2) Gamma(1/2) = 3 pi / 4 > 1
  const FodeProblem pr{0.5, 1.3, 1.0, 2.0};
  const TimeMesh m = ensure_point_in(make_graded(20.0, 400, 2.0), hat_window(pr).lo,
                                     hat_window(pr).hi);
  const BoundEnvelope env = build_nonuniform_envelope(pr, m);
  const auto& p = std::get<NonuniformEnvelopeParams>(env.params);
  CHECK(p.mu == doctest::Approx(1.3 * 2.0 * 3.0 * std::numbers::pi / 4.0).epsilon(1e-14));
}

TEST_CASE("nonuniform envelope on a graded mesh") {
  const FodeProblem pr{0.4, 2.0, 1.0, 5.0};
  const Window win = hat_window(pr);
  CHECK(win.lo < win.hi);
  TimeMesh m = make_graded(30.0, 1500, 2.0);
  m = ensure_point_in(m, win.lo, win.hi);
  const BoundEnvelope env = build_nonuniform_envelope(pr, m);
  const auto& p = std::get<NonuniformEnvelopeParams>(env.params);
  CHECK(p.t_hat >= win.lo);
  CHECK(p.t_hat <= win.hi);
  const double vhat = env.sub[p.hat_index];
  CHECK(vhat >= 2.5 - 1e-12);
  CHECK(vhat <= 3.75 + 1e-12);
  REQUIRE(p.switch_index != kNoIndex);
  CHECK(p.c3p == doctest::Approx(5.0 * std::pow(p.t_switch, 0.4)));
  for (std::size_t n = 0; n <= p.switch_index; ++n) CHECK(env.super[n] == 5.0);
  CHECK(env.super[p.switch_index] ==
        doctest::Approx(p.c3p * std::pow(p.t_switch, -0.4)).epsilon(1e-14));

  const Trajectory tr = solve(pr, env.op);
  const EnvelopeReport rep = verify_envelope(env, tr);
  CHECK(rep.pass());
}

TEST_CASE("nonuniform envelope reports the window") {
  const FodeProblem pr{0.4, 2.0, 1.0, 5.0};
  const Window win = hat_window(pr);
  // coarse mesh that jumps over the window
  const TimeMesh m({0.0, win.lo / 2, win.hi * 2, 10.0});
  try {
    build_nonuniform_envelope(pr, m);
    FAIL("expected PreconditionViolation");
  } catch (const PreconditionViolation& e) {
    CHECK(e.window_lo == doctest::Approx(win.lo));
    CHECK(e.window_hi == doctest::Approx(win.hi));
  }
}

TEST_CASE("L1 interpolant of g_{1+a} has derivative >= 1") {
  const double a = 0.35;
  const TimeMesh m = make_graded(5.0, 200, 2.2);
  auto op = std::make_shared<DiscreteCaputo>(DiscreteCaputo::l1(m, a));
  std::vector<double> g(m.size());
  for (std::size_t n = 0; n < m.size(); ++n) g[n] = g_beta(m.t(n), 1 + a);
  for (std::size_t n = 1; n < m.size(); ++n) CHECK(apply_derivative(*op, g, n) >= 1.0 - 1e-12);
}

TEST_CASE("envelope decay constants") {
  const FodeProblem pr{0.5, 1.0, 2.0, 1.0};
  const WeightSequence w = gl_weights(0.5, 4000);
  const double h = uniform_envelope_params(pr, w, 1e-3).h0 / 2;
  const BoundEnvelope env = build_uniform_envelope(pr, w, h, 4000);
  const auto& p = std::get<UniformEnvelopeParams>(env.params);
  const double rate = 0.25;
  const std::size_t from = std::max(p.n0, p.n1) + 1;
  for (std::size_t n = from; n <= 4000; ++n) {
    const double t = env.op->mesh().t(n);
    CHECK(env.sub[n] * std::pow(t, rate) == doctest::Approx(p.c7));
    CHECK(env.super[n] * std::pow(t, rate) == doctest::Approx(p.c9));
  }
}

TEST_CASE("envelope csv") {
  const FodeProblem pr{0.4, 2.0, 1.0, 5.0};
  const WeightSequence w = gl_weights(0.4, 50);
  const double h = uniform_envelope_params(pr, w, 1e-4).h0 / 2;
  const BoundEnvelope env = build_uniform_envelope(pr, w, h, 50);
  const Trajectory tr = solve(pr, env.op);
  std::ostringstream os;
  write_envelope_csv(os, env, tr);
  CHECK(os.str().rfind("n,t,u,y,v\n0,0,5,5,5\n", 0) == 0);
}
