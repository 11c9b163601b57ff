#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "cmfrac/fode.hpp"

namespace cmfrac {

// t^{beta-1} / Gamma(beta); g_beta(0) = 0 for beta > 1.
double g_beta(double t, double beta);

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

// Constants of the uniform-mesh (CM-preserving) construction.
struct UniformEnvelopeParams {
  double c3 = 0.0;  // empirical lower decay constant, after the 0.9 margin
  double c4 = 0.0;  // empirical upper decay constant, after the 1.1 margin
  double h0 = 0.0;
  double mu = 0.0;
  std::size_t n0 = 0;
  double t_n0 = 0.0;
  double c7 = 0.0;
  double c7_lower = 0.0;  // mesh-independent lower bound for c7
  double c8 = 0.0;
  std::size_t n1 = 0;
  double t_n1 = 0.0;
  double c9 = 0.0;
};

// Constants of the L1 construction on an arbitrary mesh.
struct NonuniformEnvelopeParams {
  double mu = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t hat_index = 0;
  double t_hat = 0.0;
  double c1p = 0.0;
  double K = 1.0;
  double c2p = 0.0;
  double t_switch_threshold = 0.0;  // t_N must satisfy t_N >= this
  std::size_t switch_index = kNoIndex;  // kNoIndex if the mesh ends first
  double t_switch = std::numeric_limits<double>::quiet_NaN();
  double c3p = std::numeric_limits<double>::quiet_NaN();
};

struct BoundEnvelope {
  FodeProblem problem;
  std::shared_ptr<const DiscreteCaputo> op;
  std::vector<double> sub;
  std::vector<double> super;
  std::variant<UniformEnvelopeParams, NonuniformEnvelopeParams> params;
};

// Constants for step h; C3/C4 come from estimate_decay_constants(weights)
// with safety factors 0.9 and 1.1. Does not check h <= h0.
UniformEnvelopeParams uniform_envelope_params(const FodeProblem& problem,
                                              const WeightSequence& weights, double h);

// Throws PreconditionViolation when h > h0.
BoundEnvelope build_uniform_envelope(const FodeProblem& problem,
                                     std::shared_ptr<const DiscreteCaputo> op);
BoundEnvelope build_uniform_envelope(const FodeProblem& problem,
                                     const WeightSequence& weights, double h,
                                     std::size_t N);

// Interval where the junction point t_hat of the L1 subsolution must lie.
struct Window {
  double lo;
  double hi;
};
Window hat_window(const FodeProblem& problem);

// Throws PreconditionViolation (carrying the window) when no mesh point lies
// in hat_window(problem); see ensure_point_in.
BoundEnvelope build_nonuniform_envelope(const FodeProblem& problem,
                                        std::shared_ptr<const DiscreteCaputo> op);
BoundEnvelope build_nonuniform_envelope(const FodeProblem& problem, const TimeMesh& mesh);

struct EnvelopeReport {
  bool ordering_ok = true;
  bool sub_residual_ok = true;
  bool super_residual_ok = true;
  std::size_t first_ordering_failure = kNoIndex;
  std::size_t first_sub_failure = kNoIndex;
  std::size_t first_super_failure = kNoIndex;
  double max_sub_residual = -std::numeric_limits<double>::infinity();
  double min_super_residual = std::numeric_limits<double>::infinity();
  // min / max of y_n (1 + t_n^{alpha/gamma}).
  double c5 = 0.0;
  double c6 = 0.0;

  bool pass() const { return ordering_ok && sub_residual_ok && super_residual_ok; }
};

inline constexpr double kEnvelopeSlack = 1e-10;

// Checks u <= y <= v and the discrete sub/supersolution inequalities.
// Failures are reported, never thrown.
EnvelopeReport verify_envelope(const BoundEnvelope& envelope, const Trajectory& tr);

void write_envelope_csv(std::ostream& os, const BoundEnvelope& env, const Trajectory& tr);

}  // namespace cmfrac
