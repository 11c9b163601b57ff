#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmfrac/caputo.hpp"

namespace cmfrac {

// D^alpha y = -lambda y^gamma, y(0) = y0.
struct FodeProblem {
  double alpha = 0.5;
  double lambda = 1.0;
  double gamma = 1.0;
  double y0 = 1.0;

  void validate() const;
};

struct Trajectory {
  FodeProblem problem;
  std::shared_ptr<const DiscreteCaputo> op;
  std::vector<double> y;
  std::vector<std::string> warnings;

  const TimeMesh& mesh() const { return op->mesh(); }
};

// Unique positive root of c y + lambda y^gamma = rhs (c, lambda, rhs > 0) by
// Newton's method safeguarded with the bracket [0, rhs/c].
double solve_implicit_scalar(double c, double lambda, double gamma, double rhs,
                             double guess);

// Next value y_n given y_0..y_{n-1} (n = history.size()).
double step(const FodeProblem& problem, const DiscreteCaputo& op,
            std::span<const double> history);
double step_uniform(const FodeProblem& problem, const WeightSequence& w, double h,
                    std::span<const double> history);
double step_l1_nonuniform(const FodeProblem& problem, const L1Row& row,
                          std::span<const double> history);

// Runs all steps of the operator's mesh. With `h0` set, a uniform step above
// it is recorded as a warning.
Trajectory solve(const FodeProblem& problem, std::shared_ptr<const DiscreteCaputo> op,
                 std::optional<double> h0 = std::nullopt);
// GL needs a uniform mesh; L1 uses the weight form on uniform meshes and the
// d_{n,k} form otherwise.
Trajectory solve(const FodeProblem& problem, Scheme scheme, const TimeMesh& mesh);

// Derivative at index n evaluated in both algebraic forms; throws
// InternalError if they disagree beyond 1e-11 (relative to the row scale).
double apply_derivative(const DiscreteCaputo& op, std::span<const double> v,
                        std::size_t n);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace cmfrac
