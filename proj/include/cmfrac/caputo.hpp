#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cmfrac/kernels.hpp"
#include "cmfrac/mesh.hpp"

namespace cmfrac {

// A discrete Caputo derivative on a fixed mesh. Every row has the form
//   (D v)_n = diag(n) v_n + sum_{j<n} history_j v_j,
// either from uniform convolution weights or from nonuniform L1 coefficients.
class DiscreteCaputo {
 public:
  enum class Kind { UniformWeights, L1Mesh };

  // Uniform mesh t_n = n h with n_steps steps (weights.length() if omitted).
  static DiscreteCaputo uniform(WeightSequence weights, double h);
  static DiscreteCaputo uniform(WeightSequence weights, double h, std::size_t n_steps);
  // L1 scheme on an arbitrary mesh.
  static DiscreteCaputo l1(TimeMesh mesh, double alpha);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const TimeMesh& mesh() const { return mesh_; }
  std::size_t max_index() const { return mesh_.num_steps(); }
  // Only for Kind::UniformWeights.
  const WeightSequence& weights() const { return *weights_; }
  double h() const { return h_; }

  struct Row {
    double diag = 0.0;
    std::vector<double> history;  // coefficients of v_0 .. v_{n-1}
  };
  Row row(std::size_t n) const;
  double diag(std::size_t n) const;

  // omega/delta (or d_{n,k}) form.
  double apply(std::span<const double> v, std::size_t n) const;
  // Sum of delta_k (v_{n-k} - v_{n-k+1}), resp. d_{n,k} (v_{n-k+1} - v_{n-k}).
  double apply_difference_form(std::span<const double> v, std::size_t n) const;
  // sum of |coefficient * v_j| over the row; the natural rounding scale.
  double magnitude(std::span<const double> v, std::size_t n) const;

 private:
  DiscreteCaputo(Kind kind, double alpha, TimeMesh mesh)
      : kind_(kind), alpha_(alpha), mesh_(std::move(mesh)) {}
  void check_index(std::span<const double> v, std::size_t n) const;

  Kind kind_;
  double alpha_;
  TimeMesh mesh_;
  std::optional<WeightSequence> weights_;
  double h_ = 0.0;
  double h_pow_ = 1.0;    // h^{-alpha}
  double inv_gamma_ = 1.0;  // 1 / Gamma(2 - alpha)
};

}  // namespace cmfrac
