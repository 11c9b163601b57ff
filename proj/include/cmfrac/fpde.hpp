#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cmfrac/analysis.hpp"
#include "cmfrac/caputo.hpp"
#include "cmfrac/grid.hpp"

namespace cmfrac {

// Diffusion coefficient a(|grad u|^2) of div(a grad u).
class Nonlinearity {
 public:
  enum class Kind { PLaplace, MeanCurvature };

  static Nonlinearity p_laplace(double p, double eps = 1e-8);
  static Nonlinearity mean_curvature();

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double eps() const { return eps_; }
  // q = |grad u|^2
  double a(double q) const;
  double da_dq(double q) const;
  // J_{grad W} = 2 a'(q) grad W
  std::array<double, 2> j_grad(const std::array<double, 2>& g) const;
  // Decay exponent of the structural condition: p-1, or 1.
  double gamma() const;
  std::string name() const;

 private:
  Nonlinearity(Kind kind, double p, double eps) : kind_(kind), p_(p), eps_(eps) {}
  Kind kind_;
  double p_;
  double eps_;
};

// Full 3x3 local matrix of (dW, V) + beta (a grad dW + (J . grad W~) grad W~ ... , grad V)
// for the linearization at W~ on element e.
Eigen::Matrix3d element_matrix(const SpaceGrid& grid, std::size_t e,
                               const Nonlinearity& nl, double beta, const Field& w);

struct StepSystem {
  Eigen::SparseMatrix<double> matrix;  // interior dofs
  Eigen::VectorXd residual;            // R(W~); the update solves matrix * dW = -residual
};

// R(W) = (W + b, V) + beta (a(grad W) grad W, grad V) and its Newton tangent.
StepSystem assemble_step_system(const SpaceGrid& grid, const Nonlinearity& nl,
                                double beta, const Field& b, const Field& w);
Eigen::VectorXd step_residual(const SpaceGrid& grid, const Nonlinearity& nl,
                              double beta, const Field& b, const Field& w);

struct PicardOptions {
  std::size_t max_iterations = 50;
  double update_tol = 1e-10;
  double residual_tol = 1e-8;
  double linear_tol = 1e-12;
};

struct PicardResult {
  Field w;
  std::size_t iterations = 0;
  double residual = 0.0;  // relative
  std::vector<double> residual_history;
};

// Solves W - beta div(a grad W) = -b with zero Dirichlet data.
PicardResult picard_step(const SpaceGrid& grid, const Nonlinearity& nl, double beta,
                         const Field& b, const Field& guess,
                         const PicardOptions& opts = {});

struct FpdeOptions {
  double s = 2.0;
  std::vector<double> snapshot_times;
  bool check_energy = true;
  unsigned threads = 1;
  PicardOptions picard;
};

struct PdeTrajectory {
  std::string model;
  double alpha = 0.0;
  double gamma = 1.0;
  double s = 2.0;
  std::vector<double> times;
  std::vector<double> norms;  // V^n
  std::vector<std::size_t> picard_iterations;  // entry 0 unused
  std::vector<double> residuals;
  std::vector<double> min_values;
  std::vector<EnergyCheck> energy;  // entry n for step n >= 1
  std::size_t energy_failures = 0;
  std::vector<std::pair<double, Field>> snapshots;
  Field final_field;
};

PdeTrajectory solve_fpde(const SpaceGrid& grid, const Nonlinearity& nl,
                         std::shared_ptr<const DiscreteCaputo> op, const Field& u0,
                         const FpdeOptions& opts = {});

Field sine_field(const SpaceGrid& grid, double amplitude);

struct StructuralDiagnostic {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool conclusive = false;
};

// lhs = ||U||_s^{s-1+gamma}, rhs = (grad I(U^{s-1}), a grad U).
StructuralDiagnostic structural_diagnostic(const SpaceGrid& grid, const Field& u,
                                           const Nonlinearity& nl, double s);

// Energy check on grid fields: U^0..U^n, operator row n.
EnergyCheck energy_inequality_check(const SpaceGrid& grid, std::span<const Field> history,
                                    const DiscreteCaputo& op, double s);

// "n,t,V_n,picard_iters,residual"
void write_pde_csv(std::ostream& os, const PdeTrajectory& tr);
// "i,j,x1,x2,U"
void write_field_csv(std::ostream& os, const SpaceGrid& grid, const Field& u);

}  // namespace cmfrac
