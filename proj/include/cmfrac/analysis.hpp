#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmfrac/caputo.hpp"

namespace cmfrac {

// q = -ln(|y_n| / |y_{n-k}|) / ln(t_n / t_{n-k}); needs t_{n-k} > 1.
double decay_index(std::span<const double> t, std::span<const double> y,
                   std::size_t n, std::size_t k);

// Mean of decay_index over the offsets (default 2, 4, 6, 8, 10).
double averaged_index(std::span<const double> t, std::span<const double> y,
                      std::size_t n, std::span<const std::size_t> offsets);
double averaged_index(std::span<const double> t, std::span<const double> y,
                      std::size_t n);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> observed;
  double rate = 0.0;  // alpha / gamma
  std::vector<std::size_t> offsets;
  bool averaged = false;
  // Values are read `value_lag` indices before the time they're reported at.
  std::size_t value_lag = 0;
};

// Index of the mesh point nearest to t.
std::size_t nearest_index(std::span<const double> t, double time);

// Evaluates the (averaged) index at each observation time. With value_lag = l
// the sample y_{n-l} is paired with t_n, which reproduces tabulations whose
// value array is one-based while the time array is zero-based (l = 1).
DecayReport decay_report(std::span<const double> t, std::span<const double> y,
                         std::span<const double> observation_times,
                         std::span<const std::size_t> offsets, double rate,
                         std::size_t value_lag = 0);

// Rows "t,q_observed,q_theoretical" and a final "mean" row.
void write_decay_csv(std::ostream& os, const DecayReport& rep);

// E_{alpha,1}(z) for z <= 0 and 0 < alpha <= 1. Power series for |z| <= 1,
// otherwise the real-line integral representation.
double mittag_leffler(double alpha, double z);

struct EnergyCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

// lhs = (V^n)^{s-1} D(V)_n with V^k the discrete L^s norm of U^k, and
// rhs = sum_q w_q (U^n_q)^{s-1} D(U_q)_n. `samples[k]` holds U^k at the
// quadrature points, `weights` the quadrature weights; n = samples.size()-1.
EnergyCheck energy_inequality_check(std::span<const double> weights,
                                    std::span<const std::vector<double>> samples,
                                    const DiscreteCaputo& op, double s);

// Same inequality given precomputed norms V^0..V^n and the pointwise
// derivative D(U)_n at the quadrature points.
EnergyCheck energy_inequality_from_parts(std::span<const double> weights,
                                         std::span<const double> current,
                                         std::span<const double> derivative,
                                         std::span<const double> norms,
                                         const DiscreteCaputo& op, double s);

}  // namespace cmfrac
