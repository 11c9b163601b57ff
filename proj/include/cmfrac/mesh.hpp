#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cmfrac {

// Strictly increasing time points 0 = t_0 < t_1 < ... < t_N. Immutable.
class TimeMesh {
 public:
  explicit TimeMesh(std::vector<double> points);

  std::span<const double> points() const { return points_; }
  // steps()[i] is tau_{i+1} = t_{i+1} - t_i.
  std::span<const double> steps() const { return steps_; }

  double t(std::size_t n) const { return points_[n]; }
  // tau_n for n >= 1.
  double tau(std::size_t n) const { return steps_[n - 1]; }

  std::size_t num_steps() const { return steps_.size(); }
  std::size_t size() const { return points_.size(); }
  double final_time() const { return points_.back(); }

  // Smallest K >= 1 bounding every adjacent step ratio in both directions.
  double ratio_bound() const { return ratio_bound_; }

  // True when every step equals the first to relative tolerance `rtol`.
  bool is_uniform(double rtol = 1e-12) const;

  std::string to_json() const;
  static TimeMesh from_json(const std::string& text);

  bool operator==(const TimeMesh& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
  std::vector<double> steps_;
  double ratio_bound_ = 1.0;
};

TimeMesh make_uniform(double h, std::size_t n_steps);

// t_n = T (n / n_steps)^r.
TimeMesh make_graded(double final_time, std::size_t n_steps, double r);

// tau_n = h (1 + rho_n) with rho_n ~ U[-rho_max, rho_max]; rho_max < 1.
TimeMesh make_perturbed(double h, std::size_t n_steps, double rho_max,
                        std::uint64_t seed);

// Returns `mesh` with t_star added. A point within 1e-12 (relative) of an
// existing point leaves the mesh unchanged.
TimeMesh insert_point(const TimeMesh& mesh, double t_star);

// Guarantees some mesh point lies in [lo, hi], inserting the midpoint if
// none does.
TimeMesh ensure_point_in(const TimeMesh& mesh, double lo, double hi);

// Smallest n* with t_n/(K+2) <= t_{n*} <= (K+1) t_n/(K+2). K defaults to the
// mesh's own ratio bound.
std::size_t find_half_point(const TimeMesh& mesh, std::size_t n);
std::size_t find_half_point(const TimeMesh& mesh, std::size_t n, double K);

}  // namespace cmfrac
