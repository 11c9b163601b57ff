#include "cmfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "cmfrac/error.hpp"

namespace cmfrac {

TimeMesh::TimeMesh(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("mesh needs at least one step");
  if (points_[0] != 0.0) throw InvalidArgument("mesh must start at t = 0");
  steps_.resize(points_.size() - 1);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || !(points_[i] > points_[i - 1]))
      throw InvalidArgument("mesh points must be finite and strictly increasing");
    steps_[i - 1] = points_[i] - points_[i - 1];
  }
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    const double q = steps_[i] / steps_[i - 1];
    ratio_bound_ = std::max({ratio_bound_, q, 1.0 / q});
  }
  // n*h meshes carry rounding noise in their steps
  if (ratio_bound_ - 1.0 <= 1e-12) ratio_bound_ = 1.0;
}

bool TimeMesh::is_uniform(double rtol) const {
  const double h = steps_[0];
  return std::all_of(steps_.begin(), steps_.end(),
                     [&](double s) { return std::abs(s - h) <= rtol * h; });
}

std::string TimeMesh::to_json() const {
  nlohmann::json j;
  j["points"] = points_;
  return j.dump();
}

TimeMesh TimeMesh::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("mesh json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
    throw InvalidArgument("mesh json: expected {\"points\": [...]}");
  return TimeMesh(j["points"].get<std::vector<double>>());
}

TimeMesh make_uniform(double h, std::size_t n_steps) {
  if (!(h > 0.0) || n_steps < 1)
    throw InvalidArgument("uniform mesh needs h > 0 and n_steps >= 1");
  std::vector<double> p(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) p[n] = static_cast<double>(n) * h;
  return TimeMesh(std::move(p));
}

TimeMesh make_graded(double final_time, std::size_t n_steps, double r) {
  if (!(final_time > 0.0) || n_steps < 1)
    throw InvalidArgument("graded mesh needs T > 0 and n_steps >= 1");
  if (!(r >= 1.0)) throw InvalidArgument("grading exponent must be >= 1");
  std::vector<double> p(n_steps + 1);
  const double N = static_cast<double>(n_steps);
  for (std::size_t n = 0; n <= n_steps; ++n)
    p[n] = final_time * std::pow(static_cast<double>(n) / N, r);
  p.back() = final_time;
  return TimeMesh(std::move(p));
}

TimeMesh make_perturbed(double h, std::size_t n_steps, double rho_max,
                        std::uint64_t seed) {
  if (!(h > 0.0) || n_steps < 1 || !(rho_max >= 0.0 && rho_max < 1.0))
    throw InvalidArgument("perturbed mesh needs h > 0, n_steps >= 1, 0 <= rho < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho(-rho_max, rho_max);
  std::vector<double> p(n_steps + 1, 0.0);
  for (std::size_t n = 1; n <= n_steps; ++n) p[n] = p[n - 1] + h * (1.0 + rho(rng));
  return TimeMesh(std::move(p));
}

TimeMesh insert_point(const TimeMesh& mesh, double t_star) {
  const auto pts = mesh.points();
  if (!(t_star > 0.0 && t_star < mesh.final_time()))
    throw OutOfRange("insert_point: t_star outside the mesh span");
  auto it = std::lower_bound(pts.begin(), pts.end(), t_star);
  const double tol = 1e-12 * mesh.final_time();
  if (std::abs(*it - t_star) <= tol || std::abs(*(it - 1) - t_star) <= tol)
    return mesh;
  std::vector<double> p(pts.begin(), it);
  p.push_back(t_star);
  p.insert(p.end(), it, pts.end());
  return TimeMesh(std::move(p));
}

TimeMesh ensure_point_in(const TimeMesh& mesh, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("ensure_point_in: empty bracket");
  const auto pts = mesh.points();
  auto it = std::lower_bound(pts.begin(), pts.end(), lo);
  if (it != pts.end() && *it <= hi) return mesh;
  return insert_point(mesh, 0.5 * (lo + hi));
}

std::size_t find_half_point(const TimeMesh& mesh, std::size_t n) {
  return find_half_point(mesh, n, mesh.ratio_bound());
}

std::size_t find_half_point(const TimeMesh& mesh, std::size_t n, double K) {
  if (n < 2) throw InvalidArgument("find_half_point needs n >= 2");
  if (n > mesh.num_steps()) throw OutOfRange("find_half_point: index beyond mesh");
  if (!(K >= 1.0) || !std::isfinite(K)) throw InvalidArgument("ratio bound must be finite and >= 1");
  const double tn = mesh.t(n);
  const double slack = 1e-12 * tn;
  const double lo = tn / (K + 2.0) - slack;
  const double hi = (K + 1.0) * tn / (K + 2.0) + slack;
  for (std::size_t j = 1; j < n; ++j) {
    const double tj = mesh.t(j);
    if (tj > hi) break;
    if (tj >= lo) return j;
  }
  throw InternalError("find_half_point: no mesh point in the half-point window; "
                      "mesh inconsistent with ratio bound");
}

}  // namespace cmfrac
