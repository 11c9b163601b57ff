#include "cmfrac/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cmfrac/error.hpp"
#include "cmfrac/format.hpp"

namespace cmfrac {

double decay_index(std::span<const double> t, std::span<const double> y,
                   std::size_t n, std::size_t k) {
  if (k < 1 || k > n || n >= t.size() || n >= y.size())
    throw InvalidArgument("decay_index: offset outside history");
  if (!(t[n - k] > 1.0)) throw InvalidArgument("decay_index needs t_{n-k} > 1");
  const double a = std::abs(y[n]);
  const double b = std::abs(y[n - k]);
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("decay_index needs nonzero finite values");
  return -std::log(a / b) / std::log(t[n] / t[n - k]);
}

double averaged_index(std::span<const double> t, std::span<const double> y,
                      std::size_t n, std::span<const std::size_t> offsets) {
  if (offsets.empty()) throw InvalidArgument("averaged_index: no offsets");
  double s = 0.0;
  for (std::size_t k : offsets) s += decay_index(t, y, n, k);
  return s / static_cast<double>(offsets.size());
}

double averaged_index(std::span<const double> t, std::span<const double> y,
                      std::size_t n) {
  static constexpr std::array<std::size_t, 5> kOffsets{2, 4, 6, 8, 10};
  return averaged_index(t, y, n, kOffsets);
}

std::size_t nearest_index(std::span<const double> t, double time) {
  if (t.empty()) throw InvalidArgument("empty time list");
  auto it = std::lower_bound(t.begin(), t.end(), time);
  if (it == t.end()) return t.size() - 1;
  if (it != t.begin() && time - *(it - 1) < *it - time) --it;
  return static_cast<std::size_t>(it - t.begin());
}

DecayReport decay_report(std::span<const double> t, std::span<const double> y,
                         std::span<const double> observation_times,
                         std::span<const std::size_t> offsets, double rate,
                         std::size_t value_lag) {
  DecayReport rep;
  rep.rate = rate;
  rep.offsets.assign(offsets.begin(), offsets.end());
  rep.averaged = offsets.size() > 1;
  rep.value_lag = value_lag;
  const std::size_t kmax = offsets.empty() ? 0 : *std::max_element(offsets.begin(), offsets.end());
  for (double obs : observation_times) {
    const std::size_t n = nearest_index(t, obs);
    if (std::abs(t[n] - obs) > 1e-9 * std::max(1.0, obs))
      throw InvalidArgument("observation time " + format_double(obs) + " is not a mesh point");
    if (n < value_lag + kmax) throw InvalidArgument("insufficient history for decay index");
    double q = 0.0;
    for (std::size_t k : offsets) {
      const double a = std::abs(y[n - value_lag]);
      const double b = std::abs(y[n - value_lag - k]);
      if (!(t[n - k] > 1.0)) throw InvalidArgument("decay_index needs t_{n-k} > 1");
      if (!(a > 0.0) || !(b > 0.0))
        throw InvalidArgument("decay_index needs nonzero values");
      q += -std::log(a / b) / std::log(t[n] / t[n - k]);
    }
    rep.times.push_back(t[n]);
    rep.observed.push_back(q / static_cast<double>(offsets.size()));
  }
  return rep;
}

void write_decay_csv(std::ostream& os, const DecayReport& rep) {
  os << "t,q_observed,q_theoretical\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    os << format_double(rep.times[i]) << ',' << format_double(rep.observed[i]) << ','
       << format_double(rep.rate) << '\n';
  const double mean =
      rep.observed.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : std::accumulate(rep.observed.begin(), rep.observed.end(), 0.0) /
                static_cast<double>(rep.observed.size());
  os << "mean," << format_double(mean) << ',' << format_double(rep.rate) << '\n';
}

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (z > 0.0) throw DomainError("mittag_leffler: only z <= 0 is supported");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  const double x = -z;
  if (x <= 1.0) {
    // sum (-x)^k / Gamma(alpha k + 1), compensated.
    double s = 0.0, comp = 0.0;
    const double lx = std::log(x);
    for (int k = 0; k < 2000; ++k) {
      const double mag = std::exp(k * lx - std::lgamma(alpha * k + 1.0));
      const double term = (k % 2 == 0) ? mag : -mag;
      const double t = s + term;
      comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
      s = t;
      if (k > 4 && mag < 1e-18 * std::abs(s)) break;
    }
    return s + comp;
  }
  // E(-x) = sin(a pi)/(a pi) int_0^inf exp(-r^{1/a}) x / (r^2 + 2 r x cos(a pi) + x^2) dr
  const double pa = std::numbers::pi * alpha;
  const double c = std::cos(pa);
  const auto f = [&](double r) {
    return std::exp(-std::pow(r, 1.0 / alpha)) * x / (r * r + 2.0 * r * x * c + x * x);
  };
  // exp(-r^{1/alpha}) < e^{-45} beyond r_max; split where the denominator peaks.
  const double r_max = std::pow(45.0, alpha);
  const double r_peak = -x * c;
  boost::math::quadrature::tanh_sinh<double> ts;
  double v = 0.0;
  if (r_peak > 0.0 && r_peak < r_max)
    v = ts.integrate(f, 0.0, r_peak, 1e-13) + ts.integrate(f, r_peak, r_max, 1e-13);
  else
    v = ts.integrate(f, 0.0, r_max, 1e-13);
  return std::sin(pa) / pa * v;
}

namespace {

double discrete_norm(std::span<const double> w, std::span<const double> u, double s) {
  double acc = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * std::pow(std::abs(u[q]), s);
  return std::pow(acc, 1.0 / s);
}

}  // namespace

EnergyCheck energy_inequality_from_parts(std::span<const double> weights,
                                         std::span<const double> current,
                                         std::span<const double> derivative,
                                         std::span<const double> norms,
                                         const DiscreteCaputo& op, double s) {
  if (!(s > 1.0)) throw InvalidArgument("energy check needs s > 1");
  if (current.size() != weights.size() || derivative.size() != weights.size())
    throw InvalidArgument("energy check: mismatched quadrature sizes");
  const std::size_t n = norms.size() - 1;
  EnergyCheck ec;
  ec.lhs = std::pow(norms[n], s - 1.0) * op.apply(norms, n);
  for (std::size_t q = 0; q < weights.size(); ++q) {
    const double u = current[q];
    const double us = s == 2.0 ? u : std::copysign(std::pow(std::abs(u), s - 1.0), u);
    ec.rhs += weights[q] * us * derivative[q];
  }
  const double scale = std::max({std::abs(ec.lhs), std::abs(ec.rhs), 1.0});
  ec.pass = ec.lhs <= ec.rhs + 1e-9 * scale;
  return ec;
}

EnergyCheck energy_inequality_check(std::span<const double> weights,
                                    std::span<const std::vector<double>> samples,
                                    const DiscreteCaputo& op, double s) {
  if (samples.size() < 2) throw InvalidArgument("energy check needs U^0 and U^n");
  const std::size_t n = samples.size() - 1;
  std::vector<double> norms(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (samples[k].size() != weights.size())
      throw InvalidArgument("energy check: mismatched grids");
    for (double v : samples[k])
      if (v < 0.0) throw InvalidArgument("energy check needs nonnegative fields");
    norms[k] = discrete_norm(weights, samples[k], s);
  }
  const DiscreteCaputo::Row row = op.row(n);
  std::vector<double> deriv(weights.size());
  for (std::size_t q = 0; q < weights.size(); ++q) {
    double d = row.diag * samples[n][q];
    for (std::size_t j = 0; j < n; ++j) d += row.history[j] * samples[j][q];
    deriv[q] = d;
  }
  return energy_inequality_from_parts(weights, samples[n], deriv, norms, op, s);
}

}  // namespace cmfrac
