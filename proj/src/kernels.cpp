#include "cmfrac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cmfrac/error.hpp"
#include "cmfrac/format.hpp"
#include "cmfrac/mesh.hpp"

namespace cmfrac {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("fractional order alpha must lie in (0, 1)");
}

// (1+x)^b + (1-x)^b - 2 for 0 < x <= 1/2 and 0 < b < 1. Every term of the
// even binomial series is negative, so there is no cancellation.
double symmetric_second_difference(double b, double x) {
  double c = 1.0;  // C(b, m)
  double xm = 1.0;
  double sum = 0.0;
  for (int m = 1; m < 800; ++m) {
    c *= (b - (m - 1)) / m;
    xm *= x;
    if (m % 2 != 0) continue;
    const double term = c * xm;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return 2.0 * sum;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::GrunwaldLetnikov: return "gl";
    case Scheme::L1Uniform: return "l1";
  }
  return "?";
}

WeightSequence gl_weights(double alpha, std::size_t N) {
  check_alpha(alpha);
  if (N < 1) throw InvalidArgument("weight sequence length must be >= 1");
  WeightSequence w;
  w.alpha = alpha;
  w.scheme = Scheme::GrunwaldLetnikov;
  w.omega.resize(N + 1);
  w.delta.assign(N + 1, 0.0);
  w.omega[0] = 1.0;
  for (std::size_t k = 1; k <= N; ++k)
    w.omega[k] = (1.0 - (alpha + 1.0) / static_cast<double>(k)) * w.omega[k - 1];
  // sum_{k<n} omega_k is the (n-1)-th coefficient of (1-z)^{alpha-1}.
  double partial = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    if (n > 1) partial *= 1.0 - alpha / static_cast<double>(n - 1);
    w.delta[n] = -partial;
  }
  return w;
}

WeightSequence l1_uniform_weights(double alpha, std::size_t N) {
  check_alpha(alpha);
  if (N < 1) throw InvalidArgument("weight sequence length must be >= 1");
  const double b = 1.0 - alpha;
  const double g = std::tgamma(2.0 - alpha);
  WeightSequence w;
  w.alpha = alpha;
  w.scheme = Scheme::L1Uniform;
  w.omega.resize(N + 1);
  w.delta.assign(N + 1, 0.0);
  w.omega[0] = 1.0 / g;
  w.omega[1] = (std::pow(2.0, b) - 2.0) / g;
  for (std::size_t k = 2; k <= N; ++k) {
    const double kk = static_cast<double>(k);
    w.omega[k] = std::pow(kk, b) * symmetric_second_difference(b, 1.0 / kk) / g;
  }
  for (std::size_t n = 1; n <= N; ++n) {
    const double nn = static_cast<double>(n);
    // (n-1)^b - n^b = n^b ((1 - 1/n)^b - 1)
    w.delta[n] = std::pow(nn, b) * std::expm1(b * std::log1p(-1.0 / nn)) / g;
  }
  return w;
}

WeightSequence make_weights(Scheme scheme, double alpha, std::size_t N) {
  return scheme == Scheme::GrunwaldLetnikov ? gl_weights(alpha, N)
                                            : l1_uniform_weights(alpha, N);
}

void write_weights_csv(std::ostream& os, const WeightSequence& w) {
  os << "k,omega_k,delta_k\n";
  for (std::size_t k = 0; k <= w.length(); ++k) {
    os << k << ',' << format_double(w.omega[k]) << ',';
    if (k > 0) os << format_double(w.delta[k]);
    os << '\n';
  }
}

L1Row l1_nonuniform_coeffs(const TimeMesh& mesh, double alpha, std::size_t n) {
  check_alpha(alpha);
  if (n < 1 || n > mesh.num_steps()) throw OutOfRange("L1 row index outside mesh");
  const double b = 1.0 - alpha;
  const double tn = mesh.t(n);
  std::vector<double> d(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double tau = mesh.tau(n - k + 1);
    const double near = tn - mesh.t(n - k + 1);
    if (k == 1) {
      d[0] = std::pow(tau, -alpha);
    } else {
      // (near + tau)^b - near^b = near^b ((1 + tau/near)^b - 1)
      d[k - 1] = std::pow(near, b) * std::expm1(b * std::log1p(tau / near)) / tau;
    }
  }
  return L1Row(n, std::move(d));
}

std::vector<double> convolution_inverse(std::span<const double> omega, std::size_t N) {
  if (omega.empty() || omega[0] == 0.0)
    throw SingularInput("convolution inverse needs omega_0 != 0");
  std::vector<double> a(N + 1, 0.0);
  a[0] = 1.0 / omega[0];
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    const std::size_t kmax = std::min(n, omega.size() - 1);
    for (std::size_t k = 1; k <= kmax; ++k) s += omega[k] * a[n - k];
    a[n] = -s / omega[0];
  }
  return a;
}

CmReport check_cm(std::span<const double> a, std::size_t J, std::size_t N) {
  CmReport rep;
  rep.max_order = J;
  if (N >= a.size()) throw InvalidArgument("check_cm: N exceeds the sequence length");
  const std::size_t len = N + 1;
  std::vector<double> d(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(len));
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= J && !d.empty(); ++j) {
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d[k] < rep.min_value) {
        rep.min_value = d[k];
        rep.worst_order = j;
        rep.worst_index = k;
      }
    }
    for (std::size_t k = 0; k + 1 < d.size(); ++k) d[k] -= d[k + 1];
    d.pop_back();
  }
  rep.pass = rep.min_value >= -1e-10;
  return rep;
}

DecayConstants estimate_decay_constants(const WeightSequence& w) {
  const std::size_t N = w.length();
  if (N < 16) throw InvalidArgument("decay constant estimate needs N >= 16");
  const double a = w.alpha;
  DecayConstants c{std::numeric_limits<double>::infinity(), 0.0};
  double partial = 0.0;  // sum_{k<n} omega_k, equal to sum_{k>=n} |omega_k|
  for (std::size_t n = 1; n <= N; ++n) {
    partial += w.omega[n - 1];
    const double nn = static_cast<double>(n);
    const double q1 = std::pow(nn, 1.0 + a) * std::abs(w.omega[n]);
    const double q2 = std::pow(nn, a) * std::abs(w.delta[n]);
    const double q3 = std::pow(nn, a) * std::abs(partial);
    c.c4 = std::max({c.c4, q1, q2, q3});
    if (2 * n >= N) c.c3 = std::min({c.c3, q1, q2, q3});
  }
  return c;
}

std::vector<double> consistency_check(const WeightSequence& w,
                                      std::span<const double> h_list) {
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw InvalidArgument("step sizes must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw InvalidArgument("step sizes must be strictly decreasing");
  }
  std::vector<double> out;
  out.reserve(h_list.size());
  for (double h : h_list) {
    const auto n_terms = static_cast<std::size_t>(std::ceil(50.0 / h));
    const WeightSequence local =
        w.length() >= n_terms ? w : make_weights(w.scheme, w.alpha, n_terms);
    const double z = std::exp(-h);
    double f = 0.0;
    for (std::size_t k = n_terms + 1; k-- > 0;) f = f * z + local.omega[k];
    out.push_back(std::abs(std::pow(h, w.alpha) / f - 1.0));
  }
  return out;
}

}  // namespace cmfrac
