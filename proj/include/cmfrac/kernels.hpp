#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace cmfrac {

enum class Scheme { GrunwaldLetnikov, L1Uniform };

const char* scheme_name(Scheme s);

// Convolution weights omega_0..omega_N of a uniform-mesh scheme
//   D_h v_n = h^{-alpha} (sum_{k<n} omega_k v_{n-k} + delta_n v_0)
// together with delta_n = -sum_{k<n} omega_k (delta[0] is unused and 0).
struct WeightSequence {
  double alpha = 0.5;
  Scheme scheme = Scheme::GrunwaldLetnikov;
  std::vector<double> omega;
  std::vector<double> delta;

  std::size_t length() const { return omega.empty() ? 0 : omega.size() - 1; }
};

// omega_0 = 1, omega_k = (1 - (alpha+1)/k) omega_{k-1}. delta_n is obtained
// from the product recurrence of (1-z)^{alpha-1} rather than partial sums.
WeightSequence gl_weights(double alpha, std::size_t N);

// Uniform L1 weights. Second differences of k^{1-alpha} are summed as a
// same-signed binomial series, so large k does not lose digits.
WeightSequence l1_uniform_weights(double alpha, std::size_t N);

WeightSequence make_weights(Scheme scheme, double alpha, std::size_t N);

void write_weights_csv(std::ostream& os, const WeightSequence& w);

// Row n of the nonuniform L1 coefficients; d(k) for k = 1..n.
class L1Row {
 public:
  L1Row(std::size_t n, std::vector<double> d) : n_(n), d_(std::move(d)) {}
  std::size_t n() const { return n_; }
  double operator()(std::size_t k) const { return d_[k - 1]; }
  std::span<const double> values() const { return d_; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

class TimeMesh;

// d_{n,k} = ((t_n - t_{n-k})^{1-a} - (t_n - t_{n-k+1})^{1-a}) / tau_{n-k+1}.
L1Row l1_nonuniform_coeffs(const TimeMesh& mesh, double alpha, std::size_t n);

// a with (omega * a)_n = [n == 0] for n <= N.
std::vector<double> convolution_inverse(std::span<const double> omega, std::size_t N);

struct CmReport {
  std::size_t max_order = 0;
  double min_value = 0.0;
  bool pass = true;
  // Order / index of the most negative entry.
  std::size_t worst_order = 0;
  std::size_t worst_index = 0;
};

// Iterated backward differences ((I - E)^j a)_k for j <= J over a[0..N].
CmReport check_cm(std::span<const double> a, std::size_t J, std::size_t N);

struct DecayConstants {
  double c3 = 0.0;
  double c4 = 0.0;
};

// Empirical two-sided bounds for n^{1+a}|omega_n|, n^a|delta_n| and
// n^a sum_{k>=n}|omega_k|: c3 is the minimum over n in [N/2, N], c4 the
// maximum over n in [1, N]. Requires N >= 16.
DecayConstants estimate_decay_constants(const WeightSequence& w);

// |h^alpha F_a(e^{-h}) - 1| for each h, with a the convolution inverse of the
// scheme's weights. Uses F_a = 1/F_omega with omega truncated at 50/h.
std::vector<double> consistency_check(const WeightSequence& w,
                                      std::span<const double> h_list);

}  // namespace cmfrac
