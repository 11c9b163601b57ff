#include "cmfrac/caputo.hpp"

#include <cmath>

#include "cmfrac/error.hpp"

namespace cmfrac {

DiscreteCaputo DiscreteCaputo::uniform(WeightSequence weights, double h) {
  const std::size_t n = weights.length();
  return uniform(std::move(weights), h, n);
}

DiscreteCaputo DiscreteCaputo::uniform(WeightSequence weights, double h,
                                       std::size_t n_steps) {
  if (weights.length() < n_steps)
    throw InvalidArgument("weight sequence shorter than the number of steps");
  const double alpha = weights.alpha;
  DiscreteCaputo op(Kind::UniformWeights, alpha, make_uniform(h, n_steps));
  op.h_ = h;
  op.h_pow_ = std::pow(h, -alpha);
  op.weights_ = std::move(weights);
  return op;
}

DiscreteCaputo DiscreteCaputo::l1(TimeMesh mesh, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("fractional order alpha must lie in (0, 1)");
  DiscreteCaputo op(Kind::L1Mesh, alpha, std::move(mesh));
  op.inv_gamma_ = 1.0 / std::tgamma(2.0 - alpha);
  return op;
}

void DiscreteCaputo::check_index(std::span<const double> v, std::size_t n) const {
  if (n < 1 || n > max_index()) throw OutOfRange("derivative index outside mesh");
  if (v.size() <= n) throw InvalidArgument("sequence shorter than derivative index");
}

double DiscreteCaputo::diag(std::size_t n) const {
  if (kind_ == Kind::UniformWeights) return h_pow_ * weights_->omega[0];
  return inv_gamma_ * std::pow(mesh_.tau(n), -alpha_);
}

DiscreteCaputo::Row DiscreteCaputo::row(std::size_t n) const {
  if (n < 1 || n > max_index()) throw OutOfRange("derivative index outside mesh");
  Row r;
  r.history.resize(n);
  if (kind_ == Kind::UniformWeights) {
    const auto& w = *weights_;
    r.diag = h_pow_ * w.omega[0];
    r.history[0] = h_pow_ * w.delta[n];
    for (std::size_t j = 1; j < n; ++j) r.history[j] = h_pow_ * w.omega[n - j];
  } else {
    const L1Row d = l1_nonuniform_coeffs(mesh_, alpha_, n);
    r.diag = inv_gamma_ * d(1);
    r.history[0] = -inv_gamma_ * d(n);
    for (std::size_t k = 1; k < n; ++k)
      r.history[n - k] = inv_gamma_ * (d(k + 1) - d(k));
  }
  return r;
}

double DiscreteCaputo::apply(std::span<const double> v, std::size_t n) const {
  check_index(v, n);
  if (kind_ == Kind::UniformWeights) {
    const auto& w = *weights_;
    double s = w.delta[n] * v[0];
    for (std::size_t k = n; k-- > 1;) s += w.omega[k] * v[n - k];
    s += w.omega[0] * v[n];
    return h_pow_ * s;
  }
  const L1Row d = l1_nonuniform_coeffs(mesh_, alpha_, n);
  double s = -d(n) * v[0];
  for (std::size_t k = n - 1; k >= 1; --k) s += v[n - k] * (d(k + 1) - d(k));
  s += d(1) * v[n];
  return inv_gamma_ * s;
}

double DiscreteCaputo::apply_difference_form(std::span<const double> v,
                                             std::size_t n) const {
  check_index(v, n);
  double s = 0.0;
  if (kind_ == Kind::UniformWeights) {
    const auto& w = *weights_;
    for (std::size_t k = n; k >= 1; --k) s += w.delta[k] * (v[n - k] - v[n - k + 1]);
    return h_pow_ * s;
  }
  const L1Row d = l1_nonuniform_coeffs(mesh_, alpha_, n);
  for (std::size_t k = n; k >= 1; --k) s += d(k) * (v[n - k + 1] - v[n - k]);
  return inv_gamma_ * s;
}

double DiscreteCaputo::magnitude(std::span<const double> v, std::size_t n) const {
  const Row r = row(n);
  double m = std::abs(r.diag * v[n]);
  for (std::size_t j = 0; j < n; ++j) m += std::abs(r.history[j] * v[j]);
  return m;
}

}  // namespace cmfrac
