#include "ta2s2/annealing.hpp"

#include <algorithm>
#include <cmath>

#include "ta2s2/error.hpp"

namespace ta2s2 {

namespace {

double inverse_temperature(double tau) { return std::isinf(tau) ? 0.0 : 1.0 / tau; }

// Normalised weights for an inverse-temperature increment delta_beta >= 0.
ImportanceWeights weights_for_increment(std::span<const double> H, double delta_beta) {
  const std::size_t N = H.size();
  std::vector<double> log_w(N, -std::numeric_limits<double>::infinity());
  double max_log_w = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < N; ++j) {
    if (!std::isfinite(H[j])) continue;
    log_w[j] = -H[j] * delta_beta;
    max_log_w = std::max(max_log_w, log_w[j]);
  }
  if (!std::isfinite(max_log_w)) throw DegenerateWeightsError("importance weights: every H is infinite");

  ImportanceWeights out;
  out.raw.resize(N);
  out.normalised.resize(N);
  double total = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    out.raw[j] = std::exp(log_w[j] - max_log_w);
    total += out.raw[j];
  }
  for (std::size_t j = 0; j < N; ++j) out.normalised[j] = out.raw[j] / total;
  return out;
}

}  // namespace

void WeightedSampleSet::set_uniform_weights() {
  const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  raw_weights.assign(points.size(), 1.0);
  norm_weights.assign(points.size(), w);
}

ImportanceWeights importance_weights(std::span<const double> H, double tau_prev, double tau_next) {
  if (!(tau_next > 0.0) || tau_next > tau_prev) throw DomainError("importance weights: need 0 < tau_next <= tau_prev");
  return weights_for_increment(H, inverse_temperature(tau_next) - inverse_temperature(tau_prev));
}

double effective_sample_size(std::span<const double> norm_weights) {
  double sum_sq = 0.0;
  for (double w : norm_weights) sum_sq += w * w;
  return 1.0 / sum_sq;
}

double ess_at_inverse_temperature(std::span<const double> H, double tau_prev, double beta_next) {
  return effective_sample_size(weights_for_increment(H, beta_next - inverse_temperature(tau_prev)).normalised);
}

double next_temperature(std::span<const double> H, double tau_prev, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("next_temperature: gamma must lie in (0, 1)");
  if (H.empty()) throw DomainError("next_temperature: empty sample");
  const double beta_prev = inverse_temperature(tau_prev);
  if (!(beta_prev < 1.0)) throw DomainError("next_temperature: previous temperature must exceed 1");

  const double target = gamma * static_cast<double>(H.size());
  if (ess_at_inverse_temperature(H, tau_prev, 1.0) >= target) return 1.0;
  if (ess_at_inverse_temperature(H, tau_prev, beta_prev) <= target)
    throw DegenerateWeightsError("next_temperature: effective sample size already below target");

  // ESS(lo) > target >= ESS(hi). Bisect down to round-off in beta.
  double lo = beta_prev;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ess_at_inverse_temperature(H, tau_prev, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double beta = lo > beta_prev ? lo : hi;
  return beta >= 1.0 ? 1.0 : 1.0 / beta;
}

}  // namespace ta2s2
