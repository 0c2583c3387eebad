#include "ta2s2/predict_score.hpp"

#include <cmath>
#include <numbers>

#include "ta2s2/error.hpp"

namespace ta2s2 {

namespace {

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

void PredictiveMixture::validate() const {
  if (weights.empty()) throw DomainError("mixture: no components");
  if (means.size() != weights.size() || variances.size() != weights.size())
    throw DomainError("mixture: component arrays differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw DomainError("mixture: negative weight");
    if (!(variances[i] >= 0.0)) throw DomainError("mixture: negative variance");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(weights.size()) + 1e-12)
    throw DomainError("mixture: weights do not sum to 1");
}

PredictiveMixture PredictiveMixture::single(double mu, double s2) { return {{1.0}, {mu}, {s2}}; }

MixtureMoments mixture_moments(const PredictiveMixture& mix) {
  mix.validate();
  MixtureMoments m;
  for (std::size_t i = 0; i < mix.size(); ++i) m.mu += mix.weights[i] * mix.means[i];
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double d = mix.means[i] - m.mu;
    m.s2 += mix.weights[i] * (d * d + mix.variances[i]);
  }
  return m;
}

double mixture_cov(std::span<const double> weights, std::span<const double> means_x, std::span<const double> means_w,
                   std::span<const double> sample_cov) {
  const std::size_t n = weights.size();
  if (means_x.size() != n || means_w.size() != n || sample_cov.size() != n)
    throw DomainError("mixture_cov: inputs differ in size");
  double mu_x = 0.0;
  double mu_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu_x += weights[i] * means_x[i];
    mu_w += weights[i] * means_w[i];
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) cov += weights[i] * ((means_x[i] - mu_x) * (means_w[i] - mu_w) + sample_cov[i]);
  return cov;
}

double crps_A(double mu, double sigma2) {
  if (sigma2 < 0.0) throw DomainError("crps_A: negative variance");
  if (sigma2 == 0.0) return std::abs(mu);
  const double sigma = std::sqrt(sigma2);
  const double t = mu / sigma;
  return 2.0 * sigma * std_normal_pdf(t) + mu * (2.0 * std_normal_cdf(t) - 1.0);
}

double crps_mixture(const PredictiveMixture& mix, double x) {
  mix.validate();
  const std::size_t n = mix.size();
  double fit = 0.0;
  double spread = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    fit += mix.weights[m] * crps_A(x - mix.means[m], mix.variances[m]);
    spread += mix.weights[m] * mix.weights[m] * crps_A(0.0, 2.0 * mix.variances[m]);
    for (std::size_t k = m + 1; k < n; ++k) {
      spread += 2.0 * mix.weights[m] * mix.weights[k] *
                crps_A(mix.means[m] - mix.means[k], mix.variances[m] + mix.variances[k]);
    }
  }
  return std::max(0.0, fit - 0.5 * spread);
}

std::size_t map_index(std::span<const double> H) {
  if (H.empty()) throw DomainError("map_estimate: empty sample");
  std::size_t best = 0;
  for (std::size_t i = 1; i < H.size(); ++i) {
    if (H[i] < H[best]) best = i;
  }
  return best;
}

HyperParamPoint map_estimate(const WeightedSampleSet& samples) {
  return HyperParamPoint::from_vector(samples.points[map_index(samples.H)]);
}

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw DomainError("rmse: length mismatch");
  if (predictions.empty()) throw DomainError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

MixturePredictor::MixturePredictor(const TrainingSet& ts, const WeightedSampleSet& samples, const KernelConfig& cfg) {
  if (samples.size() == 0) throw DomainError("mixture predictor: no samples");
  const bool weighted = samples.norm_weights.size() == samples.size();
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      fits_.emplace_back(ts, HyperParamPoint::from_vector(samples.points[i]), cfg);
    } catch (const FactorisationError&) {
      ++dropped_;
      continue;
    }
    const double w = weighted ? samples.norm_weights[i] : 1.0;
    weights_.push_back(w);
    total += w;
  }
  if (fits_.empty() || !(total > 0.0)) throw EvaluationError("mixture predictor: no usable samples");
  for (auto& w : weights_) w /= total;
}

PredictiveMixture MixturePredictor::predict(const Eigen::Ref<const Vector>& xq) const {
  PredictiveMixture mix;
  mix.weights = weights_;
  mix.means.reserve(fits_.size());
  mix.variances.reserve(fits_.size());
  for (const auto& fit : fits_) {
    const auto m = fit.predict(xq);
    mix.means.push_back(m.mu);
    mix.variances.push_back(m.s2);
  }
  return mix;
}

double MixturePredictor::covariance(const Eigen::Ref<const Vector>& xq, const Eigen::Ref<const Vector>& wq) const {
  std::vector<double> mx, mw, cov;
  for (const auto& fit : fits_) {
    mx.push_back(fit.mean(xq));
    mw.push_back(fit.mean(wq));
    cov.push_back(fit.cross_covariance(xq, wq));
  }
  return mixture_cov(weights_, mx, mw, cov);
}

}  // namespace ta2s2
