#ifndef TA2S2_PREDICT_SCORE_HPP_
#define TA2S2_PREDICT_SCORE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "ta2s2/annealing.hpp"
#include "ta2s2/gp_core.hpp"

namespace ta2s2 {

/// Predictive distribution at one query point: a weighted mixture of
/// Gaussians, one component per hyper-parameter sample.
struct PredictiveMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t size() const { return weights.size(); }
  // Throws DomainError on size mismatch, negative variances or weights not summing to 1.
  void validate() const;

  static PredictiveMixture single(double mu, double s2);
};

struct MixtureMoments {
  double mu = 0.0;
  double s2 = 0.0;
};

// mu = sum w_i mu_i; s2 = sum w_i ((mu_i - mu)^2 + s2_i)
MixtureMoments mixture_moments(const PredictiveMixture& mix);

// Covariance of the mixture between two query points:
// sum w_i [(mu_i(x) - mu(x)) (mu_i(x') - mu(x')) + cov_i(x, x')].
double mixture_cov(std::span<const double> weights, std::span<const double> means_x,
                   std::span<const double> means_w, std::span<const double> sample_cov);

// A(mu, sigma^2) = 2 sigma phi(mu / sigma) + mu (2 Phi(mu / sigma) - 1); A(mu, 0) = |mu|.
double crps_A(double mu, double sigma2);

// Closed-form CRPS of a Gaussian mixture at observation x.
double crps_mixture(const PredictiveMixture& mix, double x);

// Sample with the smallest H; ties go to the lowest index.
std::size_t map_index(std::span<const double> H);
HyperParamPoint map_estimate(const WeightedSampleSet& samples);

double rmse(std::span<const double> predictions, std::span<const double> truths);

/// Mixture predictor built from hyper-parameter samples. Each sample's GP
/// is factorised once; samples whose factorisation fails are dropped and
/// the remaining weights renormalised.
class MixturePredictor {
 public:
  MixturePredictor(const TrainingSet& ts, const WeightedSampleSet& samples, const KernelConfig& cfg = {});

  PredictiveMixture predict(const Eigen::Ref<const Vector>& xq) const;
  // Covariance between two query points, per sample then mixed.
  double covariance(const Eigen::Ref<const Vector>& xq, const Eigen::Ref<const Vector>& wq) const;

  std::size_t components() const { return fits_.size(); }
  std::size_t dropped() const { return dropped_; }

 private:
  std::vector<GpFit> fits_;
  std::vector<double> weights_;
  std::size_t dropped_ = 0;
};

}  // namespace ta2s2

#endif  // TA2S2_PREDICT_SCORE_HPP_
