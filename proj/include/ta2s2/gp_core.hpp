#ifndef TA2S2_GP_CORE_HPP_
#define TA2S2_GP_CORE_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <functional>
#include <utility>

namespace ta2s2 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Training runs D = (X, y). Inputs are expected in the unit hypercube.
struct TrainingSet {
  Matrix X;  // n x p
  Vector y;  // n

  TrainingSet() = default;
  TrainingSet(Matrix inputs, Vector outputs);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  // Throws DomainError unless n >= 2, p >= 1 and all values are finite.
  void validate() const;
};

/// Sampler state for a GP: p log length-scales and the unconstrained
/// nugget auxiliary. As a flat vector the nugget auxiliary is the last entry.
struct HyperParamPoint {
  Vector log_phi;
  double z_delta = 0.0;

  Eigen::Index p() const { return log_phi.size(); }
  Vector phi() const { return log_phi.array().exp(); }

  Vector to_vector() const;
  static HyperParamPoint from_vector(const Vector& v);
};

enum class ExponentConvention {
  paper_n_minus_p,  // (sigma^2)^{-(n-p)/2}
  n_minus_one,      // (sigma^2)^{-(n-1)/2}
};

struct KernelConfig {
  double lower_bound = 1e-12;
  int jitter_max_attempts = 3;
  ExponentConvention exponent_convention = ExponentConvention::paper_n_minus_p;

  void validate() const;
};

enum class PriorKind {
  uniform_log_space,  // flat in log_phi on a box
  exponential,        // exponential on phi (natural scale)
  custom,
};

struct PriorSpec {
  PriorKind kind = PriorKind::uniform_log_space;
  double box_lower = -7.0;
  double box_upper = 7.0;
  double exponential_mean = 5.0;
  // Log density of the length-scale part in log_phi coordinates (custom only).
  std::function<double(const HyperParamPoint&)> custom;

  static PriorSpec uniform_log_space(double lower = -7.0, double upper = 7.0);
  static PriorSpec exponential(double mean = 5.0);
};

// exp(-1/2 sum_i (x_i - x2_i)^2 / phi_i)
double sq_exp_corr(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                   const Eigen::Ref<const Vector>& phi);

// Sigmoid map from the nugget auxiliary onto (l_b, 1).
double nugget_transform(double z_delta, double lower_bound);

// Inverse of nugget_transform; `nugget` must lie strictly inside (l_b, 1 + l_b).
double nugget_inverse(double nugget, double lower_bound);

// K + phi_delta I over the training inputs.
Matrix corr_matrix(const TrainingSet& ts, const HyperParamPoint& hp, const KernelConfig& cfg);

/// Cholesky factor together with log|K|.
struct CholeskyResult {
  Eigen::LLT<Matrix> llt;
  double log_det = 0.0;
  double jitter = 0.0;  // diagonal term that was added, 0 if none

  Matrix lower() const { return llt.matrixL(); }
};

// Factorises K. On failure retries with additive diagonal jitter 1e-10, 1e-8,
// 1e-6 (up to `max_jitter_attempts`), then throws FactorisationError.
CholeskyResult chol_logdet(const Matrix& K, int max_jitter_attempts = 3);

// y^T K^{-1} y / (n - 1)
double sigma_hat_sq(const Vector& y, const Eigen::LLT<Matrix>& K_solve);

double log_prior_length_scales(const HyperParamPoint& hp, const PriorSpec& prior);

// Flat truncated-beta(1, 1) prior on phi_delta over (l_b, 1). The density is
// constant, so this is 0 for every admissible z_delta. No Jacobian is added:
// H is flat in z_delta once the nugget saturates at l_b.
double log_prior_nugget(double z_delta);

// Log prior density in sampling coordinates, up to an additive constant.
double log_prior(const HyperParamPoint& hp, const PriorSpec& prior);

// Exponent on sigma_hat^2 in the integrated posterior.
double posterior_exponent(Eigen::Index n, Eigen::Index p, ExponentConvention convention);

// H(phi|D) = -log p(phi) + e log sigma_hat^2 + 1/2 log|K_delta|.
// Throws EvaluationError when the factorisation fails or sigma_hat^2 <= 0,
// and returns +inf when the prior density is zero.
double neg_log_integrated_posterior(const HyperParamPoint& hp, const TrainingSet& ts,
                                    const PriorSpec& prior, const KernelConfig& cfg);

/// Objective over flat sampler vectors that never throws: evaluation
/// failures come back as +inf so they fall outside every slice.
class IntegratedPosterior {
 public:
  IntegratedPosterior(TrainingSet ts, PriorSpec prior, KernelConfig cfg = {});

  double operator()(const Vector& v) const;

  const TrainingSet& training_set() const { return ts_; }
  const PriorSpec& prior() const { return prior_; }
  const KernelConfig& kernel() const { return cfg_; }

 private:
  TrainingSet ts_;
  PriorSpec prior_;
  KernelConfig cfg_;
};

struct PredictiveMoments {
  double mu = 0.0;
  double s2 = 0.0;
};

/// GP conditioned on one hyper-parameter point. Holds the factorisation so
/// that many query points can be predicted cheaply.
class GpFit {
 public:
  GpFit(const TrainingSet& ts, const HyperParamPoint& hp, const KernelConfig& cfg = {});

  // Gaussian approximation to the Student-t predictive: the variance is the
  // t correlation scaled by sigma_hat^2 * df / (df - 2), df = 2 * exponent.
  PredictiveMoments predict(const Eigen::Ref<const Vector>& xq) const;

  // Predictive mean only; defined for any df.
  double mean(const Eigen::Ref<const Vector>& xq) const;

  // Covariance between predictions at two query points (same scaling).
  double cross_covariance(const Eigen::Ref<const Vector>& xq, const Eigen::Ref<const Vector>& wq) const;

  double sigma_hat_sq() const { return sigma_hat_sq_; }
  double degrees_of_freedom() const { return df_; }
  double nugget() const { return nugget_; }

 private:
  Vector cross_corr(const Eigen::Ref<const Vector>& xq) const;
  double variance_scale() const;

  Matrix X_;
  Vector phi_;
  double nugget_ = 0.0;
  CholeskyResult chol_;
  Vector alpha_;  // K^{-1} y
  double sigma_hat_sq_ = 0.0;
  double df_ = 0.0;
};

PredictiveMoments predictive_moments(const HyperParamPoint& hp, const TrainingSet& ts,
                                     const Eigen::Ref<const Vector>& xq, const KernelConfig& cfg = {});

}  // namespace ta2s2

#endif  // TA2S2_GP_CORE_HPP_
