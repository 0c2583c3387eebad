#include "ta2s2/gp_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ta2s2/error.hpp"

namespace ta2s2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<double, 3> kJitterLadder = {1e-10, 1e-8, 1e-6};

}  // namespace

TrainingSet::TrainingSet(Matrix inputs, Vector outputs) : X(std::move(inputs)), y(std::move(outputs)) {}

void TrainingSet::validate() const {
  if (X.rows() != y.size()) throw DomainError("training set: X has " + std::to_string(X.rows()) +
                                              " rows but y has " + std::to_string(y.size()) + " entries");
  if (n() < 2) throw DomainError("training set: need at least 2 runs");
  if (p() < 1) throw DomainError("training set: need at least 1 input dimension");
  if (!X.allFinite() || !y.allFinite()) throw DomainError("training set: non-finite values");
}

Vector HyperParamPoint::to_vector() const {
  Vector v(log_phi.size() + 1);
  v.head(log_phi.size()) = log_phi;
  v(log_phi.size()) = z_delta;
  return v;
}

HyperParamPoint HyperParamPoint::from_vector(const Vector& v) {
  if (v.size() < 2) throw DomainError("hyper-parameter vector needs at least one length-scale and the nugget");
  HyperParamPoint hp;
  hp.log_phi = v.head(v.size() - 1);
  hp.z_delta = v(v.size() - 1);
  return hp;
}

void KernelConfig::validate() const {
  if (!(lower_bound > 0.0 && lower_bound < 1.0)) throw ConfigError("kernel: lower bound must lie in (0, 1)");
  if (jitter_max_attempts < 0) throw ConfigError("kernel: jitter_max_attempts must be non-negative");
}

PriorSpec PriorSpec::uniform_log_space(double lower, double upper) {
  PriorSpec spec;
  spec.kind = PriorKind::uniform_log_space;
  spec.box_lower = lower;
  spec.box_upper = upper;
  return spec;
}

PriorSpec PriorSpec::exponential(double mean) {
  PriorSpec spec;
  spec.kind = PriorKind::exponential;
  spec.exponential_mean = mean;
  return spec;
}

double sq_exp_corr(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                   const Eigen::Ref<const Vector>& phi) {
  if (x.size() != x2.size() || x.size() != phi.size()) throw DomainError("sq_exp_corr: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(phi(i) > 0.0)) throw DomainError("sq_exp_corr: length-scales must be positive");
    const double d = x(i) - x2(i);
    s += d * d / phi(i);
  }
  return std::exp(-0.5 * s);
}

double nugget_transform(double z_delta, double lower_bound) {
  // 1 / (1 + exp(-z)) written to avoid overflow for large |z|.
  const double sigmoid =
      z_delta >= 0.0 ? 1.0 / (1.0 + std::exp(-z_delta)) : std::exp(z_delta) / (1.0 + std::exp(z_delta));
  return (1.0 - lower_bound) * sigmoid + lower_bound;
}

double nugget_inverse(double nugget, double lower_bound) {
  const double s = (nugget - lower_bound) / (1.0 - lower_bound);
  if (!(s > 0.0 && s < 1.0)) throw DomainError("nugget_inverse: nugget outside (l_b, 1)");
  return std::log(s) - std::log1p(-s);
}

Matrix corr_matrix(const TrainingSet& ts, const HyperParamPoint& hp, const KernelConfig& cfg) {
  if (hp.p() != ts.p()) throw DomainError("corr_matrix: hyper-parameter dimension does not match inputs");
  const Vector phi = hp.phi();
  const double nugget = nugget_transform(hp.z_delta, cfg.lower_bound);
  const Eigen::Index n = ts.n();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0 + nugget;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = sq_exp_corr(ts.X.row(i).transpose(), ts.X.row(j).transpose(), phi);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

CholeskyResult chol_logdet(const Matrix& K, int max_jitter_attempts) {
  CholeskyResult out;
  out.llt.compute(K);
  int attempt = 0;
  while (out.llt.info() != Eigen::Success) {
    if (attempt >= max_jitter_attempts || attempt >= static_cast<int>(kJitterLadder.size()))
      throw FactorisationError("chol_logdet: matrix is not positive definite");
    out.jitter = kJitterLadder[static_cast<std::size_t>(attempt++)];
    Matrix jittered = K;
    jittered.diagonal().array() += out.jitter;
    out.llt.compute(jittered);
  }
  const auto& L = out.llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += std::log(L(i, i));
  out.log_det = 2.0 * log_det;
  return out;
}

double sigma_hat_sq(const Vector& y, const Eigen::LLT<Matrix>& K_solve) {
  if (y.size() < 2) throw DomainError("sigma_hat_sq: need n >= 2");
  const double quad = y.dot(K_solve.solve(y));
  return quad / static_cast<double>(y.size() - 1);
}

double log_prior_length_scales(const HyperParamPoint& hp, const PriorSpec& prior) {
  switch (prior.kind) {
    case PriorKind::uniform_log_space:
      for (Eigen::Index i = 0; i < hp.p(); ++i) {
        if (hp.log_phi(i) < prior.box_lower || hp.log_phi(i) > prior.box_upper) return -kInf;
      }
      return 0.0;
    case PriorKind::exponential: {
      // Density on phi plus the log-Jacobian of phi = exp(log_phi).
      double lp = 0.0;
      for (Eigen::Index i = 0; i < hp.p(); ++i) lp += -std::exp(hp.log_phi(i)) / prior.exponential_mean + hp.log_phi(i);
      return lp;
    }
    case PriorKind::custom:
      if (!prior.custom) throw ConfigError("custom prior selected without a density");
      return prior.custom(hp);
  }
  throw ConfigError("unknown prior kind");
}

double log_prior_nugget(double z_delta) {
  return std::isnan(z_delta) ? -std::numeric_limits<double>::infinity() : 0.0;
}

double log_prior(const HyperParamPoint& hp, const PriorSpec& prior) {
  return log_prior_length_scales(hp, prior) + log_prior_nugget(hp.z_delta);
}

double posterior_exponent(Eigen::Index n, Eigen::Index p, ExponentConvention convention) {
  switch (convention) {
    case ExponentConvention::paper_n_minus_p:
      return 0.5 * static_cast<double>(n - p);
    case ExponentConvention::n_minus_one:
      return 0.5 * static_cast<double>(n - 1);
  }
  throw ConfigError("unknown exponent convention");
}

double neg_log_integrated_posterior(const HyperParamPoint& hp, const TrainingSet& ts, const PriorSpec& prior,
                                    const KernelConfig& cfg) {
  if (!hp.log_phi.allFinite() || !std::isfinite(hp.z_delta))
    throw EvaluationError("neg_log_integrated_posterior: non-finite hyper-parameters");
  const double lp = log_prior(hp, prior);
  if (lp == -kInf) return kInf;

  const Matrix K = corr_matrix(ts, hp, cfg);
  CholeskyResult chol;
  try {
    chol = chol_logdet(K, cfg.jitter_max_attempts);
  } catch (const FactorisationError& e) {
    throw EvaluationError(e.what());
  }
  const double s2 = sigma_hat_sq(ts.y, chol.llt);
  if (!(s2 > 0.0) || !std::isfinite(s2)) throw EvaluationError("neg_log_integrated_posterior: sigma_hat^2 <= 0");

  const double e = posterior_exponent(ts.n(), ts.p(), cfg.exponent_convention);
  return -lp + e * std::log(s2) + 0.5 * chol.log_det;
}

IntegratedPosterior::IntegratedPosterior(TrainingSet ts, PriorSpec prior, KernelConfig cfg)
    : ts_(std::move(ts)), prior_(std::move(prior)), cfg_(cfg) {
  ts_.validate();
  cfg_.validate();
}

double IntegratedPosterior::operator()(const Vector& v) const {
  if (v.size() != ts_.p() + 1) throw DomainError("integrated posterior: state has the wrong dimension");
  try {
    return neg_log_integrated_posterior(HyperParamPoint::from_vector(v), ts_, prior_, cfg_);
  } catch (const EvaluationError&) {
    return kInf;
  }
}

GpFit::GpFit(const TrainingSet& ts, const HyperParamPoint& hp, const KernelConfig& cfg)
    : X_(ts.X), phi_(hp.phi()), nugget_(nugget_transform(hp.z_delta, cfg.lower_bound)) {
  ts.validate();
  chol_ = chol_logdet(corr_matrix(ts, hp, cfg), cfg.jitter_max_attempts);
  alpha_ = chol_.llt.solve(ts.y);
  sigma_hat_sq_ = ts.y.dot(alpha_) / static_cast<double>(ts.n() - 1);
  df_ = 2.0 * posterior_exponent(ts.n(), ts.p(), cfg.exponent_convention);
}

Vector GpFit::cross_corr(const Eigen::Ref<const Vector>& xq) const {
  if (xq.size() != X_.cols()) throw DomainError("GpFit: query point has the wrong dimension");
  Vector t(X_.rows());
  for (Eigen::Index i = 0; i < X_.rows(); ++i) t(i) = sq_exp_corr(xq, X_.row(i).transpose(), phi_);
  return t;
}

double GpFit::variance_scale() const {
  if (!(df_ > 2.0)) throw DomainError("GpFit: predictive variance undefined for df <= 2");
  return sigma_hat_sq_ * df_ / (df_ - 2.0);
}

PredictiveMoments GpFit::predict(const Eigen::Ref<const Vector>& xq) const {
  const Vector t = cross_corr(xq);
  PredictiveMoments out;
  out.mu = t.dot(alpha_);
  const double corr = 1.0 + nugget_ - t.dot(chol_.llt.solve(t));
  out.s2 = std::max(0.0, corr) * variance_scale();
  return out;
}

double GpFit::mean(const Eigen::Ref<const Vector>& xq) const { return cross_corr(xq).dot(alpha_); }

double GpFit::cross_covariance(const Eigen::Ref<const Vector>& xq, const Eigen::Ref<const Vector>& wq) const {
  const Vector tx = cross_corr(xq);
  const Vector tw = cross_corr(wq);
  double k = sq_exp_corr(xq, wq, phi_);
  if (xq == wq) k += nugget_;
  return (k - tx.dot(chol_.llt.solve(tw))) * variance_scale();
}

PredictiveMoments predictive_moments(const HyperParamPoint& hp, const TrainingSet& ts,
                                     const Eigen::Ref<const Vector>& xq, const KernelConfig& cfg) {
  return GpFit(ts, hp, cfg).predict(xq);
}

}  // namespace ta2s2
