#include "ta2s2/slice_sampler.hpp"

#include <cmath>
#include <string>

#include "ta2s2/error.hpp"

namespace ta2s2 {

namespace {

Vector standard_normal(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector n(dim);
  for (Eigen::Index i = 0; i < dim; ++i) n(i) = normal(rng);
  return n;
}

}  // namespace

double default_spread(Eigen::Index dim) { return 2.38 / std::sqrt(static_cast<double>(dim)); }

LevelContext::LevelContext(std::vector<Vector> markers, std::vector<double> marker_H, double tau, Matrix sigma,
                           double c0, double p_renew, int max_crumbs)
    : markers_(std::move(markers)),
      marker_H_(std::move(marker_H)),
      tau_(tau),
      sigma_(std::move(sigma)),
      c0_(c0),
      p_renew_(p_renew),
      max_crumbs_(max_crumbs) {
  if (markers_.empty()) throw ConfigError("level context: no markers");
  if (markers_.size() != marker_H_.size()) throw ConfigError("level context: markers and H values differ in size");
  if (!(tau_ > 0.0)) throw ConfigError("level context: temperature must be positive");
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() != markers_.front().size())
    throw ConfigError("level context: Sigma_k has the wrong shape");
  if (!(c0_ > 0.0)) throw ConfigError("level context: spread c0 must be positive");
  if (!(p_renew_ >= 0.0 && p_renew_ <= 1.0)) throw ConfigError("level context: p_renew must lie in [0, 1]");
  if (max_crumbs_ < 1) throw ConfigError("level context: max_crumbs must be positive");

  const Eigen::Index dim = sigma_.rows();
  double trace = sigma_.trace();
  Matrix regularised = 0.5 * (sigma_ + sigma_.transpose());
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    // Collapsed marker cloud (e.g. a single marker): fall back to unit scale.
    regularised = Matrix::Identity(dim, dim);
    trace = static_cast<double>(dim);
  }
  regularised.diagonal().array() += 1e-8 * trace / static_cast<double>(dim);
  Eigen::LLT<Matrix> llt(regularised);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
  } else {
    diagonal_fallback_ = true;
    factor_ = regularised.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
}

Vector LevelContext::gaussian(const Vector& mean, double scale, Rng& rng) const {
  return mean + scale * (factor_ * standard_normal(dim(), rng));
}

double slice_level_from_uniform(double H_current, double tau, double u) { return H_current - tau * std::log1p(-u); }

double draw_slice_level(double H_current, double tau, Rng& rng) {
  return slice_level_from_uniform(H_current, tau, uniform01(rng));
}

std::vector<std::size_t> marker_index_set(std::span<const double> marker_H, double z) {
  std::vector<std::size_t> J;
  for (std::size_t j = 0; j < marker_H.size(); ++j) {
    if (in_slice(marker_H[j], z)) J.push_back(j);
  }
  return J;
}

Vector draw_crumb(const LevelContext& ctx, const Vector& current, std::span<const std::size_t> J, Rng& rng,
                  bool* renewed) {
  const double u = uniform01(rng);
  if (J.empty() || u < ctx.p_renew()) {
    if (renewed) *renewed = true;
    return ctx.gaussian(current, ctx.c0(), rng);
  }
  if (renewed) *renewed = false;
  std::uniform_int_distribution<std::size_t> pick(0, J.size() - 1);
  return ctx.markers()[J[pick(rng)]];
}

Vector candidate_centre(const Vector& current, std::span<const Vector> crumbs) {
  if (crumbs.empty()) throw DomainError("candidate_centre: no crumbs");
  Vector mean = Vector::Zero(current.size());
  for (const auto& c : crumbs) mean += c;
  const double l = static_cast<double>(crumbs.size());
  mean /= l;
  const double alpha = 1.0 - 1.0 / l;
  return alpha * current + (1.0 - alpha) * mean;
}

Vector propose_candidate(const LevelContext& ctx, const Vector& current, std::span<const Vector> crumbs, Rng& rng) {
  const double l = static_cast<double>(crumbs.size());
  return ctx.gaussian(candidate_centre(current, crumbs), ctx.c0() / l, rng);
}

SliceState advance_chain(const LevelContext& ctx, const SliceState& state, const Objective& H, Rng& rng,
                         StepStats* stats) {
  const double z = draw_slice_level(state.H_current, ctx.tau(), rng);
  const auto J = marker_index_set(ctx.marker_H(), z);

  StepStats local;
  std::vector<Vector> crumbs;
  crumbs.reserve(static_cast<std::size_t>(ctx.max_crumbs()));
  for (int l = 1; l <= ctx.max_crumbs(); ++l) {
    bool renewed = false;
    crumbs.push_back(draw_crumb(ctx, state.current, J, rng, &renewed));
    local.renewals += renewed ? 1 : 0;
    local.crumbs = l;
    const Vector candidate = propose_candidate(ctx, state.current, crumbs, rng);
    const double H_candidate = H(candidate);
    if (in_slice(H_candidate, z)) {
      if (stats) *stats = local;
      return SliceState{candidate, H_candidate, z};
    }
  }
  local.stalled = true;
  if (stats) *stats = local;
  SliceState unchanged = state;
  unchanged.z = z;
  return unchanged;
}

}  // namespace ta2s2
