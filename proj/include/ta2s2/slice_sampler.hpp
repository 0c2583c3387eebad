#ifndef TA2S2_SLICE_SAMPLER_HPP_
#define TA2S2_SLICE_SAMPLER_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ta2s2/rng.hpp"

namespace ta2s2 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Negative log target H. Must not throw; +inf marks points outside the support.
using Objective = std::function<double(const Vector&)>;

// 2.38 / sqrt(dim)
double default_spread(Eigen::Index dim);

/// Shared, read-only state of one annealing level: the previous level's
/// samples (markers) with their cached H values, the temperature and the
/// proposal covariance Sigma_k.
class LevelContext {
 public:
  LevelContext(std::vector<Vector> markers, std::vector<double> marker_H, double tau, Matrix sigma, double c0,
               double p_renew, int max_crumbs);

  const std::vector<Vector>& markers() const { return markers_; }
  const std::vector<double>& marker_H() const { return marker_H_; }
  double tau() const { return tau_; }
  const Matrix& sigma() const { return sigma_; }
  double c0() const { return c0_; }
  double p_renew() const { return p_renew_; }
  int max_crumbs() const { return max_crumbs_; }
  Eigen::Index dim() const { return sigma_.rows(); }

  // Factor L of the regularised Sigma_k (L L^T ~ Sigma_k).
  const Matrix& sigma_factor() const { return factor_; }
  // True when the full factorisation failed and only diag(Sigma_k) is used.
  bool diagonal_fallback() const { return diagonal_fallback_; }

  // mean + scale * L * n, n ~ N(0, I)
  Vector gaussian(const Vector& mean, double scale, Rng& rng) const;

 private:
  std::vector<Vector> markers_;
  std::vector<double> marker_H_;
  double tau_;
  Matrix sigma_;
  double c0_;
  double p_renew_;
  int max_crumbs_;
  Matrix factor_;
  bool diagonal_fallback_ = false;
};

struct SliceState {
  Vector current;
  double H_current = 0.0;
  double z = 0.0;  // slice level of the step that produced `current`
};

struct StepStats {
  int crumbs = 0;  // crumbs (= candidate evaluations) used by the step
  int renewals = 0;
  bool stalled = false;
};

// z = H + e, e ~ Exp(mean tau), from a uniform variate u in [0, 1).
double slice_level_from_uniform(double H_current, double tau, double u);
double draw_slice_level(double H_current, double tau, Rng& rng);

inline bool in_slice(double H_candidate, double z) { return z > H_candidate; }

// Indices of markers strictly inside the slice {H < z}.
std::vector<std::size_t> marker_index_set(std::span<const double> marker_H, double z);

// First-crumb rule: Gaussian renewal around the current state when J is empty
// or with probability p_renew, otherwise a marker drawn uniformly from J.
Vector draw_crumb(const LevelContext& ctx, const Vector& current, std::span<const std::size_t> J, Rng& rng,
                  bool* renewed = nullptr);

// alpha_l * current + (1 - alpha_l) * mean(crumbs), alpha_l = 1 - 1/l.
Vector candidate_centre(const Vector& current, std::span<const Vector> crumbs);

// xi_l ~ N(candidate_centre, (c0 / l)^2 Sigma_k) with l = crumbs.size().
Vector propose_candidate(const LevelContext& ctx, const Vector& current, std::span<const Vector> crumbs, Rng& rng);

/// One step of the annealed crumb slice sampler. Draws a fresh slice level,
/// then alternates crumbs and candidates until a candidate falls inside the
/// slice. After max_crumbs rejections the current state is returned unchanged
/// and the stall is reported through `stats`.
SliceState advance_chain(const LevelContext& ctx, const SliceState& state, const Objective& H, Rng& rng,
                         StepStats* stats = nullptr);

}  // namespace ta2s2

#endif  // TA2S2_SLICE_SAMPLER_HPP_
