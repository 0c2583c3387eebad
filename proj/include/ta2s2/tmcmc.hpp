#ifndef TA2S2_TMCMC_HPP_
#define TA2S2_TMCMC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ta2s2/annealing.hpp"
#include "ta2s2/gp_core.hpp"
#include "ta2s2/rng.hpp"
#include "ta2s2/slice_sampler.hpp"

namespace ta2s2 {

/// Support of the initial (tau = infinity) level. Coordinates with bounds are
/// drawn uniformly; when `nugget_auxiliary` is set one extra trailing
/// coordinate is drawn so that its sigmoid image is uniform on (l_b, 1).
struct InitBox {
  Vector lower;
  Vector upper;
  bool nugget_auxiliary = true;

  Eigen::Index dim() const { return lower.size() + (nugget_auxiliary ? 1 : 0); }
  void validate() const;

  // [lo, hi]^p plus the nugget auxiliary.
  static InitBox for_length_scales(Eigen::Index p, double lo = -7.0, double hi = 7.0);
};

struct RunConfig {
  std::size_t N = 5000;  // samples per level
  double gamma = 0.5;
  double c0 = 0.0;  // <= 0 selects 2.38 / sqrt(dim)
  double p_renew = 1.0;
  int max_crumbs = 100;
  int max_levels = 50;
  double max_stall_rate = 0.5;
  PriorSpec prior = PriorSpec::uniform_log_space();
  KernelConfig kernel{};
  std::uint64_t seed = 0;
  int workers = 1;
  std::size_t thin = 1;

  void validate() const;
  double spread(Eigen::Index dim) const { return c0 > 0.0 ? c0 : default_spread(dim); }
};

struct LevelDiagnostics {
  int level = 0;
  double tau = 0.0;
  double ess = 0.0;  // ESS of the reweighting that selected tau
  std::size_t chains = 0;
  std::size_t stalls = 0;
  std::size_t crumbs = 0;  // total crumbs == total H evaluations in the level
  std::size_t renewals = 0;
  int max_crumbs_in_step = 0;
  bool diagonal_fallback = false;
  double seconds = 0.0;
};

struct RunReport {
  TemperatureLadder ladder;
  std::vector<LevelDiagnostics> levels;
  WeightedSampleSet final_samples;
  double init_seconds = 0.0;
  double total_seconds = 0.0;
};

struct ChainAllocation {
  std::size_t seed_index = 0;
  std::size_t length = 0;
};

// N uniform draws on the box with H evaluated; infinite-H draws are redrawn
// up to 100 N times before InitialisationError.
WeightedSampleSet initial_sample(const Objective& H, const InitBox& box, std::size_t N, Rng& rng);

// Systematic resampling with offset u in [0, 1). Markers with multiplicity
// zero spawn no chain; the lengths sum to N and follow marker order.
std::vector<ChainAllocation> allocate_chains(std::span<const double> norm_weights, std::size_t N, double u);
std::vector<ChainAllocation> allocate_chains(std::span<const double> norm_weights, std::size_t N, Rng& rng);

// sum_j w_j (x_j - mean)(x_j - mean)^T
Matrix weighted_covariance(std::span<const Vector> points, std::span<const double> weights);

struct LevelResult {
  WeightedSampleSet samples;
  LevelDiagnostics diagnostics;
};

/// Runs annealing level k at temperature tau_k from the completed previous
/// level. The previous sample is put in a canonical order first, so the
/// result depends only on its contents, cfg.seed and k.
LevelResult run_level(int k, const WeightedSampleSet& prev, double tau_prev, double tau_k, const RunConfig& cfg,
                      const Objective& H);

// Full sampler on an arbitrary objective.
RunReport run_ta2s2(const Objective& H, const InitBox& box, const RunConfig& cfg);

// GP hyper-parameter posterior for a training set (prior and kernel from cfg).
RunReport run_ta2s2(const TrainingSet& ts, const RunConfig& cfg);

// Every `stride`-th sample, starting with the first.
WeightedSampleSet thin_samples(const WeightedSampleSet& samples, std::size_t stride);

}  // namespace ta2s2

#endif  // TA2S2_TMCMC_HPP_
