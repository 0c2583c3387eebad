#include "ta2s2/tmcmc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "ta2s2/error.hpp"

namespace ta2s2 {

namespace {

constexpr std::uint64_t kInitStream = 0xffffffffffffffffULL;
constexpr std::uint64_t kResampleStream = 0xfffffffffffffffeULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Order by H, then lexicographically by coordinates.
std::vector<std::size_t> canonical_order(const WeightedSampleSet& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (s.H[a] != s.H[b]) return s.H[a] < s.H[b];
    const auto& pa = s.points[a];
    const auto& pb = s.points[b];
    return std::lexicographical_compare(pa.data(), pa.data() + pa.size(), pb.data(), pb.data() + pb.size());
  });
  return idx;
}

// Runs `task(i)` for i in [0, count) on `workers` threads.
template <typename Task>
void parallel_for(std::size_t count, int workers, Task&& task) {
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < std::min(n_threads, count); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void InitBox::validate() const {
  if (lower.size() != upper.size()) throw ConfigError("init box: bound vectors differ in size");
  if (dim() < 1) throw ConfigError("init box: empty");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(std::isfinite(lower(i)) && std::isfinite(upper(i)) && lower(i) < upper(i)))
      throw ConfigError("init box: need finite lower < upper in every coordinate");
  }
}

InitBox InitBox::for_length_scales(Eigen::Index p, double lo, double hi) {
  return InitBox{Vector::Constant(p, lo), Vector::Constant(p, hi), true};
}

void RunConfig::validate() const {
  if (N < 2) throw ConfigError("run config: N must be at least 2");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("run config: gamma must lie in (0, 1)");
  if (!(p_renew >= 0.0 && p_renew <= 1.0)) throw ConfigError("run config: p_renew must lie in [0, 1]");
  if (max_crumbs < 1) throw ConfigError("run config: max_crumbs must be positive");
  if (max_levels < 1) throw ConfigError("run config: max_levels must be positive");
  if (workers < 1) throw ConfigError("run config: workers must be positive");
  if (thin < 1) throw ConfigError("run config: thin must be positive");
  kernel.validate();
}

WeightedSampleSet initial_sample(const Objective& H, const InitBox& box, std::size_t N, Rng& rng) {
  box.validate();
  const Eigen::Index dim = box.dim();
  const Eigen::Index n_box = box.lower.size();
  WeightedSampleSet out;
  out.points.reserve(N);
  out.H.reserve(N);
  const std::size_t max_attempts = 100 * N;
  std::size_t attempts = 0;
  while (out.points.size() < N) {
    if (attempts++ >= max_attempts)
      throw InitialisationError("initial sample: could not find " + std::to_string(N) + " points with finite H");
    Vector v(dim);
    for (Eigen::Index i = 0; i < n_box; ++i) v(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * uniform01(rng);
    if (box.nugget_auxiliary) {
      // logit of a uniform variate; the sigmoid maps it back to a flat nugget.
      double u = uniform01(rng);
      while (u == 0.0) u = uniform01(rng);
      v(n_box) = std::log(u) - std::log1p(-u);
    }
    const double h = H(v);
    if (!std::isfinite(h)) continue;
    out.points.push_back(std::move(v));
    out.H.push_back(h);
  }
  out.set_uniform_weights();
  return out;
}

std::vector<ChainAllocation> allocate_chains(std::span<const double> norm_weights, std::size_t N, double u) {
  if (N < 1) throw DomainError("allocate_chains: N must be positive");
  if (norm_weights.empty()) throw DegenerateWeightsError("allocate_chains: no weights");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("allocate_chains: offset must lie in [0, 1)");

  std::vector<std::size_t> counts(norm_weights.size(), 0);
  const std::size_t last = norm_weights.size() - 1;
  std::size_t j = 0;
  double cumulative = norm_weights[0];
  for (std::size_t i = 0; i < N; ++i) {
    const double position = (static_cast<double>(i) + u) / static_cast<double>(N);
    while (position >= cumulative && j < last) cumulative += norm_weights[++j];
    ++counts[j];
  }

  std::vector<ChainAllocation> chains;
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] > 0) chains.push_back({m, counts[m]});
  }
  return chains;
}

std::vector<ChainAllocation> allocate_chains(std::span<const double> norm_weights, std::size_t N, Rng& rng) {
  return allocate_chains(norm_weights, N, uniform01(rng));
}

Matrix weighted_covariance(std::span<const Vector> points, std::span<const double> weights) {
  if (points.empty() || points.size() != weights.size()) throw DomainError("weighted_covariance: size mismatch");
  const Eigen::Index dim = points.front().size();
  Vector mean = Vector::Zero(dim);
  for (std::size_t j = 0; j < points.size(); ++j) mean += weights[j] * points[j];
  Matrix cov = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < points.size(); ++j) {
    const Vector d = points[j] - mean;
    cov.noalias() += weights[j] * d * d.transpose();
  }
  return 0.5 * (cov + cov.transpose());
}

LevelResult run_level(int k, const WeightedSampleSet& prev, double tau_prev, double tau_k, const RunConfig& cfg,
                      const Objective& H) {
  const auto start = Clock::now();
  if (prev.size() == 0) throw LevelError("run_level: empty previous level");
  if (cfg.N < 1) throw ConfigError("run_level: N must be positive");

  const auto order = canonical_order(prev);
  std::vector<Vector> markers;
  std::vector<double> marker_H;
  markers.reserve(order.size());
  marker_H.reserve(order.size());
  for (auto i : order) {
    markers.push_back(prev.points[i]);
    marker_H.push_back(prev.H[i]);
  }

  const auto weights = importance_weights(marker_H, tau_prev, tau_k);
  Matrix sigma;
  if (k <= 1) {
    const std::vector<double> uniform(markers.size(), 1.0 / static_cast<double>(markers.size()));
    sigma = weighted_covariance(markers, uniform);
  } else {
    sigma = weighted_covariance(markers, weights.normalised);
  }

  Rng resample_rng = make_stream(cfg.seed, {static_cast<std::uint64_t>(k), kResampleStream});
  const auto chains = allocate_chains(weights.normalised, cfg.N, resample_rng);

  const Eigen::Index dim = markers.front().size();
  const LevelContext ctx(markers, marker_H, tau_k, sigma, cfg.spread(dim), cfg.p_renew, cfg.max_crumbs);

  std::vector<std::size_t> offsets(chains.size(), 0);
  for (std::size_t c = 1; c < chains.size(); ++c) offsets[c] = offsets[c - 1] + chains[c - 1].length;

  WeightedSampleSet out;
  out.points.resize(cfg.N);
  out.H.resize(cfg.N);
  std::vector<StepStats> step_stats(cfg.N);

  parallel_for(chains.size(), cfg.workers, [&](std::size_t c) {
    Rng rng = make_stream(cfg.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(c)});
    const std::size_t seed = chains[c].seed_index;
    SliceState state{ctx.markers()[seed], ctx.marker_H()[seed], ctx.marker_H()[seed]};
    for (std::size_t s = 0; s < chains[c].length; ++s) {
      const std::size_t slot = offsets[c] + s;
      state = advance_chain(ctx, state, H, rng, &step_stats[slot]);
      out.points[slot] = state.current;
      out.H[slot] = state.H_current;
    }
  });
  out.set_uniform_weights();

  LevelDiagnostics diag;
  diag.level = k;
  diag.tau = tau_k;
  diag.ess = effective_sample_size(weights.normalised);
  diag.chains = chains.size();
  diag.diagonal_fallback = ctx.diagonal_fallback();
  for (const auto& st : step_stats) {
    diag.stalls += st.stalled ? 1 : 0;
    diag.crumbs += static_cast<std::size_t>(st.crumbs);
    diag.renewals += static_cast<std::size_t>(st.renewals);
    diag.max_crumbs_in_step = std::max(diag.max_crumbs_in_step, st.crumbs);
  }
  diag.seconds = seconds_since(start);

  if (static_cast<double>(diag.stalls) > cfg.max_stall_rate * static_cast<double>(cfg.N)) {
    throw LevelError("run_level: level " + std::to_string(k) + " stalled in " + std::to_string(diag.stalls) +
                     " of " + std::to_string(cfg.N) + " steps (tau = " + std::to_string(tau_k) + ")");
  }
  return {std::move(out), diag};
}

RunReport run_ta2s2(const Objective& H, const InitBox& box, const RunConfig& cfg) {
  cfg.validate();
  box.validate();
  const auto start = Clock::now();

  RunReport report;
  report.ladder.gamma = cfg.gamma;
  report.ladder.max_levels = cfg.max_levels;

  Rng init_rng = make_stream(cfg.seed, {0, kInitStream});
  WeightedSampleSet prev = initial_sample(H, box, cfg.N, init_rng);
  report.init_seconds = seconds_since(start);

  double tau_prev = kInfiniteTemperature;
  for (int k = 1;; ++k) {
    if (k > cfg.max_levels)
      throw LadderCapError("run_ta2s2: temperature did not reach 1 within " + std::to_string(cfg.max_levels) +
                           " levels");
    const double tau_k = next_temperature(prev.H, tau_prev, cfg.gamma);
    auto level = run_level(k, prev, tau_prev, tau_k, cfg, H);
    report.ladder.taus.push_back(tau_k);
    report.ladder.ess.push_back(level.diagnostics.ess);
    report.levels.push_back(level.diagnostics);
    prev = std::move(level.samples);
    tau_prev = tau_k;
    if (tau_k == 1.0) break;
  }
  report.final_samples = std::move(prev);
  report.total_seconds = seconds_since(start);
  return report;
}

RunReport run_ta2s2(const TrainingSet& ts, const RunConfig& cfg) {
  const IntegratedPosterior posterior(ts, cfg.prior, cfg.kernel);
  InitBox box = InitBox::for_length_scales(ts.p());
  if (cfg.prior.kind == PriorKind::uniform_log_space)
    box = InitBox::for_length_scales(ts.p(), cfg.prior.box_lower, cfg.prior.box_upper);
  return run_ta2s2([&posterior](const Vector& v) { return posterior(v); }, box, cfg);
}

WeightedSampleSet thin_samples(const WeightedSampleSet& samples, std::size_t stride) {
  if (stride < 1) throw DomainError("thin_samples: stride must be positive");
  WeightedSampleSet out;
  for (std::size_t i = 0; i < samples.size(); i += stride) {
    out.points.push_back(samples.points[i]);
    out.H.push_back(samples.H[i]);
  }
  out.set_uniform_weights();
  return out;
}

}  // namespace ta2s2
