// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/LU>

#include "crps_quadrature.hpp"
#include "ta2s2/annealing.hpp"
#include "ta2s2/bench/dataset.hpp"
#include "ta2s2/bench/design.hpp"
#include "ta2s2/bench/experiment.hpp"
#include "ta2s2/bench/report.hpp"
#include "ta2s2/bench/simulators.hpp"
#include "ta2s2/predict_score.hpp"
#include "ta2s2/slice_sampler.hpp"
#include "ta2s2/tmcmc.hpp"

using namespace ta2s2;
using namespace ta2s2::bench;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kCrpsQuadratureTol = 1e-6;
constexpr double kCrpsStandardNormal = 0.23370;
constexpr double kCrpsStandardNormalTol = 1e-5;
constexpr double kOracleMeanTol = 0.05;
constexpr double kOracleCovRelTol = 0.15;
constexpr double kEssBand = 1e-3;
constexpr double kInterpRelTol = 1e-4;
constexpr double kInterpVarTol = 1e-6;
constexpr std::size_t kFrankeRepeats = 10;
constexpr std::size_t kFrankeMinWins = 7;
constexpr int kFrankeMaxLevels = 20;
constexpr int kWingMaxLevels = 25;
constexpr double kTvTol = 0.05;
constexpr double kTelescopeRelTol = 1e-10;

constexpr std::uint64_t kSeed = 1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int worker_count() {
  if (const char* env = std::getenv("TA2S2_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d [%s] %s: %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              seconds_since(start));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

Outcome crps_vs_quadrature() {
  const auto start = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> mean(-4.0, 4.0), log_var(std::log(0.01), std::log(9.0)), weight(0.01, 1.0),
      obs(-6.0, 6.0);
  std::uniform_int_distribution<int> count(1, 5);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    PredictiveMixture mix;
    const int n = count(rng);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      mix.weights.push_back(weight(rng));
      total += mix.weights.back();
      mix.means.push_back(mean(rng));
      mix.variances.push_back(std::exp(log_var(rng)));
    }
    for (auto& w : mix.weights) w /= total;
    const double x = obs(rng);
    worst = std::max(worst, std::abs(crps_mixture(mix, x) - crps_by_quadrature(mix, x)));
  }
  const double secs = seconds_since(start);
  return {worst <= kCrpsQuadratureTol && secs < 10.0, fmt("max |closed form - quadrature| = %.3g", worst)};
}

Outcome crps_standard_normal() {
  const double c = crps_mixture(PredictiveMixture::single(0.0, 1.0), 0.0);
  const double q = crps_by_quadrature(PredictiveMixture::single(0.0, 1.0), 0.0);
  return {std::abs(c - kCrpsStandardNormal) <= kCrpsStandardNormalTol && std::abs(c - q) <= 1e-9,
          fmt("crps = %.10f", c) + fmt(", quadrature = %.10f", q)};
}

struct OracleRun {
  RunReport report;
  Vector m;
  Matrix A;
  double seconds = 0.0;
};

const OracleRun& oracle_run() {
  static const OracleRun run = [] {
    OracleRun r;
    r.m = (Vector(2) << 1.0, -1.0).finished();
    r.A = Vector((Vector(2) << 1.0, 4.0).finished()).asDiagonal();
    const Vector m = r.m;
    const Matrix A = r.A;
    const Objective H = [m, A](const Vector& x) {
      const Vector d = x - m;
      return 0.5 * d.dot(A * d);
    };
    RunConfig cfg;
    cfg.N = 2000;
    cfg.gamma = 0.5;
    cfg.seed = kSeed;
    cfg.workers = worker_count();
    const InitBox box{Vector::Constant(2, -7.0), Vector::Constant(2, 7.0), false};
    const auto start = Clock::now();
    r.report = run_ta2s2(H, box, cfg);
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

Outcome known_target_oracle() {
  const auto& r = oracle_run();
  const auto& pts = r.report.final_samples.points;
  const double n = static_cast<double>(pts.size());
  Vector mean = Vector::Zero(2);
  for (const auto& p : pts) mean += p;
  mean /= n;
  Matrix cov = Matrix::Zero(2, 2);
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= n - 1.0;
  const Matrix target = r.A.inverse();

  const double mean_err = (mean - r.m).cwiseAbs().maxCoeff();
  double cov_err = 0.0;  // relative to sqrt(a_ii a_jj) so the zero off-diagonal has a scale
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      cov_err = std::max(cov_err, std::abs(cov(i, j) - target(i, j)) / std::sqrt(target(i, i) * target(j, j)));

  const auto& taus = r.report.ladder.taus;
  bool decreasing = true;
  for (std::size_t k = 1; k < taus.size(); ++k) decreasing = decreasing && taus[k] < taus[k - 1];
  const bool ends_at_one = taus.back() == 1.0;

  std::ostringstream d;
  d << "mean " << mean.transpose() << " (max err " << mean_err << "), cov [" << cov(0, 0) << ", " << cov(0, 1) << "; "
    << cov(1, 0) << ", " << cov(1, 1) << "] (max rel err " << cov_err << "), " << r.report.ladder.levels()
    << " levels, ladder " << (decreasing && ends_at_one ? "decreasing to 1" : "malformed");
  return {mean_err <= kOracleMeanTol && cov_err <= kOracleCovRelTol && decreasing && ends_at_one && r.seconds < 60.0,
          d.str()};
}

Outcome ess_schedule() {
  const auto& r = oracle_run();
  const double target = 0.5 * 2000.0;
  const auto& ess = r.report.ladder.ess;
  bool ok = !ess.empty();
  std::ostringstream d;
  d << "ESS per level:";
  for (std::size_t k = 0; k < ess.size(); ++k) {
    d << ' ' << ess[k];
    const bool final = k + 1 == ess.size();
    if (final)
      ok = ok && ess[k] >= target * (1.0 - 1e-12);
    else
      ok = ok && ess[k] >= (1.0 - kEssBand) * target && ess[k] <= (1.0 + kEssBand) * target;
  }
  d << " (target " << target << ")";
  return {ok, d.str()};
}

TrainingSet franke_training_set(std::uint64_t seed) {
  ExperimentSpec spec;
  spec.model = Model::franke;
  return make_dataset(spec, seed).train;
}

Outcome interpolation() {
  const TrainingSet ts = franke_training_set(derive_seed(kSeed, {0xda7a}));
  const double z_floor = -800.0;  // sigmoid underflows: nugget is exactly the lower bound
  const IntegratedPosterior posterior(ts, PriorSpec::uniform_log_space());
  const Objective H = [&](const Vector& log_phi) {
    Vector v(log_phi.size() + 1);
    v << log_phi, z_floor;
    return posterior(v);
  };
  RunConfig cfg;
  cfg.N = 1000;
  cfg.seed = kSeed;
  cfg.workers = worker_count();
  const auto run = run_ta2s2(H, InitBox{Vector::Constant(2, -7.0), Vector::Constant(2, 7.0), false}, cfg);
  HyperParamPoint map;
  map.log_phi = run.final_samples.points[map_index(run.final_samples.H)];
  map.z_delta = z_floor;

  const GpFit fit(ts, map);
  double worst_rel = 0.0, worst_var = 0.0;
  for (Eigen::Index i = 0; i < ts.n(); ++i) {
    const auto m = fit.predict(ts.X.row(i).transpose());
    worst_rel = std::max(worst_rel, std::abs(m.mu - ts.y(i)) / std::abs(ts.y(i)));
    worst_var = std::max(worst_var, m.s2);
  }
  std::ostringstream d;
  d << "MAP log_phi " << map.log_phi.transpose() << ", nugget " << fit.nugget() << ", max rel err " << worst_rel
    << ", max variance " << worst_var;
  return {worst_rel <= kInterpRelTol && worst_var < kInterpVarTol, d.str()};
}

struct FrankeDesk {
  ExperimentResult result;
  double seconds = 0.0;
};

const FrankeDesk& franke_desk() {
  static const FrankeDesk desk = [] {
    ExperimentSpec spec;
    spec.model = Model::franke;
    spec.n_train = 20;
    spec.n_test = 100;
    spec.repeats = kFrankeRepeats;
    spec.scoring_sample = 100;
    spec.fixed_design = true;
    spec.run.N = 500;
    spec.run.prior = PriorSpec::exponential(5.0);
    spec.run.seed = kSeed;
    spec.run.workers = worker_count();
    FrankeDesk f;
    const auto start = Clock::now();
    f.result = run_experiment(spec);
    f.seconds = seconds_since(start);
    return f;
  }();
  return desk;
}

Outcome franke_comparison() {
  const auto& desk = franke_desk();
  std::size_t wins = 0, completed = 0;
  std::vector<double> mix, map;
  for (const auto& r : desk.result.repeats) {
    if (!r.ok) continue;
    ++completed;
    mix.push_back(r.scores.mean_crps_mixture());
    map.push_back(r.scores.mean_crps_map());
    if (mix.back() <= map.back()) ++wins;
  }
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? std::nan("") : (v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
  };
  std::ostringstream d;
  d << "mixture <= MAP in " << wins << "/" << completed << " repeats (median mean CRPS mixture " << median(mix)
    << ", MAP " << median(map) << ")";
  return {completed == kFrankeRepeats && wins >= kFrankeMinWins && desk.seconds < 900.0, d.str()};
}

Outcome ladder_lengths() {
  const auto& desk = franke_desk();
  std::size_t franke_max = 0;
  bool all_ok = true;
  for (const auto& r : desk.result.repeats) {
    all_ok = all_ok && r.ok;
    if (r.ok) franke_max = std::max(franke_max, r.run.ladder.levels());
  }

  ExperimentSpec spec;
  spec.model = Model::wing_weight;
  spec.n_train = 100;
  spec.n_test = 300;
  spec.repeats = 1;
  spec.run.N = 500;
  spec.run.seed = kSeed;
  spec.run.workers = worker_count();
  const auto wing = run_experiment(spec);
  const auto& w = wing.repeats.front();
  const std::size_t wing_levels = w.ok ? w.run.ladder.levels() : 0;

  std::ostringstream d;
  d << "Franke max " << franke_max << " levels over " << desk.result.repeats.size() << " runs, wing weight "
    << (w.ok ? std::to_string(wing_levels) + " levels" : "failed: " + w.reason);
  return {all_ok && w.ok && franke_max <= kFrankeMaxLevels && wing_levels <= kWingMaxLevels, d.str()};
}

Outcome slice_invariants() {
  const auto well = [](double x) { return 2.0 * (x * x - 1.0) * (x * x - 1.0); };
  Rng rng = make_stream(kSeed, {8});
  std::vector<Vector> markers;
  std::vector<double> marker_H;
  while (markers.size() < 2000) {
    const double x = -3.0 + 6.0 * uniform01(rng);
    if (uniform01(rng) < std::exp(-well(x))) {
      markers.push_back(Vector::Constant(1, x));
      marker_H.push_back(well(x));
    }
  }
  double mu = 0.0, var = 0.0;
  for (const auto& m : markers) mu += m(0);
  mu /= static_cast<double>(markers.size());
  for (const auto& m : markers) var += (m(0) - mu) * (m(0) - mu);
  var /= static_cast<double>(markers.size());

  const RunConfig defaults;
  const LevelContext ctx(markers, marker_H, 1.0, Matrix::Constant(1, 1, var), defaults.spread(1), defaults.p_renew,
                         defaults.max_crumbs);
  const Objective H = [&](const Vector& x) { return well(x(0)); };

  constexpr int kBins = 40;
  constexpr double lo = -2.5, hi = 2.5, width = (hi - lo) / kBins;
  std::vector<double> hist(kBins, 0.0);
  SliceState s{Vector::Constant(1, 1.0), well(1.0), well(1.0)};
  const int steps = 100000;
  int violations = 0;
  for (int i = 0; i < steps; ++i) {
    s = advance_chain(ctx, s, H, rng);
    if (!(s.z > s.H_current)) ++violations;
    const int k = static_cast<int>(std::floor((s.current(0) - lo) / width));
    if (k >= 0 && k < kBins) hist[static_cast<std::size_t>(k)] += 1.0;
  }

  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> mass(kBins);
  double Z = 0.0;
  for (int k = 0; k < kBins; ++k) {
    const double a = lo + k * width;
    Z += mass[static_cast<std::size_t>(k)] =
        gauss_kronrod<double, 31>::integrate([&](double x) { return std::exp(-well(x)); }, a, a + width, 5, 1e-12);
  }
  double tv = 0.0;
  for (int k = 0; k < kBins; ++k)
    tv += std::abs(hist[static_cast<std::size_t>(k)] / steps - mass[static_cast<std::size_t>(k)] / Z);
  tv *= 0.5;
  std::ostringstream d;
  d << violations << " slice violations in " << steps << " steps, TV distance " << tv;
  return {violations == 0 && tv <= kTvTol, d.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "ta2s2_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> reports, samples, crps;
  for (int workers : {1, 2, 4}) {
    ExperimentSpec spec;
    spec.model = Model::franke;
    spec.n_test = 50;
    spec.repeats = 2;
    spec.run.N = 300;
    spec.run.seed = kSeed;
    spec.run.workers = workers;
    spec.output_dir = root / ("w" + std::to_string(workers));
    run_experiment(spec);
    reports.push_back(strip_timings(json::parse(read_file(spec.output_dir / "report.json"))).dump());
    samples.push_back(read_file(spec.output_dir / "repeat_0" / "samples.csv") +
                      read_file(spec.output_dir / "repeat_1" / "samples.csv"));
    crps.push_back(read_file(spec.output_dir / "crps.csv"));
  }
  bool same = true;
  for (std::size_t i = 1; i < reports.size(); ++i)
    same = same && reports[i] == reports[0] && samples[i] == samples[0] && crps[i] == crps[0];
  fs::remove_all(root);
  return {same && !samples[0].empty(),
          same ? "reports, sample files and CRPS tables identical for 1, 2 and 4 workers" : "outputs differ"};
}

Outcome weight_identities() {
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<double> H(1000);
  for (auto& h : H) h = normal(rng);

  bool uniform = true;
  for (double tau : {kInfiniteTemperature, 5.0, 1.0}) {
    for (double w : importance_weights(H, tau, tau).normalised) uniform = uniform && w == 1.0 / 1000.0;
  }

  const std::vector<double> flat(1024, 1.0 / 1024.0);
  std::vector<double> point(17, 0.0);
  point[5] = 1.0;
  const bool boundaries = effective_sample_size(flat) == 1024.0 && effective_sample_size(point) == 1.0;

  const double t0 = kInfiniteTemperature, t1 = 12.0, t2 = 3.0, t3 = 1.0;
  const auto a = importance_weights(H, t0, t1);
  const auto b = importance_weights(H, t1, t2);
  const auto c = importance_weights(H, t2, t3);
  const auto direct = importance_weights(H, t0, t3);
  std::vector<double> chained(H.size());
  double total = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) total += chained[i] = a.raw[i] * b.raw[i] * c.raw[i];
  double worst = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (direct.normalised[i] == 0.0) continue;
    worst = std::max(worst, std::abs(chained[i] / total - direct.normalised[i]) / direct.normalised[i]);
  }
  std::ostringstream d;
  d << "equal-temperature weights " << (uniform ? "uniform" : "NOT uniform") << ", ESS boundaries "
    << (boundaries ? "exact" : "inexact") << ", telescoping max rel err " << worst;
  return {uniform && boundaries && worst <= kTelescopeRelTol, d.str()};
}

}  // namespace

int main() {
  std::printf("acceptance suite, seed %llu, %d workers\n", static_cast<unsigned long long>(kSeed), worker_count());
  report(1, "CRPS closed form vs quadrature", crps_vs_quadrature);
  report(2, "single Gaussian CRPS", crps_standard_normal);
  report(3, "known-target sampler oracle", known_target_oracle);
  report(4, "ESS schedule", ess_schedule);
  report(5, "interpolation at training inputs", interpolation);
  report(6, "Franke mixture vs MAP CRPS", franke_comparison);
  report(7, "ladder length", ladder_lengths);
  report(8, "slice invariants", slice_invariants);
  report(9, "determinism across workers", determinism);
  report(10, "weight identities", weight_identities);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
