#include "ta2s2/bench/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

#include "ta2s2/bench/design.hpp"
#include "ta2s2/bench/simulators.hpp"
#include "ta2s2/error.hpp"

namespace ta2s2::bench {

namespace {

constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kSamplerStream = 0x5a;

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Bounds wing_weight_bounds() {
  Bounds b{Vector(10), Vector(10)};
  for (std::size_t i = 0; i < kWingWeightRanges.size(); ++i) {
    b.lower(static_cast<Eigen::Index>(i)) = kWingWeightRanges[i].lower;
    b.upper(static_cast<Eigen::Index>(i)) = kWingWeightRanges[i].upper;
  }
  return b;
}

TrainingSet simulate_unit_design(Model model, const Matrix& unit) {
  TrainingSet ts;
  ts.X = unit;
  ts.y.resize(unit.rows());
  if (model == Model::franke) {
    for (Eigen::Index i = 0; i < unit.rows(); ++i) {
      const Vector row = unit.row(i).transpose();
      ts.y(i) = franke(std::span<const double>(row.data(), 2));
    }
  } else {
    const Matrix natural = rescale_from_unit(unit, wing_weight_bounds());
    for (Eigen::Index i = 0; i < unit.rows(); ++i) {
      const Vector row = natural.row(i).transpose();
      ts.y(i) = wing_weight(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    }
  }
  return ts;
}

json repeat_json(const RepeatResult& r, const ExperimentSpec& spec) {
  json out = {{"repeat", r.repeat}, {"seed", r.seed}, {"status", r.ok ? "ok" : "failed"}, {"reason", r.reason}};
  out["ladder"] = r.ok ? ladder_json(r.run) : json::array();
  out["levels"] = r.ok ? level_diagnostics_json(r.run) : json::array();
  out["samples_summary"] = r.ok ? samples_summary_json(r.run.final_samples, spec.run.kernel) : json::object();
  if (r.ok) out["samples_summary"]["scoring_count"] = r.scoring_count;
  out["crps"] = {{"mixture", r.scores.crps_mixture},
                 {"map", r.scores.crps_map},
                 {"mixture_mean", r.ok ? json(r.scores.mean_crps_mixture()) : json()},
                 {"map_mean", r.ok ? json(r.scores.mean_crps_map()) : json()}};
  out["rmse"] = {{"mixture", r.ok ? json(r.scores.rmse_mixture) : json()},
                 {"map", r.ok ? json(r.scores.rmse_map) : json()}};
  out["timings"] = timings_json(r.run, spec.run.workers);
  return out;
}

void write_points_csv(const std::filesystem::path& path, const TrainingSet& test, const Scores& s) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "test_index";
  for (Eigen::Index j = 0; j < test.p(); ++j) out << ",x" << (j + 1);
  out << ",y,mixture_mean,mixture_var,map_mean,map_var,crps_mixture,crps_map\n";
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << i;
    for (Eigen::Index j = 0; j < test.p(); ++j) out << ',' << format_double(test.X(i, j));
    out << ',' << format_double(test.y(i)) << ',' << format_double(s.mean_mixture[k]) << ','
        << format_double(s.var_mixture[k]) << ',' << format_double(s.mean_map[k]) << ','
        << format_double(s.var_map[k]) << ',' << format_double(s.crps_mixture[k]) << ','
        << format_double(s.crps_map[k]) << '\n';
  }
}

}  // namespace

std::string to_string(Model model) {
  switch (model) {
    case Model::franke:
      return "franke";
    case Model::wing_weight:
      return "wing_weight";
    case Model::external_csv:
      return "external_csv";
  }
  return "unknown";
}

Model model_from_string(const std::string& name) {
  if (name == "franke") return Model::franke;
  if (name == "wing_weight") return Model::wing_weight;
  if (name == "external_csv" || name == "csv") return Model::external_csv;
  throw ConfigError("unknown model '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (n_train < 2) throw ConfigError("experiment: n_train must be at least 2");
  if (n_test < 1) throw ConfigError("experiment: n_test must be positive");
  if (repeats < 1) throw ConfigError("experiment: repeats must be positive");
  if (model == Model::external_csv && (train_csv.empty() || test_csv.empty()))
    throw ConfigError("experiment: external_csv needs training and test files");
  run.validate();
}

std::size_t thinning_stride(std::size_t N, std::size_t target) {
  if (target == 0 || target >= N) return 1;
  return N / target;
}

Dataset make_dataset(const ExperimentSpec& spec, std::uint64_t data_seed) {
  if (spec.model == Model::external_csv) {
    Dataset ds = ingest_csv(spec.train_csv);
    Dataset test = ingest_csv(spec.test_csv);
    if (test.train.p() != ds.train.p()) throw ConfigError("experiment: training and test inputs differ in dimension");
    ds.test = std::move(test.train);
    return ds;
  }
  const Eigen::Index p = spec.model == Model::franke ? 2 : 10;
  Rng rng = make_stream(data_seed, {kDataStream});
  const Matrix train_design = lhs_design(static_cast<Eigen::Index>(spec.n_train), p, rng);
  const Matrix test_design = lhs_design(static_cast<Eigen::Index>(spec.n_test), p, rng);
  Dataset ds;
  ds.train = simulate_unit_design(spec.model, train_design);
  ds.test = simulate_unit_design(spec.model, test_design);
  if (spec.model == Model::wing_weight) ds.input_bounds = wing_weight_bounds();
  return ds;
}

double Scores::mean_crps_mixture() const { return mean_of(crps_mixture); }
double Scores::mean_crps_map() const { return mean_of(crps_map); }

Scores score_samples(const TrainingSet& train, const TrainingSet& test, const WeightedSampleSet& scoring,
                     const HyperParamPoint& map, const KernelConfig& kernel) {
  const MixturePredictor mixture(train, scoring, kernel);
  const GpFit map_fit(train, map, kernel);
  Scores s;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const Vector xq = test.X.row(i).transpose();
    const auto mix = mixture.predict(xq);
    const auto moments = mixture_moments(mix);
    const auto single = map_fit.predict(xq);
    s.mean_mixture.push_back(moments.mu);
    s.var_mixture.push_back(moments.s2);
    s.mean_map.push_back(single.mu);
    s.var_map.push_back(single.s2);
    s.crps_mixture.push_back(crps_mixture(mix, test.y(i)));
    s.crps_map.push_back(crps_mixture(PredictiveMixture::single(single.mu, single.s2), test.y(i)));
  }
  const std::vector<double> truth(test.y.data(), test.y.data() + test.y.size());
  s.rmse_mixture = rmse(s.mean_mixture, truth);
  s.rmse_map = rmse(s.mean_map, truth);
  return s;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;

  std::optional<Dataset> shared;
  if (spec.fixed_design) shared = make_dataset(spec, derive_seed(spec.run.seed, {kDataStream}));

  for (std::size_t r = 0; r < spec.repeats; ++r) {
    RepeatResult rep;
    rep.repeat = r;
    rep.seed = derive_seed(spec.run.seed, {static_cast<std::uint64_t>(r), kSamplerStream});
    try {
      const Dataset ds =
          shared ? *shared : make_dataset(spec, derive_seed(spec.run.seed, {static_cast<std::uint64_t>(r), kDataStream}));
      RunConfig cfg = spec.run;
      cfg.seed = rep.seed;
      rep.run = run_ta2s2(ds.train, cfg);
      const std::size_t stride =
          spec.scoring_sample > 0 ? thinning_stride(rep.run.final_samples.size(), spec.scoring_sample) : cfg.thin;
      const auto scoring = thin_samples(rep.run.final_samples, stride);
      rep.scoring_count = scoring.size();
      rep.scores = score_samples(ds.train, ds.test, scoring, map_estimate(rep.run.final_samples), cfg.kernel);
      rep.ok = true;
      if (!spec.output_dir.empty()) {
        const auto dir = spec.output_dir / ("repeat_" + std::to_string(r));
        write_points_csv(dir / "points.csv", ds.test, rep.scores);
        write_samples_csv(dir / "samples.csv", rep.run.final_samples);
      }
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.reason = e.what();
      rep.scores = Scores{};
    }
    result.repeats.push_back(std::move(rep));
  }

  json config = {{"model", to_string(spec.model)},
                 {"n_train", spec.n_train},
                 {"n_test", spec.n_test},
                 {"repeats", spec.repeats},
                 {"scoring_sample", spec.scoring_sample},
                 {"fixed_design", spec.fixed_design},
                 {"run", to_json(spec.run)}};
  if (spec.model == Model::external_csv) {
    config["train_csv"] = spec.train_csv.string();
    config["test_csv"] = spec.test_csv.string();
  }
  json repeats = json::array();
  std::size_t completed = 0;
  std::size_t mixture_wins = 0;
  std::vector<double> mix_means, map_means;
  for (const auto& r : result.repeats) {
    repeats.push_back(repeat_json(r, spec));
    if (!r.ok) continue;
    ++completed;
    mix_means.push_back(r.scores.mean_crps_mixture());
    map_means.push_back(r.scores.mean_crps_map());
    if (mix_means.back() <= map_means.back()) ++mixture_wins;
  }
  result.report = {{"config", config},
                   {"repeats", repeats},
                   {"summary",
                    {{"completed", completed},
                     {"failed", spec.repeats - completed},
                     {"mixture_not_worse_than_map", mixture_wins},
                     {"median_mean_crps", {{"mixture", median_of(mix_means)}, {"map", median_of(map_means)}}}}},
                   {"timings",
                    {{"workers", spec.run.workers},
                     {"total_seconds",
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}}}};

  if (!spec.output_dir.empty()) {
    write_json(spec.output_dir / "report.json", result.report);
    std::ofstream crps(spec.output_dir / "crps.csv", std::ios::binary);
    crps << "method,repeat,test_index,crps\n";
    for (const auto& r : result.repeats) {
      for (std::size_t i = 0; i < r.scores.crps_mixture.size(); ++i)
        crps << "mixture," << r.repeat << ',' << i << ',' << format_double(r.scores.crps_mixture[i]) << '\n';
      for (std::size_t i = 0; i < r.scores.crps_map.size(); ++i)
        crps << "map," << r.repeat << ',' << i << ',' << format_double(r.scores.crps_map[i]) << '\n';
    }
  }
  return result;
}

}  // namespace ta2s2::bench
