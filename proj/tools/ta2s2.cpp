#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ta2s2/bench/dataset.hpp"
#include "ta2s2/bench/design.hpp"
#include "ta2s2/bench/experiment.hpp"
#include "ta2s2/bench/report.hpp"
#include "ta2s2/bench/simulators.hpp"
#include "ta2s2/error.hpp"
#include "ta2s2/predict_score.hpp"
#include "ta2s2/tmcmc.hpp"

using namespace ta2s2;
using namespace ta2s2::bench;
namespace fs = std::filesystem;

namespace {

// Flat key=value file. Blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t number = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Command-line arguments with config-file entries appended for every key not
// given explicitly, so explicit flags always win.
std::vector<std::string> merged_arguments(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;
  const auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, value] : read_config(config_path)) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (given(key)) continue;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

struct RunFlags {
  RunConfig cfg;
  std::string prior = "uniform_log_space";
  std::string exponent = "paper_n_minus_p";
  double exponential_mean = 5.0;
  double box_lower = -7.0;
  double box_upper = 7.0;

  void add_to(CLI::App* app) {
    app->add_option("--N", cfg.N, "samples per annealing level")->capture_default_str();
    app->add_option("--gamma", cfg.gamma, "target ESS fraction")->capture_default_str();
    app->add_option("--c0", cfg.c0, "proposal spread (<= 0: 2.38/sqrt(dim))")->capture_default_str();
    app->add_option("--p_renew", cfg.p_renew, "Gaussian renewal probability of the first crumb")
        ->capture_default_str();
    app->add_option("--max_crumbs", cfg.max_crumbs)->capture_default_str();
    app->add_option("--max_levels", cfg.max_levels)->capture_default_str();
    app->add_option("--max_stall_rate", cfg.max_stall_rate)->capture_default_str();
    app->add_option("--prior", prior, "uniform_log_space | exponential")->capture_default_str();
    app->add_option("--exponential_mean", exponential_mean)->capture_default_str();
    app->add_option("--box_lower", box_lower)->capture_default_str();
    app->add_option("--box_upper", box_upper)->capture_default_str();
    app->add_option("--lower_bound", cfg.kernel.lower_bound, "nugget lower bound")->capture_default_str();
    app->add_option("--jitter_max_attempts", cfg.kernel.jitter_max_attempts)->capture_default_str();
    app->add_option("--exponent", exponent, "paper_n_minus_p | n_minus_one")->capture_default_str();
    app->add_option("--workers", cfg.workers, "worker threads (TA2S2_WORKERS overrides)")->capture_default_str();
    app->add_option("--thin", cfg.thin, "stride applied to the final sample")->capture_default_str();
  }

  RunConfig resolve(std::uint64_t seed) const {
    RunConfig out = cfg;
    out.seed = seed;
    const PriorKind kind = prior_kind_from_string(prior);
    out.prior = kind == PriorKind::exponential ? PriorSpec::exponential(exponential_mean)
                                               : PriorSpec::uniform_log_space(box_lower, box_upper);
    out.kernel.exponent_convention = exponent_convention_from_string(exponent);
    if (const char* env = std::getenv("TA2S2_WORKERS")) {
      const int w = std::atoi(env);
      if (w < 1) throw ConfigError("TA2S2_WORKERS must be a positive integer");
      out.workers = w;
    }
    out.validate();
    return out;
  }
};

Matrix read_queries(const fs::path& path, const Dataset& train) {
  Matrix X = read_design_csv(path);
  if (train.input_bounds) X = rescale_to_unit(X, *train.input_bounds);
  if (X.cols() != train.train.p()) throw ConfigError("query points and training inputs differ in dimension");
  return X;
}

WeightedSampleSet scoring_subset(const WeightedSampleSet& samples, std::size_t target) {
  return thin_samples(samples, thinning_stride(samples.size(), target));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process emulation with annealed crumb slice sampling"};
  app.require_subcommand(1);
  std::string config;
  std::uint64_t seed = 0;

  // design
  auto* design = app.add_subcommand("design", "Latin hypercube design in [0,1)^p");
  std::size_t design_n = 20, design_p = 2;
  std::string design_out;
  design->add_option("--n", design_n, "number of points")->capture_default_str();
  design->add_option("--p", design_p, "input dimension")->capture_default_str();
  design->add_option("--seed", seed)->capture_default_str();
  design->add_option("--out", design_out, "output CSV")->required();
  design->add_option("--config", config);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a benchmark simulator on a unit-cube design");
  std::string sim_model = "franke", sim_design, sim_out;
  simulate->add_option("--model", sim_model, "franke | wing_weight")->capture_default_str();
  simulate->add_option("--design", sim_design, "design CSV (x1..xp in [0,1])")->required();
  simulate->add_option("--out", sim_out, "dataset CSV")->required();
  simulate->add_option("--config", config);

  // sample
  auto* sample = app.add_subcommand("sample", "Sample GP hyper-parameters from the integrated posterior");
  RunFlags sample_flags;
  std::string sample_train, sample_out, sample_report;
  sample->add_option("--train", sample_train, "training CSV")->required();
  sample->add_option("--out", sample_out, "samples CSV")->required();
  sample->add_option("--report", sample_report, "JSON run report");
  sample->add_option("--seed", seed)->capture_default_str();
  sample_flags.add_to(sample);
  sample->add_option("--config", config);

  // predict
  auto* predict = app.add_subcommand("predict", "Mixture and MAP predictions at query points");
  std::string pred_train, pred_samples, pred_points, pred_out;
  std::size_t pred_scoring = 100;
  predict->add_option("--train", pred_train, "training CSV")->required();
  predict->add_option("--samples", pred_samples, "samples CSV from 'sample'")->required();
  predict->add_option("--points", pred_points, "query CSV (x1..xp)")->required();
  predict->add_option("--scoring_sample", pred_scoring, "thinned mixture size")->capture_default_str();
  predict->add_option("--out", pred_out, "predictions CSV")->required();
  predict->add_option("--config", config);

  // score
  auto* score = app.add_subcommand("score", "CRPS and RMSE of mixture and MAP predictors on a test set");
  std::string score_train, score_test, score_samples_csv, score_out;
  std::size_t score_scoring = 100;
  score->add_option("--train", score_train, "training CSV")->required();
  score->add_option("--test", score_test, "test CSV")->required();
  score->add_option("--samples", score_samples_csv, "samples CSV from 'sample'")->required();
  score->add_option("--scoring_sample", score_scoring, "thinned mixture size")->capture_default_str();
  score->add_option("--out", score_out, "JSON scores (stdout if omitted)");
  score->add_option("--config", config);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Repeated sample-and-score benchmark");
  RunFlags exp_flags;
  ExperimentSpec spec;
  std::string exp_model = "franke", exp_train, exp_test, exp_out;
  experiment->add_option("--model", exp_model, "franke | wing_weight | external_csv")->capture_default_str();
  experiment->add_option("--train", exp_train, "training CSV (external_csv)");
  experiment->add_option("--test", exp_test, "test CSV (external_csv)");
  experiment->add_option("--n_train", spec.n_train)->capture_default_str();
  experiment->add_option("--n_test", spec.n_test)->capture_default_str();
  experiment->add_option("--repeats", spec.repeats)->capture_default_str();
  experiment->add_option("--scoring_sample", spec.scoring_sample)->capture_default_str();
  experiment->add_option("--fixed_design", spec.fixed_design, "share one design across repeats")
      ->capture_default_str();
  experiment->add_option("--seed", seed)->required();
  experiment->add_option("--out", exp_out, "output directory")->required();
  exp_flags.add_to(experiment);
  experiment->add_option("--config", config);

  try {
    auto args = merged_arguments(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    CLI::App* active = app.get_subcommands().front();

    if (active == design) {
      Rng rng = make_stream(seed, {0xde5});
      write_design_csv(design_out, lhs_design(static_cast<Eigen::Index>(design_n), static_cast<Eigen::Index>(design_p), rng));
    } else if (active == simulate) {
      const Matrix unit = read_design_csv(sim_design);
      const Model model = model_from_string(sim_model);
      if (model == Model::external_csv) throw ConfigError("simulate: model must be franke or wing_weight");
      TrainingSet ts;
      ts.X = unit;
      ts.y.resize(unit.rows());
      std::optional<Bounds> bounds;
      if (model == Model::franke) {
        if (unit.cols() != 2) throw ConfigError("simulate: franke needs a 2-column design");
        for (Eigen::Index i = 0; i < unit.rows(); ++i) {
          const std::array<double, 2> x{unit(i, 0), unit(i, 1)};
          ts.y(i) = franke(x);
        }
      } else {
        if (unit.cols() != 10) throw ConfigError("simulate: wing_weight needs a 10-column design");
        Bounds b{Vector(10), Vector(10)};
        for (std::size_t j = 0; j < 10; ++j) {
          b.lower(static_cast<Eigen::Index>(j)) = kWingWeightRanges[j].lower;
          b.upper(static_cast<Eigen::Index>(j)) = kWingWeightRanges[j].upper;
        }
        const Matrix natural = rescale_from_unit(unit, b);
        for (Eigen::Index i = 0; i < unit.rows(); ++i) {
          const Vector row = natural.row(i).transpose();
          ts.y(i) = wing_weight(std::span<const double>(row.data(), 10));
        }
        bounds = b;
      }
      write_dataset_csv(sim_out, ts, bounds);
    } else if (active == sample) {
      const RunConfig cfg = sample_flags.resolve(seed);
      const Dataset ds = ingest_csv(sample_train);
      const RunReport run = run_ta2s2(ds.train, cfg);
      const WeightedSampleSet out = thin_samples(run.final_samples, cfg.thin);
      write_samples_csv(sample_out, out);
      const json report = {{"config", to_json(cfg)},
                           {"ladder", ladder_json(run)},
                           {"levels", level_diagnostics_json(run)},
                           {"samples_summary", samples_summary_json(out, cfg.kernel)},
                           {"timings", timings_json(run, cfg.workers)}};
      if (!sample_report.empty()) write_json(sample_report, report);
      std::cout << "levels " << run.ladder.levels() << ", samples " << out.size() << ", MAP H "
                << report["samples_summary"]["H_min"] << '\n';
    } else if (active == predict) {
      const Dataset ds = ingest_csv(pred_train);
      const WeightedSampleSet all = read_samples_csv(pred_samples);
      const MixturePredictor mixture(ds.train, scoring_subset(all, pred_scoring));
      const GpFit map_fit(ds.train, map_estimate(all));
      const Matrix Xq = read_queries(pred_points, ds);
      std::ofstream out(pred_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + pred_out);
      out << "index,mixture_mean,mixture_var,map_mean,map_var\n";
      for (Eigen::Index i = 0; i < Xq.rows(); ++i) {
        const Vector xq = Xq.row(i).transpose();
        const auto m = mixture_moments(mixture.predict(xq));
        const auto s = map_fit.predict(xq);
        out << i << ',' << format_double(m.mu) << ',' << format_double(m.s2) << ',' << format_double(s.mu) << ','
            << format_double(s.s2) << '\n';
      }
    } else if (active == score) {
      const Dataset train = ingest_csv(score_train);
      const Dataset test = ingest_csv(score_test);
      if (test.train.p() != train.train.p()) throw ConfigError("score: training and test inputs differ in dimension");
      const WeightedSampleSet all = read_samples_csv(score_samples_csv);
      const Scores s = score_samples(train.train, test.train, scoring_subset(all, score_scoring), map_estimate(all), {});
      const json j = {{"crps", {{"mixture_mean", s.mean_crps_mixture()}, {"map_mean", s.mean_crps_map()},
                                {"mixture", s.crps_mixture}, {"map", s.crps_map}}},
                      {"rmse", {{"mixture", s.rmse_mixture}, {"map", s.rmse_map}}}};
      if (score_out.empty())
        std::cout << j.dump(2) << '\n';
      else
        write_json(score_out, j);
    } else if (active == experiment) {
      spec.model = model_from_string(exp_model);
      spec.train_csv = exp_train;
      spec.test_csv = exp_test;
      spec.run = exp_flags.resolve(seed);
      spec.output_dir = exp_out;
      const auto result = run_experiment(spec);
      const auto& summary = result.report["summary"];
      std::cout << "completed " << summary["completed"] << ", failed " << summary["failed"]
                << ", mixture not worse than MAP in " << summary["mixture_not_worse_than_map"] << " repeats\n";
      return summary["failed"].get<std::size_t>() == 0 ? 0 : 2;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
