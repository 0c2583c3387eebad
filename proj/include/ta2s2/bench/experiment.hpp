#ifndef TA2S2_BENCH_EXPERIMENT_HPP_
#define TA2S2_BENCH_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ta2s2/bench/dataset.hpp"
#include "ta2s2/bench/report.hpp"
#include "ta2s2/predict_score.hpp"
#include "ta2s2/tmcmc.hpp"

namespace ta2s2::bench {

enum class Model { franke, wing_weight, external_csv };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

struct ExperimentSpec {
  Model model = Model::franke;
  std::filesystem::path train_csv;  // external_csv only
  std::filesystem::path test_csv;   // external_csv only
  std::size_t n_train = 20;
  std::size_t n_test = 100;
  std::size_t repeats = 1;
  std::size_t scoring_sample = 100;  // thinned sample size used for the mixture
  bool fixed_design = true;          // one training/test set shared by all repeats
  RunConfig run{};
  std::filesystem::path output_dir;  // empty: no files written

  void validate() const;
};

// Generates (or loads) the data for one repeat. Inputs are in [0,1]^p.
Dataset make_dataset(const ExperimentSpec& spec, std::uint64_t data_seed);

/// Scores of the thinned-sample mixture and the MAP predictor on a test set.
struct Scores {
  std::vector<double> crps_mixture;
  std::vector<double> crps_map;
  std::vector<double> mean_mixture;
  std::vector<double> var_mixture;
  std::vector<double> mean_map;
  std::vector<double> var_map;
  double rmse_mixture = 0.0;
  double rmse_map = 0.0;

  double mean_crps_mixture() const;
  double mean_crps_map() const;
};

Scores score_samples(const TrainingSet& train, const TrainingSet& test, const WeightedSampleSet& scoring,
                     const HyperParamPoint& map, const KernelConfig& kernel);

struct RepeatResult {
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string reason;
  RunReport run;
  Scores scores;
  std::size_t scoring_count = 0;
};

struct ExperimentResult {
  std::vector<RepeatResult> repeats;
  json report;
};

// Runs every repeat, records failures with their reason and keeps going.
// Writes report.json, crps.csv and per-repeat tables when output_dir is set.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Stride that thins N samples down to about `target`.
std::size_t thinning_stride(std::size_t N, std::size_t target);

}  // namespace ta2s2::bench

#endif  // TA2S2_BENCH_EXPERIMENT_HPP_
