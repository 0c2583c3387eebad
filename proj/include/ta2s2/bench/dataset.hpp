#ifndef TA2S2_BENCH_DATASET_HPP_
#define TA2S2_BENCH_DATASET_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ta2s2/annealing.hpp"
#include "ta2s2/gp_core.hpp"

namespace ta2s2::bench {

/// Malformed CSV input; `line` and `column` are 1-based (the header is line 1).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Bounds {
  Vector lower;
  Vector upper;

  void validate() const;
};

struct Dataset {
  TrainingSet train;
  TrainingSet test;
  std::optional<Bounds> input_bounds;  // natural-unit ranges of the rescaled inputs
};

// Per-column affine map of `raw` onto [0,1] (and back).
Matrix rescale_to_unit(const Matrix& raw, const Bounds& bounds);
Matrix rescale_from_unit(const Matrix& unit, const Bounds& bounds);

// Reads "x1,...,xp,y" with optional "#lower,..." and "#upper,..." rows right
// after the header. When both bound rows are present the inputs are rescaled
// to the unit hypercube and the bounds are kept. Returns the rows as `train`.
Dataset ingest_csv(const std::filesystem::path& path);

void write_dataset_csv(const std::filesystem::path& path, const TrainingSet& ts,
                       const std::optional<Bounds>& bounds = std::nullopt);

// Design matrices: header "x1,...,xp".
Matrix read_design_csv(const std::filesystem::path& path);
void write_design_csv(const std::filesystem::path& path, const Matrix& X);

// Posterior samples: header "log_phi1,...,log_phip,z_delta,H".
void write_samples_csv(const std::filesystem::path& path, const WeightedSampleSet& samples);
WeightedSampleSet read_samples_csv(const std::filesystem::path& path);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ta2s2::bench

#endif  // TA2S2_BENCH_DATASET_HPP_
