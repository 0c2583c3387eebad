#ifndef TA2S2_ANNEALING_HPP_
#define TA2S2_ANNEALING_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ta2s2 {

// Sentinel temperature of the initial (uniform) level.
inline constexpr double kInfiniteTemperature = std::numeric_limits<double>::infinity();

struct ImportanceWeights {
  std::vector<double> raw;         // max-shifted, largest entry is 1
  std::vector<double> normalised;  // sums to 1
};

/// Samples of one level together with their H values and the importance
/// weights carrying them to the next temperature.
struct WeightedSampleSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> H;
  std::vector<double> raw_weights;
  std::vector<double> norm_weights;

  std::size_t size() const { return points.size(); }
  // Equal weights 1/N.
  void set_uniform_weights();
};

struct TemperatureLadder {
  std::vector<double> taus{kInfiniteTemperature};
  std::vector<double> ess{};  // ess[k-1] belongs to the transition taus[k-1] -> taus[k]
  double gamma = 0.5;
  int max_levels = 50;

  std::size_t levels() const { return taus.size() - 1; }
  bool complete() const { return levels() > 0 && taus.back() == 1.0; }
};

// omega_j ~ exp(-H_j (1/tau_next - 1/tau_prev)), normalised with a max-shift.
// Infinite H gets zero weight; throws DegenerateWeightsError if nothing is left.
ImportanceWeights importance_weights(std::span<const double> H, double tau_prev, double tau_next);

// 1 / sum(w^2)
double effective_sample_size(std::span<const double> norm_weights);

// ESS of the reweighting tau_prev -> 1/beta_next.
double ess_at_inverse_temperature(std::span<const double> H, double tau_prev, double beta_next);

// Next temperature solving ESS(tau) = gamma * N by bisection on beta = 1/tau.
// Returns exactly 1 when ESS(1) >= gamma * N.
double next_temperature(std::span<const double> H, double tau_prev, double gamma);

}  // namespace ta2s2

#endif  // TA2S2_ANNEALING_HPP_
