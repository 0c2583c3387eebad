#ifndef TA2S2_BENCH_SIMULATORS_HPP_
#define TA2S2_BENCH_SIMULATORS_HPP_

#include <array>
#include <span>
#include <string_view>
#include <utility>

#include <Eigen/Core>

namespace ta2s2::bench {

// Franke's function on [0,1]^2 with two peaks and one dip. The second term
// uses a linear (9 x2 + 1) / 10 exponent, unlike the classical squared form.
double franke(std::span<const double> x);

// Wing weight of a light aircraft. Inputs in natural units, in order
// S_w, W_fw, A, Lambda (degrees), q, lambda, t_c, N_z, W_dg, W_p.
// Throws DomainError if any input leaves its range.
double wing_weight(std::span<const double> x);

struct InputRange {
  std::string_view name;
  double lower;
  double upper;
};

inline constexpr std::array<InputRange, 10> kWingWeightRanges{{
    {"S_w", 150.0, 200.0},
    {"W_fw", 220.0, 300.0},
    {"A", 6.0, 10.0},
    {"Lambda", -10.0, 10.0},
    {"q", 16.0, 45.0},
    {"lambda", 0.5, 1.0},
    {"t_c", 0.08, 0.18},
    {"N_z", 2.5, 6.0},
    {"W_dg", 1700.0, 2500.0},
    {"W_p", 0.025, 0.08},
}};

}  // namespace ta2s2::bench

#endif  // TA2S2_BENCH_SIMULATORS_HPP_
