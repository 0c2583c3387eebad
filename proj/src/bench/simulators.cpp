#include "ta2s2/bench/simulators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ta2s2/error.hpp"

namespace ta2s2::bench {

double franke(std::span<const double> x) {
  if (x.size() != 2) throw DomainError("franke: expects 2 inputs");
  const double a = 9.0 * x[0];
  const double b = 9.0 * x[1];
  return 0.75 * std::exp(-(a - 2.0) * (a - 2.0) / 4.0 - (b - 2.0) * (b - 2.0) / 4.0) +
         0.75 * std::exp(-(a + 1.0) * (a + 1.0) / 49.0 - (b + 1.0) / 10.0) +
         0.5 * std::exp(-(a - 7.0) * (a - 7.0) / 4.0 - (b - 3.0) * (b - 3.0) / 4.0) -
         0.2 * std::exp(-(a - 4.0) * (a - 4.0) - (b - 7.0) * (b - 7.0));
}

double wing_weight(std::span<const double> x) {
  if (x.size() != kWingWeightRanges.size()) throw DomainError("wing_weight: expects 10 inputs");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& r = kWingWeightRanges[i];
    if (!(x[i] >= r.lower && x[i] <= r.upper))
      throw DomainError("wing_weight: " + std::string(r.name) + " = " + std::to_string(x[i]) + " out of range");
  }
  const double Sw = x[0], Wfw = x[1], A = x[2], q = x[4], taper = x[5], tc = x[6], Nz = x[7], Wdg = x[8], Wp = x[9];
  const double cos_sweep = std::cos(x[3] * std::numbers::pi / 180.0);
  return 0.036 * std::pow(Sw, 0.758) * std::pow(Wfw, 0.0035) * std::pow(A / (cos_sweep * cos_sweep), 0.6) *
             std::pow(q, 0.006) * std::pow(taper, 0.04) * std::pow(100.0 * tc / cos_sweep, -0.3) *
             std::pow(Nz * Wdg, 0.49) +
         Sw * Wp;
}

}  // namespace ta2s2::bench
