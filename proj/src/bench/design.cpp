#include "ta2s2/bench/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ta2s2/error.hpp"

namespace ta2s2::bench {

Eigen::MatrixXd lhs_design(Eigen::Index n, Eigen::Index p, Rng& rng) {
  if (n < 1 || p < 1) throw DomainError("lhs_design: n and p must be positive");
  Eigen::MatrixXd X(n, p);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < p; ++col) {
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    // Fisher-Yates with our own uniform draws keeps designs identical across standard libraries.
    for (std::size_t i = strata.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(strata[i - 1], strata[std::min(j, i - 1)]);
    }
    for (Eigen::Index row = 0; row < n; ++row) {
      const double s = static_cast<double>(strata[static_cast<std::size_t>(row)]);
      double v = (s + uniform01(rng)) / static_cast<double>(n);
      // Keep round-off from pushing a point into the next stratum.
      const double upper = std::nextafter((s + 1.0) / static_cast<double>(n), 0.0);
      X(row, col) = std::min(v, upper);
    }
  }
  return X;
}

}  // namespace ta2s2::bench
