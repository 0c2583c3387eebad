#ifndef TA2S2_BENCH_DESIGN_HPP_
#define TA2S2_BENCH_DESIGN_HPP_

#include <Eigen/Core>

#include "ta2s2/rng.hpp"

namespace ta2s2::bench {

// Latin hypercube design in [0,1)^p: every column has exactly one point in
// each stratum [j/n, (j+1)/n), jittered uniformly, columns permuted independently.
Eigen::MatrixXd lhs_design(Eigen::Index n, Eigen::Index p, Rng& rng);

}  // namespace ta2s2::bench

#endif  // TA2S2_BENCH_DESIGN_HPP_
