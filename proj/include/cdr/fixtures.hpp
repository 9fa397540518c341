#pragma once

#include "cdr/distribution.hpp"
#include "cdr/gnp.hpp"
#include "cdr/random.hpp"

namespace cdr {

// Random 1-d DiscreteGrid law with 2..max_points points, prior in
// [0.05, 0.95] and exponential-weight tables. Roughly a third of the
// fixtures copy one point's (q0, q1) direction onto another so that
// posterior ties occur.
JointDistribution random_grid_fixture(Rng& rng, int max_points = 16);

// theta0 < theta1 in [0, 1], alpha in [0.01, 0.99].
GnpProblem random_gnp_problem(Rng& rng);

// Random 0/1 membership vector of the given length.
Eigen::VectorXd random_membership(Rng& rng, Eigen::Index size);

}  // namespace cdr
