#pragma once

#include <stdexcept>
#include <vector>

#include "glosa/scenario.hpp"
#include "glosa/types.hpp"

namespace glosa {

/// Expected cost of committing to `traj` until the light switches: the prior
/// weights each switching step k1 with the acceleration cost accrued before
/// it plus the escape cost from the state reached at k1.
///   J = sum_k1 P(k1) [ (1/2) sum_{k<k1} a(k)^2 + esc(x(k1)) ]
template <class EscapeFn>
double expected_trajectory_cost(const Trajectory& traj, const SwitchingPrior& prior,
                                EscapeFn&& esc) {
    const int kmax = prior.k_max();
    if (int(traj.horizon()) < kmax)
        throw std::invalid_argument("expected_trajectory_cost: trajectory shorter than k_max");
    std::vector<double> accum(kmax + 1, 0.0);
    for (int k = 0; k < kmax; ++k)
        accum[k + 1] = accum[k] + 0.5 * traj.controls[k] * traj.controls[k];
    double total = 0.0;
    for (int k1 = prior.k_min(); k1 <= kmax; ++k1)
        total += prior.mass(k1) * (accum[k1] + esc(traj.states[k1].x, traj.states[k1].v));
    return total;
}

}  // namespace glosa
