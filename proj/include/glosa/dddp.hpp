#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glosa/deterministic.hpp"
#include "glosa/escape.hpp"
#include "glosa/expected_cost.hpp"
#include "glosa/grid.hpp"
#include "glosa/sdp.hpp"

namespace glosa {

struct DddpParams {
    double delta_a0 = 0.5;       // initial discretization (m/s^2)
    double cx = 20.0, cv = 4.0;  // corridor multipliers, Delta_C = C * delta_a
    double delta_floor = 0.125;  // finest discretization level
    double improvement_eps = 1e-9;
    int max_iterations = 100;
    int jobs = 1;
};

struct DddpIterationRow {
    int iteration = 0;
    double delta_a = 0.0, delta_x = 0.0;
    double corridor_x = 0.0, corridor_v = 0.0;
    double cost = 0.0;
    bool improved = false;
};

struct DddpSolution {
    Trajectory trajectory;
    std::vector<DddpIterationRow> log;
    bool converged = false;
    int iterations = 0;
    double solve_seconds = 0.0;
    std::size_t escape_evals = 0;
};

/// Samples the continuous pessimistic solution at t = kT and projects the
/// controls onto the delta_a lattice by tracking the continuous speed samples
/// with the simulated discrete state (per-step speed error stays below
/// delta_a/2 instead of accumulating), then re-simulates the positions so the
/// result satisfies the discrete kinematics exactly.
inline Trajectory project_initializer(const DeterministicSolution& cont, const Scenario& sc,
                                      const Grid& grid) {
    const int K = sc.horizon();
    std::vector<double> controls(K);
    VehicleState cur = sc.initial();
    Trajectory traj;
    traj.states.push_back(cur);
    for (int k = 0; k < K; ++k) {
        const double v_next = cont.state_at((k + 1) * sc.T).v;
        double a = std::round((v_next - cur.v) / (grid.delta_a() * sc.T)) * grid.delta_a();
        a = std::min(std::max(a, grid.a_at(0)), grid.a_at(grid.na() - 1));
        controls[k] = a;
        cur = step_kinematics(cur, a, sc.T);
        traj.states.push_back(cur);
    }
    traj.controls = std::move(controls);
    return traj;
}

namespace detail {

inline std::vector<StageWindow> corridor_windows(const Trajectory& incumbent, const Grid& grid,
                                                 double cx, double cv) {
    const double half_x = cx * grid.delta_a();
    const double half_v = cv * grid.delta_a();
    const int rx = int(std::floor(half_x / grid.delta_x() + 1e-9));
    const int rv = int(std::floor(half_v / grid.delta_v() + 1e-9));
    std::vector<StageWindow> windows;
    windows.reserve(incumbent.states.size());
    for (const VehicleState& s : incumbent.states) {
        const int cxi = grid.x_index(s.x);
        const int cvi = grid.v_index(s.v);
        StageWindow w;
        w.x_lo = std::max(0, cxi - rx);
        w.x_hi = std::min(grid.nx() - 1, cxi + rx);
        w.v_lo = std::max(0, cvi - rv);
        w.v_hi = std::min(grid.nv() - 1, cvi + rv);
        if (w.x_lo > w.x_hi || w.v_lo > w.v_hi)
            throw std::logic_error("corridor_windows: incumbent outside the state bounds");
        windows.push_back(w);
    }
    return windows;
}

}  // namespace detail

/// One corridor-restricted Bellman solve around the incumbent. Controls range
/// over the full admissible set; only the states are confined to the tube
/// |x(k) - incumbent(k)| <= C * delta_a intersected with the state bounds.
inline Trajectory corridor_pass(const Trajectory& incumbent, double delta_a,
                                const DddpParams& params, const Scenario& sc,
                                EscapeCache& cache) {
    Grid grid(sc, delta_a);
    const int K = sc.horizon();
    std::vector<double> hazard(K);
    for (int k = 0; k < K; ++k) hazard[k] = sc.prior.switch_probability(k);

    auto windows = detail::corridor_windows(incumbent, grid, params.cx, params.cv);

    std::vector<std::vector<double>> esc_store(K + 1);
    std::vector<const double*> esc_by_stage(K + 1, nullptr);
    for (int k = 0; k < K; ++k) {
        if (hazard[k] <= 0.0) continue;
        const StageWindow& w = windows[k + 1];
        auto& arr = esc_store[k + 1];
        arr.resize(w.cells());
        for (int iv = w.v_lo; iv <= w.v_hi; ++iv)
            for (int ix = w.x_lo; ix <= w.x_hi; ++ix)
                arr[w.index(ix, iv)] = cache(grid.x_at(ix), grid.v_at(iv));
        esc_by_stage[k + 1] = arr.data();
    }

    ValuePolicyTable table = backward_sweep(grid, hazard, windows, esc_by_stage, params.jobs);
    // the start node is the scenario's own (snapped) start, inside window 0
    return extract_trajectory(table, grid, sc);
}

/// DDDP iterations from a caller-supplied incumbent (used by the MPC loop to
/// warm-start from the shifted previous solution).
inline DddpSolution solve_dddp_from(Trajectory incumbent, const Scenario& sc,
                                    const DddpParams& params) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    EscapeCache cache{EscapeModel(sc)};
    auto esc = [&cache](double x, double v) { return cache(x, v); };

    double delta_a = params.delta_a0;
    double cost = expected_trajectory_cost(incumbent, sc.prior, esc);

    DddpSolution sol;
    for (int it = 1; it <= params.max_iterations; ++it) {
        Trajectory cand = corridor_pass(incumbent, delta_a, params, sc, cache);
        const bool improved = cand.cost < cost - params.improvement_eps;
        Grid g(sc, delta_a);
        sol.log.push_back({it, delta_a, g.delta_x(), params.cx * delta_a, params.cv * delta_a,
                           cand.cost, improved});
        if (improved) {
            incumbent = std::move(cand);
            cost = incumbent.cost;
        } else if (delta_a / 2.0 < params.delta_floor - 1e-12) {
            sol.converged = true;
            break;
        } else {
            // grids nest under halving, so the incumbent stays on-node
            delta_a /= 2.0;
        }
    }
    incumbent.cost = cost;
    sol.trajectory = std::move(incumbent);
    sol.iterations = int(sol.log.size());
    sol.solve_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    sol.escape_evals = cache.misses();
    return sol;
}

/// Iterative corridor DDDP: solve inside a shrinking tube around the
/// incumbent, halving the discretization whenever a pass brings no
/// improvement, until a pass at the floor discretization stalls. The first
/// incumbent is the pessimistic deterministic solution (green at k_max),
/// sampled at T and projected to the initial lattice.
inline DddpSolution solve_dddp(const Scenario& sc, const DddpParams& params) {
    DeterministicSolution pess = constrained_glosa(sc, sc.horizon() * sc.T);
    for (int k = 0; k <= sc.horizon(); ++k) {
        const VehicleState s = pess.state_at(k * sc.T);
        if (!within(s.x, sc.bounds.x_min, sc.x_upper(), 1e-6) ||
            !within(s.v, sc.bounds.v_min, sc.bounds.v_max, 1e-6))
            throw std::domain_error(
                "solve_dddp: pessimistic initial trajectory violates the scenario bounds");
    }
    Trajectory init = project_initializer(pess, sc, Grid(sc, params.delta_a0));
    return solve_dddp_from(std::move(init), sc, params);
}

}  // namespace glosa
