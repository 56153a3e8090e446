#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "glosa/ddp.hpp"
#include "glosa/dddp.hpp"
#include "glosa/escape.hpp"
#include "glosa/rng.hpp"
#include "glosa/scenario.hpp"
#include "glosa/sdp.hpp"

namespace glosa {

enum class SolverKind { Sdp, Dddp, Ddp };

inline const char* to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Sdp: return "sdp";
        case SolverKind::Dddp: return "dddp";
        case SolverKind::Ddp: return "ddp";
    }
    return "?";
}

struct MpcParams {
    uint64_t seed = 1;
    bool resolve_every_step = false;  // condition the prior and re-solve each step
};

struct MpcRun {
    uint64_t seed = 0;
    int realized_k1 = 0;
    std::vector<VehicleState> states;   // pre-switch states, 0..k1
    std::vector<double> controls;       // applied controls, 0..k1-1
    double pre_switch_cost = 0.0;       // (1/2) sum a^2
    double tail_cost = 0.0;             // deterministic cost-to-go at switching
    double realized_cost = 0.0;
    double tail_te = 0.0;               // horizon of the post-switch arc
    int resolves = 0;
};

namespace detail {

/// Scenario as seen from step k_now given no switch so far: current state as
/// the start, prior conditioned on k1 > k_now and re-indexed to origin 0.
inline Scenario shifted_scenario(const Scenario& sc, VehicleState cur, int k_now) {
    Scenario s = sc;
    s.x0 = cur.x;
    s.v0 = cur.v;
    if (k_now > 0) s.prior = sc.prior.conditioned(k_now).shifted(k_now);
    return s;
}

inline Trajectory shift_trajectory(const Trajectory& t, int drop) {
    Trajectory out;
    out.states.assign(t.states.begin() + drop, t.states.end());
    out.controls.assign(t.controls.begin() + drop, t.controls.end());
    return out;
}

/// Hold the last control so a shifted warm start still spans the horizon.
inline void pad_to_horizon(Trajectory& t, int K, double T, const Bounds& b) {
    while (int(t.horizon()) < K) {
        const double a = 0.0;
        t.controls.push_back(a);
        t.states.push_back(step_kinematics(t.states.back(), a, T));
    }
    (void)b;
}

}  // namespace detail

/// Closed-loop simulation with a realized switching process: one uniform draw
/// per step is compared against p(0|k); before switching the first control of
/// the current solution is applied (with optional re-solving on the
/// conditioned prior); from the switching step on, the vehicle follows the
/// deterministic post-switch arc, whose cost is the escape cost at the
/// switching state.
inline MpcRun mpc_simulate(const Scenario& sc, SolverKind solver, double sdp_delta,
                           const DddpParams& dddp_params, const DdpParams& ddp_params,
                           const MpcParams& mpc) {
    Rng rng(mpc.seed);
    const EscapeModel escape(sc);
    const int K = sc.horizon();

    MpcRun run;
    run.seed = mpc.seed;
    run.states.push_back(sc.initial());

    // initial plan
    std::optional<SdpSolution> sdp;
    Trajectory plan;
    if (solver == SolverKind::Sdp) {
        sdp = solve_sdp(sc, sdp_delta);
        plan = sdp->trajectory;
    } else if (solver == SolverKind::Dddp) {
        plan = solve_dddp(sc, dddp_params).trajectory;
    } else {
        plan = solve_ddp(sc, ddp_params).trajectory;
    }

    int k1 = K;
    for (int k = 0; k < K; ++k) {
        VehicleState cur = run.states.back();
        double a = 0.0;
        if (solver == SolverKind::Sdp) {
            // the table's hazards are already conditioned on "no switch yet",
            // so a policy lookup replaces any re-solve
            const int ia = sdp->table.control_index_at(k, sdp->grid.x_index(cur.x),
                                                       sdp->grid.v_index(cur.v));
            if (ia < 0) throw std::logic_error("mpc_simulate: policy lookup left the table");
            a = sdp->grid.a_at(ia);
        } else if (mpc.resolve_every_step && k > 0) {
            const Scenario sub = detail::shifted_scenario(sc, cur, k);
            Trajectory warm = detail::shift_trajectory(plan, 1);
            detail::pad_to_horizon(warm, sub.horizon(), sub.T, sub.bounds);
            warm.states.front() = cur;
            if (solver == SolverKind::Dddp) {
                plan = solve_dddp_from(std::move(warm), sub, dddp_params).trajectory;
            } else {
                plan = solve_ddp_from(std::move(warm), sub, ddp_params).trajectory;
            }
            ++run.resolves;
            a = plan.controls.front();
        } else if (mpc.resolve_every_step) {
            a = plan.controls.front();
        } else {
            a = plan.controls[k];
        }

        run.controls.push_back(a);
        run.pre_switch_cost += 0.5 * a * a;
        run.states.push_back(step_kinematics(cur, a, sc.T));

        // z(k) = 0 (switch at k+1) with probability p(0|k); one draw per step
        const double u = rng.uniform01();
        const double p = sc.prior.switch_probability(k);
        if (u < p) {
            k1 = k + 1;
            break;
        }
    }

    run.realized_k1 = k1;
    const EscapeModel::Arc tail = escape.solve(run.states.back().x, run.states.back().v);
    run.tail_cost = tail.energy;
    run.tail_te = tail.te;
    run.realized_cost = run.pre_switch_cost + run.tail_cost;
    return run;
}

}  // namespace glosa
