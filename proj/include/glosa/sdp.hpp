#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "glosa/escape.hpp"
#include "glosa/expected_cost.hpp"
#include "glosa/grid.hpp"
#include "glosa/scenario.hpp"
#include "glosa/types.hpp"

namespace glosa {

constexpr double kInfCost = std::numeric_limits<double>::infinity();

/// Cost ties within this absolute margin are broken toward the
/// smallest-magnitude acceleration, positive preferred at equal magnitude.
constexpr double kTieTol = 1e-12;

inline bool tie_prefers(double a, double incumbent) {
    const double ma = std::abs(a), mi = std::abs(incumbent);
    if (ma < mi - 1e-15) return true;
    if (ma > mi + 1e-15) return false;
    return a > incumbent;
}

/// Index of the minimum cost with the documented tie-break rule.
/// Throws if every candidate is infinite.
inline int argmin_tiebreak(std::span<const double> costs, std::span<const double> accels) {
    if (costs.size() != accels.size() || costs.empty())
        throw std::invalid_argument("argmin_tiebreak: bad candidate set");
    double best = kInfCost, best_a = 0.0;
    int best_i = -1;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double phi = costs[i];
        if (phi == kInfCost) continue;
        if (phi < best - kTieTol) {
            best = phi;
            best_a = accels[i];
            best_i = int(i);
        } else if (phi <= best + kTieTol && tie_prefers(accels[i], best_a)) {
            if (phi < best) best = phi;
            best_a = accels[i];
            best_i = int(i);
        }
    }
    if (best_i < 0) throw std::domain_error("argmin_tiebreak: all candidates infeasible");
    return best_i;
}

/// Inclusive node-index box for one stage.
struct StageWindow {
    int x_lo = 0, x_hi = -1, v_lo = 0, v_hi = -1;
    int nx() const { return x_hi - x_lo + 1; }
    int nv() const { return v_hi - v_lo + 1; }
    std::size_t cells() const { return std::size_t(nx()) * std::size_t(nv()); }
    std::size_t index(int ix, int iv) const {
        return std::size_t(iv - v_lo) * std::size_t(nx()) + std::size_t(ix - x_lo);
    }
    bool contains(int ix, int iv) const {
        return ix >= x_lo && ix <= x_hi && iv >= v_lo && iv <= v_hi;
    }
};

/// Per-stage optimal cost-to-go V and control index R over the stage windows.
/// R = -1 marks cells with no feasible control (V stays +inf).
struct ValuePolicyTable {
    std::vector<StageWindow> windows;          // size K+1
    std::vector<std::vector<double>> value;    // size K+1
    std::vector<std::vector<int16_t>> policy;  // size K

    int horizon() const { return int(windows.size()) - 1; }

    double value_at(int k, int ix, int iv) const {
        const StageWindow& w = windows[k];
        return w.contains(ix, iv) ? value[k][w.index(ix, iv)] : kInfCost;
    }
    int control_index_at(int k, int ix, int iv) const {
        const StageWindow& w = windows[k];
        return w.contains(ix, iv) ? policy[k][w.index(ix, iv)] : -1;
    }
};

/// Backward Bellman sweep over per-stage windows:
///   Phi = (1/2) a^2 + p(0|k) * Jesc(x') + (1 - p(0|k)) * V[x', k+1]
/// with Phi = +inf when the successor leaves stage k+1's window. Escape
/// arrays are aligned to each stage's window; stages with p(0|k) = 0 may pass
/// nullptr. With jobs > 1 the rows of a stage are evaluated concurrently
/// (stage k only reads stage k+1).
inline ValuePolicyTable backward_sweep(const Grid& grid, const std::vector<double>& hazard,
                                       const std::vector<StageWindow>& windows,
                                       const std::vector<const double*>& escape_by_stage,
                                       int jobs = 1) {
    const int K = int(hazard.size());
    if (int(windows.size()) != K + 1 || int(escape_by_stage.size()) != K + 1)
        throw std::invalid_argument("backward_sweep: stage count mismatch");

    ValuePolicyTable table;
    table.windows = windows;
    table.value.resize(K + 1);
    table.policy.resize(K);
    table.value[K].assign(windows[K].cells(), 0.0);

    const int na = grid.na();
    std::vector<double> accel(na), half_a2(na);
    for (int ia = 0; ia < na; ++ia) {
        accel[ia] = grid.a_at(ia);
        half_a2[ia] = 0.5 * accel[ia] * accel[ia];
    }

    for (int k = K - 1; k >= 0; --k) {
        const StageWindow& w0 = windows[k];
        const StageWindow& w1 = windows[k + 1];
        const double p = hazard[k];
        const double q = 1.0 - p;
        const double* esc = escape_by_stage[k + 1];
        if (p > 0.0 && esc == nullptr)
            throw std::logic_error("backward_sweep: missing escape values for a stage with p>0");
        const double* v1 = table.value[k + 1].data();
        std::vector<double>& v0 = table.value[k];
        std::vector<int16_t>& r0 = table.policy[k];
        v0.assign(w0.cells(), kInfCost);
        r0.assign(w0.cells(), -1);
        const int nx1 = w1.nx();

        auto process_rows = [&](int v_begin, int v_end) {
            std::vector<double> row_best(w0.nx());
            std::vector<int16_t> row_ia(w0.nx());
            for (int iv = v_begin; iv < v_end; ++iv) {
                std::fill(row_best.begin(), row_best.end(), kInfCost);
                std::fill(row_ia.begin(), row_ia.end(), int16_t(-1));
                for (int ia = 0; ia < na; ++ia) {
                    const int ivp = iv + grid.voff(ia);
                    if (ivp < w1.v_lo || ivp > w1.v_hi) continue;
                    const int xoff = grid.xoff(iv, ia);
                    const int lo = std::max(w0.x_lo, w1.x_lo - xoff);
                    const int hi = std::min(w0.x_hi, w1.x_hi - xoff);
                    if (lo > hi) continue;
                    const double cost_a = half_a2[ia];
                    const double a = accel[ia];
                    const std::ptrdiff_t base1 =
                        std::ptrdiff_t(ivp - w1.v_lo) * nx1 + (xoff - w1.x_lo);
                    double* best = row_best.data();
                    int16_t* bia = row_ia.data();
                    if (p > 0.0) {
                        for (int ix = lo; ix <= hi; ++ix) {
                            const std::ptrdiff_t j = base1 + ix;
                            const double phi = cost_a + p * esc[j] + q * v1[j];
                            const int c = ix - w0.x_lo;
                            if (phi < best[c] - kTieTol) {
                                best[c] = phi;
                                bia[c] = int16_t(ia);
                            } else if (bia[c] >= 0 && phi <= best[c] + kTieTol &&
                                       tie_prefers(a, accel[bia[c]])) {
                                if (phi < best[c]) best[c] = phi;
                                bia[c] = int16_t(ia);
                            }
                        }
                    } else {
                        for (int ix = lo; ix <= hi; ++ix) {
                            const std::ptrdiff_t j = base1 + ix;
                            const double phi = cost_a + v1[j];
                            const int c = ix - w0.x_lo;
                            if (phi < best[c] - kTieTol) {
                                best[c] = phi;
                                bia[c] = int16_t(ia);
                            } else if (bia[c] >= 0 && phi <= best[c] + kTieTol &&
                                       tie_prefers(a, accel[bia[c]])) {
                                if (phi < best[c]) best[c] = phi;
                                bia[c] = int16_t(ia);
                            }
                        }
                    }
                }
                const std::size_t out = w0.index(w0.x_lo, iv);
                std::copy(row_best.begin(), row_best.end(), v0.begin() + out);
                std::copy(row_ia.begin(), row_ia.end(), r0.begin() + out);
            }
        };

        const int rows = w0.nv();
        if (jobs <= 1 || rows < 2 * jobs) {
            process_rows(w0.v_lo, w0.v_hi + 1);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (rows + jobs - 1) / jobs;
            for (int j = 0; j < jobs; ++j) {
                const int b = w0.v_lo + j * chunk;
                const int e = std::min(w0.v_hi + 1, b + chunk);
                if (b < e) pool.emplace_back(process_rows, b, e);
            }
            for (auto& t : pool) t.join();
        }
    }
    return table;
}

struct SdpOptions {
    int jobs = 1;
};

struct SdpSolution {
    ValuePolicyTable table;
    Grid grid;
    double value = kInfCost;      // V at the (snapped) initial node, stage 0
    Trajectory trajectory;        // no-switch rollout of the policy
    double escape_warm_seconds = 0.0;
    double sweep_seconds = 0.0;
    std::size_t escape_evals = 0;
    std::size_t infeasible_cells = 0;
};

/// Rolls the policy forward from the scenario's (snapped) initial node
/// assuming the light never switches before k_max. Trajectory cost is the
/// stage-0 value at the start node.
inline Trajectory extract_trajectory(const ValuePolicyTable& table, const Grid& grid,
                                     const Scenario& sc) {
    const int K = table.horizon();
    Trajectory traj;
    int ix = grid.ix0(), iv = grid.iv0();
    traj.cost = table.value_at(0, ix, iv);
    if (traj.cost == kInfCost)
        throw std::domain_error("extract_trajectory: no feasible policy from the initial state");
    traj.states.push_back({grid.x_at(ix), grid.v_at(iv)});
    traj.controls.reserve(K);
    for (int k = 0; k < K; ++k) {
        const int ia = table.control_index_at(k, ix, iv);
        if (ia < 0) throw std::logic_error("extract_trajectory: policy rollout left the grid");
        traj.controls.push_back(grid.a_at(ia));
        ix += grid.xoff(iv, ia);
        iv += grid.voff(ia);
        traj.states.push_back({grid.x_at(ix), grid.v_at(iv)});
    }
    return traj;
}

/// Full-grid stochastic dynamic programming solve.
inline SdpSolution solve_sdp(const Scenario& sc, double delta_a, const SdpOptions& opts = {}) {
    using clock = std::chrono::steady_clock;
    Grid grid(sc, delta_a);
    const int K = sc.horizon();
    std::vector<double> hazard(K);
    for (int k = 0; k < K; ++k) hazard[k] = sc.prior.switch_probability(k);

    StageWindow full{0, grid.nx() - 1, 0, grid.nv() - 1};
    std::vector<StageWindow> windows(K + 1, full);

    // Escape cost is switching-step independent, so one dense table covers
    // every stage.
    const EscapeModel model(sc);
    std::vector<double> esc(full.cells());
    const auto t0 = clock::now();
    auto warm_rows = [&](int v_begin, int v_end) {
        for (int iv = v_begin; iv < v_end; ++iv) {
            const double v = grid.v_at(iv);
            double* out = esc.data() + full.index(0, iv);
            for (int ix = 0; ix < grid.nx(); ++ix) out[ix] = model.cost(grid.x_at(ix), v);
        }
    };
    if (opts.jobs <= 1) {
        warm_rows(0, grid.nv());
    } else {
        std::vector<std::thread> pool;
        const int chunk = (grid.nv() + opts.jobs - 1) / opts.jobs;
        for (int j = 0; j < opts.jobs; ++j) {
            const int b = j * chunk, e = std::min(grid.nv(), b + chunk);
            if (b < e) pool.emplace_back(warm_rows, b, e);
        }
        for (auto& t : pool) t.join();
    }
    const auto t1 = clock::now();

    std::vector<const double*> esc_by_stage(K + 1, esc.data());
    SdpSolution sol{backward_sweep(grid, hazard, windows, esc_by_stage, opts.jobs),
                    grid};
    const auto t2 = clock::now();

    sol.escape_warm_seconds = std::chrono::duration<double>(t1 - t0).count();
    sol.sweep_seconds = std::chrono::duration<double>(t2 - t1).count();
    sol.escape_evals = esc.size();
    for (const auto& stage : sol.table.value)
        for (double v : stage)
            if (v == kInfCost) ++sol.infeasible_cells;
    sol.value = sol.table.value_at(0, grid.ix0(), grid.iv0());
    sol.trajectory = extract_trajectory(sol.table, grid, sc);
    return sol;
}

}  // namespace glosa
