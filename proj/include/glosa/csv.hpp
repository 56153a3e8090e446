#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glosa/ddp.hpp"
#include "glosa/dddp.hpp"
#include "glosa/sdp.hpp"
#include "glosa/types.hpp"

namespace glosa {

/// 9 significant digits, the precision of every CSV the harness emits.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Header `k,t,x,v,a`; the terminal row carries no control.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double T) {
    os << "k,t,x,v,a\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        os << k << ',' << fmt9(double(k) * T) << ',' << fmt9(traj.states[k].x) << ','
           << fmt9(traj.states[k].v) << ',';
        if (k < traj.controls.size()) os << fmt9(traj.controls[k]);
        os << '\n';
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj, double T) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_trajectory_csv(os, traj, T);
}

inline Trajectory read_trajectory_csv(std::istream& is) {
    Trajectory traj;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: empty file");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        while (cells.size() < 5) cells.emplace_back();
        traj.states.push_back({std::stod(cells[2]), std::stod(cells[3])});
        if (!cells[4].empty()) traj.controls.push_back(std::stod(cells[4]));
    }
    return traj;
}

inline Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_trajectory_csv(is);
}

inline void write_dddp_log_csv(std::ostream& os, const std::vector<DddpIterationRow>& log) {
    os << "iteration,delta_a,delta_x,cost,improved\n";
    for (const auto& r : log)
        os << r.iteration << ',' << fmt9(r.delta_a) << ',' << fmt9(r.delta_x) << ','
           << fmt9(r.cost) << ',' << (r.improved ? 1 : 0) << '\n';
}

inline void write_ddp_log_csv(std::ostream& os, const std::vector<DdpIterationRow>& log) {
    os << "iteration,cost,epsilon,control_change_norm,clamp_count,convexity_projections\n";
    for (const auto& r : log)
        os << r.iteration << ',' << fmt9(r.cost) << ',' << fmt9(r.epsilon_used) << ','
           << fmt9(r.control_change_norm) << ',' << r.clamp_events << ','
           << r.convexity_projections << '\n';
}

/// One row per grid node of stage k: `k,x,v,V,a*` (infeasible cells skipped).
inline void write_policy_slice_csv(std::ostream& os, const ValuePolicyTable& table,
                                   const Grid& grid, int k) {
    if (k < 0 || k > table.horizon()) throw std::invalid_argument("policy slice: bad stage");
    os << "k,x,v,V,a\n";
    const StageWindow& w = table.windows[k];
    for (int iv = w.v_lo; iv <= w.v_hi; ++iv) {
        for (int ix = w.x_lo; ix <= w.x_hi; ++ix) {
            const double v = table.value[k][w.index(ix, iv)];
            if (v == kInfCost) continue;
            os << k << ',' << fmt9(grid.x_at(ix)) << ',' << fmt9(grid.v_at(iv)) << ',' << fmt9(v)
               << ',';
            if (k < table.horizon()) {
                const int ia = table.policy[k][w.index(ix, iv)];
                if (ia >= 0) os << fmt9(grid.a_at(ia));
            }
            os << '\n';
        }
    }
}

}  // namespace glosa
