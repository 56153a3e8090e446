#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "glosa/mpc.hpp"

namespace glosa {

struct RunReport {
    std::string scenario_id;
    std::string solver_id;
    double cost = 0.0;
    int iterations = 0;   // 0 for the one-shot solver
    double wall_seconds = 0.0;
    std::string trajectory_path;
    std::string log_path;
    nlohmann::json config_echo;
    bool converged = true;
    nlohmann::json extra;  // solver-specific details (snap distances, timings)
};

inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json j{{"scenario", r.scenario_id}, {"solver", r.solver_id},
                     {"cost", r.cost},           {"iterations", r.iterations},
                     {"wall_seconds", r.wall_seconds}, {"trajectory", r.trajectory_path},
                     {"log", r.log_path},        {"converged", r.converged},
                     {"config", r.config_echo}};
    if (!r.extra.is_null()) j["details"] = r.extra;
    return j;
}

inline void write_report(const std::string& path, const RunReport& r) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << to_json(r).dump(2) << '\n';
}

}  // namespace glosa
