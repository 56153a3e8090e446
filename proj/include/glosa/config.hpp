#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "glosa/ddp.hpp"
#include "glosa/dddp.hpp"
#include "glosa/mpc.hpp"
#include "glosa/scenario.hpp"

namespace glosa {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Scenario scenario;
    double sdp_delta_a = 0.125;
    DddpParams dddp;
    DdpParams ddp;
    MpcParams mpc;
};

namespace detail {

inline double need_number(const nlohmann::json& j, const std::string& section,
                          const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config: missing field \"" + section + "." + key + "\"");
    if (!j[key].is_number())
        throw ConfigError("config: field \"" + section + "." + key + "\" must be a number");
    return j[key].get<double>();
}

inline double opt_number(const nlohmann::json& j, const std::string& section,
                         const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("config: field \"" + section + "." + key + "\" must be a number");
    return j[key].get<double>();
}

}  // namespace detail

inline SwitchingPrior parse_prior(const nlohmann::json& p) {
    const int k_min = int(detail::need_number(p, "prior", "k_min"));
    const int k_max = int(detail::need_number(p, "prior", "k_max"));
    if (p.contains("p")) {
        if (!p["p"].is_array()) throw ConfigError("config: \"prior.p\" must be an array");
        std::vector<double> probs = p["p"].get<std::vector<double>>();
        if (int(probs.size()) != k_max - k_min + 1)
            throw ConfigError("config: \"prior.p\" length must equal k_max - k_min + 1");
        return SwitchingPrior(k_min, std::move(probs));
    }
    const std::string dist = p.value("distribution", "uniform");
    if (dist != "uniform")
        throw ConfigError("config: unknown \"prior.distribution\" (use \"uniform\" or \"p\")");
    return SwitchingPrior::uniform(k_min, k_max);
}

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    if (!j.contains("scenario")) throw ConfigError("config: missing section \"scenario\"");
    const auto& s = j["scenario"];
    Scenario& sc = cfg.scenario;
    sc.id = s.value("id", "scenario");
    sc.x0 = detail::need_number(s, "scenario", "x0");
    sc.v0 = detail::need_number(s, "scenario", "v0");
    sc.xe = detail::need_number(s, "scenario", "xe");
    sc.ve = detail::need_number(s, "scenario", "ve");
    sc.x1 = detail::need_number(s, "scenario", "x1");
    sc.w = detail::need_number(s, "scenario", "w");
    sc.T = detail::opt_number(s, "scenario", "T", 1.0);
    if (!s.contains("bounds")) throw ConfigError("config: missing section \"scenario.bounds\"");
    const auto& b = s["bounds"];
    sc.bounds.x_min = detail::need_number(b, "scenario.bounds", "x_min");
    sc.bounds.x_max = detail::need_number(b, "scenario.bounds", "x_max");
    sc.bounds.v_min = detail::need_number(b, "scenario.bounds", "v_min");
    sc.bounds.v_max = detail::need_number(b, "scenario.bounds", "v_max");
    sc.bounds.a_min = detail::need_number(b, "scenario.bounds", "a_min");
    sc.bounds.a_max = detail::need_number(b, "scenario.bounds", "a_max");
    if (!j.contains("prior")) throw ConfigError("config: missing section \"prior\"");
    sc.prior = parse_prior(j["prior"]);

    if (j.contains("sdp"))
        cfg.sdp_delta_a = detail::opt_number(j["sdp"], "sdp", "delta_a", cfg.sdp_delta_a);
    if (j.contains("dddp")) {
        const auto& d = j["dddp"];
        cfg.dddp.delta_a0 = detail::opt_number(d, "dddp", "delta_a0", cfg.dddp.delta_a0);
        cfg.dddp.cv = detail::opt_number(d, "dddp", "cv", cfg.dddp.cv);
        cfg.dddp.cx = detail::opt_number(d, "dddp", "cx", 5.0 * cfg.dddp.cv);
        cfg.dddp.delta_floor = detail::opt_number(d, "dddp", "delta_floor", cfg.dddp.delta_floor);
        cfg.dddp.max_iterations =
            int(detail::opt_number(d, "dddp", "max_iterations", cfg.dddp.max_iterations));
    } else {
        cfg.dddp.cx = 5.0 * cfg.dddp.cv;
    }
    if (j.contains("ddp")) {
        const auto& d = j["ddp"];
        cfg.ddp.epsilon = detail::opt_number(d, "ddp", "epsilon", cfg.ddp.epsilon);
        cfg.ddp.epsilon1 = detail::opt_number(d, "ddp", "epsilon1", cfg.ddp.epsilon1);
        cfg.ddp.max_iterations =
            int(detail::opt_number(d, "ddp", "max_iterations", cfg.ddp.max_iterations));
        if (d.contains("stencil")) {
            cfg.ddp.stencil_hx = detail::opt_number(d["stencil"], "ddp.stencil", "hx",
                                                    cfg.ddp.stencil_hx);
            cfg.ddp.stencil_hv = detail::opt_number(d["stencil"], "ddp.stencil", "hv",
                                                    cfg.ddp.stencil_hv);
        }
    }
    if (j.contains("mpc")) {
        const auto& m = j["mpc"];
        cfg.mpc.seed = uint64_t(detail::opt_number(m, "mpc", "seed", double(cfg.mpc.seed)));
        if (m.contains("resolve")) {
            if (!m["resolve"].is_boolean())
                throw ConfigError("config: field \"mpc.resolve\" must be a boolean");
            cfg.mpc.resolve_every_step = m["resolve"].get<bool>();
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: parse error in \"" + path + "\": " + e.what());
    }
    return parse_config(j);
}

}  // namespace glosa
