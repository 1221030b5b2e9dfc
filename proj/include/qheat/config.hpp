#pragma once

// Run configuration: one flat key=value file plus command-line overrides.
// Every invariant violation is reported with the offending key name before
// any computation starts.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qheat/qcore.hpp"

namespace qheat {

struct RunConfig {
    std::string command;  // selftest | forward | inverse-source | inverse-initial
    double q = 0.5;
    double T = 1.0;
    int K = 6;
    int K_reg = 2;
    int m_max = 60;
    double tail_tol = 1e-14;
    std::string scenario;  // empty selects the command's default scenario
    double alpha = 0.0;
    double xi0 = 0.0;      // 0 selects xi0 = T
    double noise = 0.0;    // relative perturbation of psi, diagnostics only
    std::string out_path = "qheat_out.csv";
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw validation_error("invalid numeric value for key '" + key + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw validation_error("invalid integer value for key '" + key + "'");
    }
}

}  // namespace detail

/// Apply a single key=value setting.
inline void config_set(RunConfig& cfg, const std::string& key,
                       const std::string& value) {
    if (key == "q")
        cfg.q = detail::parse_double(key, value);
    else if (key == "T")
        cfg.T = detail::parse_double(key, value);
    else if (key == "K")
        cfg.K = detail::parse_int(key, value);
    else if (key == "K_reg")
        cfg.K_reg = detail::parse_int(key, value);
    else if (key == "m_max")
        cfg.m_max = detail::parse_int(key, value);
    else if (key == "tail_tol")
        cfg.tail_tol = detail::parse_double(key, value);
    else if (key == "scenario")
        cfg.scenario = value;
    else if (key == "alpha")
        cfg.alpha = detail::parse_double(key, value);
    else if (key == "xi0")
        cfg.xi0 = detail::parse_double(key, value);
    else if (key == "noise")
        cfg.noise = detail::parse_double(key, value);
    else if (key == "out")
        cfg.out_path = value;
    else
        throw validation_error("unknown config key '" + key + "'");
}

/// Load key=value lines ('#' starts a comment, blank lines ignored).
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(lineno) +
                                   " is not key=value");
        config_set(cfg, detail::trim(line.substr(0, eq)),
                   detail::trim(line.substr(eq + 1)));
    }
}

/// Check every invariant, naming the offending key.
inline void validate_config(const RunConfig& cfg) {
    if (cfg.command != "selftest" && cfg.command != "forward" &&
        cfg.command != "inverse-source" && cfg.command != "inverse-initial")
        throw validation_error("unknown command '" + cfg.command + "'");
    if (!(cfg.q > 0.0) || !(cfg.q < 1.0))
        throw validation_error("config key 'q' must satisfy 0 < q < 1");
    if (!(cfg.T > 0.0)) throw validation_error("config key 'T' must be positive");
    if (cfg.K < 1) throw validation_error("config key 'K' must be >= 1");
    if (cfg.K_reg < 1)
        throw validation_error("config key 'K_reg' must be >= 1");
    if (cfg.m_max < 1)
        throw validation_error("config key 'm_max' must be >= 1");
    if (!(cfg.tail_tol > 0.0))
        throw validation_error("config key 'tail_tol' must be positive");
    if (!(std::abs(cfg.alpha) <= 1.0))
        throw validation_error("config key 'alpha' must satisfy |alpha| <= 1");
    if (cfg.xi0 < 0.0 || cfg.xi0 > cfg.T)
        throw validation_error("config key 'xi0' must lie in [0, T] (0 means T)");
    if (cfg.noise < 0.0)
        throw validation_error("config key 'noise' must be >= 0");
    if (cfg.out_path.empty())
        throw validation_error("config key 'out' must not be empty");
}

/// Parse argv: one positional command, then --config <path>, repeated
/// --set key=value, --out <path>.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;
    size_t i = 0;
    if (i < args.size() && args[i].rfind("--", 0) != 0) cfg.command = args[i++];
    if (cfg.command.empty())
        throw validation_error(
            "usage: qheat <selftest|forward|inverse-source|inverse-initial> "
            "[--config <path>] [--set key=value]... [--out <path>]");
    for (; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto need_value = [&](const std::string& flag) -> const std::string& {
            if (i + 1 >= args.size())
                throw validation_error("flag " + flag + " needs a value");
            return args[++i];
        };
        if (a == "--config") {
            load_config_file(cfg, need_value(a));
        } else if (a == "--set") {
            const std::string& kv = need_value(a);
            size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw validation_error("--set expects key=value, got '" + kv + "'");
            config_set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        } else if (a == "--out") {
            cfg.out_path = need_value(a);
        } else {
            throw validation_error("unknown argument '" + a + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

}  // namespace qheat
