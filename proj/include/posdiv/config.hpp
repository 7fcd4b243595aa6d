//==============================================================================
// Run configuration: flat dotted-key = value text with '#' comments.
// Unknown keys are rejected; the canonical form round-trips.
//==============================================================================
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "posdiv/cad.hpp"
#include "posdiv/errors.hpp"
#include "posdiv/solver.hpp"

namespace posdiv {

struct RunConfig {
    std::string problem_name = "orszag_tang";
    double problem_B0 = 0.0;   // 0 = problem default
    double problem_mach = 0.0; // 0 = problem default
    int grid_nx = 0;           // 0 = problem default
    int grid_ny = 0;
    double t_end = -1.0; // < 0 = problem default
    SolverConfig solver;
    double output_interval = 0.0; // 0 = final dump only
    std::string output_directory = "out";
    std::string output_formats = "csv"; // comma list: csv, vtk

    void set(const std::string& key, const std::string& value);
    std::string canonical() const;
};

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

inline void RunConfig::set(const std::string& key, const std::string& v) {
    if (key == "problem.name") problem_name = v;
    else if (key == "problem.B0") problem_B0 = parse_double(key, v);
    else if (key == "problem.mach") problem_mach = parse_double(key, v);
    else if (key == "grid.nx") grid_nx = parse_int(key, v);
    else if (key == "grid.ny") grid_ny = parse_int(key, v);
    else if (key == "t_end") t_end = parse_double(key, v);
    else if (key == "solver.k") solver.k = parse_int(key, v);
    else if (key == "cad.variant") {
        if (v == "cui_ding_wu") solver.cad_variant = CadVariant::CuiDingWu;
        else if (v == "zhang_shu") solver.cad_variant = CadVariant::ZhangShu;
        else throw ConfigError("config: unknown cad.variant '" + v + "'");
    } else if (key == "cfl.nu") solver.cfl_nu = parse_double(key, v);
    else if (key == "cfl.theta_cap") solver.theta_cap = parse_double(key, v);
    else if (key == "cfl.pp_bound") solver.pp_bound = parse_bool(key, v);
    else if (key == "cos.enabled") solver.cos_enabled = parse_bool(key, v);
    else if (key == "cos.c") solver.cos_c = parse_double(key, v);
    else if (key == "limiter.enabled") solver.limiter_enabled = parse_bool(key, v);
    else if (key == "audit.every") solver.audit_every = parse_int(key, v);
    else if (key == "output.interval") output_interval = parse_double(key, v);
    else if (key == "output.directory") output_directory = v;
    else if (key == "output.formats") output_formats = v;
    else throw ConfigError("config: unknown key '" + key + "'");
}

inline std::string RunConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "problem.name = " << problem_name << "\n";
    os << "problem.B0 = " << problem_B0 << "\n";
    os << "problem.mach = " << problem_mach << "\n";
    os << "grid.nx = " << grid_nx << "\n";
    os << "grid.ny = " << grid_ny << "\n";
    os << "t_end = " << t_end << "\n";
    os << "solver.k = " << solver.k << "\n";
    os << "cad.variant = " << to_string(solver.cad_variant) << "\n";
    os << "cfl.nu = " << solver.cfl_nu << "\n";
    os << "cfl.theta_cap = " << solver.theta_cap << "\n";
    os << "cfl.pp_bound = " << (solver.pp_bound ? "on" : "off") << "\n";
    os << "cos.enabled = " << (solver.cos_enabled ? "true" : "false") << "\n";
    os << "cos.c = " << solver.cos_c << "\n";
    os << "limiter.enabled = " << (solver.limiter_enabled ? "true" : "false") << "\n";
    os << "audit.every = " << solver.audit_every << "\n";
    os << "output.interval = " << output_interval << "\n";
    os << "output.directory = " << output_directory << "\n";
    os << "output.formats = " << output_formats << "\n";
    return os.str();
}

inline void apply_config_line(RunConfig& cfg, const std::string& raw) {
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    auto trim = [&](std::string& s) {
        while (!s.empty() && !notspace((unsigned char)s.front())) s.erase(s.begin());
        while (!s.empty() && !notspace((unsigned char)s.back())) s.pop_back();
    };
    trim(line);
    if (line.empty()) return;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    trim(key);
    trim(val);
    cfg.set(key, val);
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) apply_config_line(cfg, line);
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace posdiv
