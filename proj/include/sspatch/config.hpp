#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/gas.hpp"
#include "sspatch/mesh.hpp"

namespace sspatch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace toml {

using Value = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;
using Table = std::map<std::string, std::map<std::string, Value>>;

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline Value parse_scalar(const std::string& raw, const std::string& where) {
    const std::string v = strip(raw);
    if (v.empty()) throw ConfigError(where + ": empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError(where + ": unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": cannot parse value '" + v + "'");
    }
}

inline Value parse_value(const std::string& raw, const std::string& where) {
    const std::string v = strip(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError(where + ": unterminated array");
        std::vector<std::string> items;
        std::string cur;
        bool in_string = false;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            const char c = v[i];
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                items.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!strip(cur).empty()) items.push_back(cur);
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool numeric = true;
        for (const auto& item : items) {
            const Value val = parse_scalar(item, where);
            if (std::holds_alternative<double>(val)) {
                nums.push_back(std::get<double>(val));
            } else if (std::holds_alternative<std::string>(val)) {
                numeric = false;
                strs.push_back(std::get<std::string>(val));
            } else {
                throw ConfigError(where + ": unsupported array element");
            }
        }
        if (!numeric && !nums.empty()) throw ConfigError(where + ": mixed array types");
        if (numeric) return nums;
        return strs;
    }
    return parse_scalar(v, where);
}

inline Table parse(std::istream& in, const std::string& name) {
    Table table;
    std::string section = "";
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside strings
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line.erase(i);
                break;
            }
        }
        const std::string s = strip(line);
        if (s.empty()) continue;
        const std::string where = name + ":" + std::to_string(lineno);
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where + ": malformed section header");
            section = strip(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = strip(s.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        table[section][key] = parse_value(s.substr(eq + 1), where);
    }
    return table;
}

} // namespace toml

/// Resolved run configuration.
struct RunConfig {
    // gas
    double gamma = 1.4;
    double bernoulli = 6.0;
    double entropy_const = 1.0;

    // boundary
    std::string preset = "reference"; ///< reference | poly | tables
    double x1 = 0.0, x2 = 0.4, y1 = 0.0;
    std::vector<double> phi_prime{1.0, -0.4};
    std::vector<double> mach{1.0, 0.5, -0.25};
    int n_samples = 257;
    std::string varpi_table, wall_table;

    // solver
    SolverParams solver;

    // output
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;

    // verify
    std::vector<std::string> checks{"oracle", "residual", "holder"};
    int refinement_levels = 3;
    std::uint64_t seed = 42;

    // test hook: "" or "jacobian-sign"
    std::string inject_fault;

    GasParams gas_params() const { return GasParams::create(gamma, bernoulli, entropy_const); }

    BoundarySpec boundary_spec() const {
        if (preset == "reference") {
            return BoundarySpec::reference(n_samples);
        }
        if (preset == "flat-wall") {
            return BoundarySpec::flat_wall(n_samples);
        }
        if (preset == "poly") {
            return BoundarySpec::poly(phi_prime, mach, x1, x2, y1, n_samples);
        }
        if (preset == "tables") {
            if (varpi_table.empty() || wall_table.empty()) {
                throw ConfigError("boundary preset 'tables' needs varpi_table and wall_table");
            }
            try {
                return BoundarySpec::from_tables(varpi_table, wall_table, y1);
            } catch (const BoundaryError& e) {
                throw ConfigError(e.what());
            }
        }
        throw ConfigError("unknown boundary preset '" + preset + "'");
    }

    /// Canonical text used for the output-file hash: every resolved field in
    /// a fixed order.
    std::string canonical_string() const {
        std::ostringstream os;
        os.precision(17);
        os << "gamma=" << gamma << ";bernoulli=" << bernoulli << ";A=" << entropy_const
           << ";preset=" << preset << ";x1=" << x1 << ";x2=" << x2 << ";y1=" << y1 << ";phi=";
        for (double c : phi_prime) os << c << ",";
        os << ";mach=";
        for (double c : mach) os << c << ",";
        os << ";n=" << n_samples << ";vt=" << varpi_table << ";wt=" << wall_table
           << ";dt=" << solver.dt << ";tmin=" << solver.t_min
           << ";corr=" << solver.corrector_iters << ";interp=" << solver.interp_order
           << ";nchar=" << solver.n_characteristics << ";seed=" << seed
           << ";refine=" << refinement_levels << ";fault=" << inject_fault;
        return os.str();
    }
};

namespace detail {

inline double get_num(const toml::Table& t, const std::string& sec, const std::string& key,
                      double fallback) {
    const auto si = t.find(sec);
    if (si == t.end()) return fallback;
    const auto ki = si->second.find(key);
    if (ki == si->second.end()) return fallback;
    if (!std::holds_alternative<double>(ki->second)) {
        throw ConfigError("[" + sec + "]." + key + " must be a number");
    }
    return std::get<double>(ki->second);
}

inline std::string get_str(const toml::Table& t, const std::string& sec, const std::string& key,
                           const std::string& fallback) {
    const auto si = t.find(sec);
    if (si == t.end()) return fallback;
    const auto ki = si->second.find(key);
    if (ki == si->second.end()) return fallback;
    if (!std::holds_alternative<std::string>(ki->second)) {
        throw ConfigError("[" + sec + "]." + key + " must be a string");
    }
    return std::get<std::string>(ki->second);
}

inline std::vector<double> get_nums(const toml::Table& t, const std::string& sec,
                                    const std::string& key, std::vector<double> fallback) {
    const auto si = t.find(sec);
    if (si == t.end()) return fallback;
    const auto ki = si->second.find(key);
    if (ki == si->second.end()) return fallback;
    if (!std::holds_alternative<std::vector<double>>(ki->second)) {
        throw ConfigError("[" + sec + "]." + key + " must be a numeric array");
    }
    return std::get<std::vector<double>>(ki->second);
}

inline std::vector<std::string> get_strs(const toml::Table& t, const std::string& sec,
                                         const std::string& key,
                                         std::vector<std::string> fallback) {
    const auto si = t.find(sec);
    if (si == t.end()) return fallback;
    const auto ki = si->second.find(key);
    if (ki == si->second.end()) return fallback;
    if (!std::holds_alternative<std::vector<std::string>>(ki->second)) {
        throw ConfigError("[" + sec + "]." + key + " must be a string array");
    }
    return std::get<std::vector<std::string>>(ki->second);
}

} // namespace detail

inline RunConfig config_from_table(const toml::Table& t) {
    RunConfig cfg;
    cfg.gamma = detail::get_num(t, "gas", "gamma", cfg.gamma);
    cfg.bernoulli = detail::get_num(t, "gas", "bernoulli", cfg.bernoulli);
    cfg.entropy_const = detail::get_num(t, "gas", "entropy_const", cfg.entropy_const);

    cfg.preset = detail::get_str(t, "boundary", "preset", cfg.preset);
    cfg.x1 = detail::get_num(t, "boundary", "x1", cfg.x1);
    cfg.x2 = detail::get_num(t, "boundary", "x2", cfg.x2);
    cfg.y1 = detail::get_num(t, "boundary", "y1", cfg.y1);
    cfg.phi_prime = detail::get_nums(t, "boundary", "phi_prime", cfg.phi_prime);
    cfg.mach = detail::get_nums(t, "boundary", "mach", cfg.mach);
    cfg.n_samples = static_cast<int>(detail::get_num(t, "boundary", "n_samples", cfg.n_samples));
    cfg.varpi_table = detail::get_str(t, "boundary", "varpi_table", cfg.varpi_table);
    cfg.wall_table = detail::get_str(t, "boundary", "wall_table", cfg.wall_table);

    cfg.solver.dt = detail::get_num(t, "solver", "dt", cfg.solver.dt);
    cfg.solver.t_min = detail::get_num(t, "solver", "t_min", cfg.solver.t_min);
    cfg.solver.corrector_iters =
        static_cast<int>(detail::get_num(t, "solver", "corrector_iters", cfg.solver.corrector_iters));
    cfg.solver.interp_order =
        static_cast<int>(detail::get_num(t, "solver", "interp_order", cfg.solver.interp_order));
    cfg.solver.n_characteristics = static_cast<int>(
        detail::get_num(t, "solver", "n_characteristics", cfg.solver.n_characteristics));

    cfg.out_dir = detail::get_str(t, "output", "directory", cfg.out_dir);
    const auto formats = detail::get_strs(t, "output", "formats", {"csv", "json"});
    cfg.write_csv = cfg.write_json = false;
    for (const auto& f : formats) {
        if (f == "csv") cfg.write_csv = true;
        else if (f == "json") cfg.write_json = true;
        else throw ConfigError("unknown output format '" + f + "'");
    }

    cfg.checks = detail::get_strs(t, "verify", "checks", cfg.checks);
    cfg.refinement_levels =
        static_cast<int>(detail::get_num(t, "verify", "refinement_levels", cfg.refinement_levels));
    cfg.seed = static_cast<std::uint64_t>(detail::get_num(t, "verify", "seed", 42.0));
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    const toml::Table t = toml::parse(in, path);
    return config_from_table(t);
}

inline RunConfig parse_config_text(const std::string& text, const std::string& name = "<inline>") {
    std::istringstream in(text);
    const toml::Table t = toml::parse(in, name);
    return config_from_table(t);
}

} // namespace sspatch
