#include "nfwave/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nfwave {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"array", {"M", "N", "fc_hz", "bandwidth_hz", "spacing_m"}},
        {"grid", {"K1", "K2"}},
        {"solver", {"gamma", "rho", "epochs", "inner_tol", "inner_max", "outer_tol", "seed", "weights"}},
        {"target", {"k1_star", "k2_star", "desired_peak"}},
        {"output", {"out_dir"}},
    };
    return s;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (!quoted && (line[i] == '#' || line[i] == ';')) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

double to_double(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError("invalid number for '" + key + "': '" + std::string(text) + "'");
    return v;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view text) {
    Int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("invalid integer for '" + key + "': '" + std::string(text) + "'");
    return v;
}

std::vector<double> to_list(const std::string& key, std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ConfigError("'" + key + "' must be 'uniform' or a bracketed list");
    std::vector<double> out;
    std::string_view body = trim(text.substr(1, text.size() - 2));
    while (!body.empty()) {
        const auto comma = body.find(',');
        out.push_back(to_double(key, trim(body.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        body = trim(body.substr(comma + 1));
        if (body.empty()) throw ConfigError("trailing comma in '" + key + "'");
    }
    return out;
}

std::string to_string_value(std::string_view text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
        return std::string(text.substr(1, text.size() - 2));
    return std::string(text);
}

void apply(RunConfig& cfg, const std::string& key, std::string_view value) {
    if (key == "M") cfg.num_antennas = to_int<int>(key, value);
    else if (key == "N") cfg.code_length = to_int<int>(key, value);
    else if (key == "fc_hz") cfg.carrier_hz = to_double(key, value);
    else if (key == "bandwidth_hz") cfg.bandwidth_hz = to_double(key, value);
    else if (key == "spacing_m") cfg.spacing_m = to_double(key, value);
    else if (key == "K1") cfg.num_angles = to_int<int>(key, value);
    else if (key == "K2") cfg.num_ranges = to_int<int>(key, value);
    else if (key == "gamma") cfg.solver.gamma = to_double(key, value);
    else if (key == "rho") cfg.solver.rho = to_double(key, value);
    else if (key == "epochs") cfg.solver.epochs = to_int<int>(key, value);
    else if (key == "inner_tol") cfg.solver.inner_tol = to_double(key, value);
    else if (key == "inner_max") cfg.solver.inner_max = to_int<int>(key, value);
    else if (key == "outer_tol") cfg.solver.outer_tol = to_double(key, value);
    else if (key == "seed") cfg.solver.seed = to_int<std::uint64_t>(key, value);
    else if (key == "weights") {
        if (value == "uniform") cfg.weights.reset();
        else cfg.weights = to_list(key, value);
    }
    else if (key == "k1_star") cfg.k1_star = to_int<int>(key, value);
    else if (key == "k2_star") cfg.k2_star = to_int<int>(key, value);
    else if (key == "desired_peak") cfg.desired_peak = to_double(key, value);
    else if (key == "out_dir") cfg.out_dir = to_string_value(value);
}

std::string find_section(const std::string& key) {
    for (const auto& [section, keys] : schema())
        if (keys.count(key)) return section;
    return {};
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::vector<std::string> unknown;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string stripped = strip_comment(raw);
        const std::string_view line = trim(stripped);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!schema().count(section)) throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const bool known = section.empty() ? !find_section(key).empty() : schema().at(section).count(key) > 0;
        if (!known) {
            unknown.push_back(section.empty() ? key : section + "." + key);
            continue;
        }
        if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError("missing value for '" + key + "'");
        apply(cfg, key, value);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ConfigError(msg);
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
    try {
        validate(cfg.solver);
        (void)array_config(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.num_angles < 1 || cfg.num_ranges < 1) throw ConfigError("K1 and K2 must be >= 1");
    if (cfg.k1_star < 1 || cfg.k1_star > cfg.num_angles)
        throw ConfigError("k1_star must lie in [1, K1] (got " + std::to_string(cfg.k1_star) + ")");
    if (cfg.k2_star < 1 || cfg.k2_star > cfg.num_ranges)
        throw ConfigError("k2_star must lie in [1, K2] (got " + std::to_string(cfg.k2_star) + ")");
    if (!(cfg.desired_peak >= 0.0) || !std::isfinite(cfg.desired_peak))
        throw ConfigError("desired_peak must be >= 0");
    if (cfg.weights) {
        const auto expected = static_cast<std::size_t>(2 * cfg.code_length - 1);
        if (cfg.weights->size() != expected)
            throw ConfigError("weights must have 2N-1 = " + std::to_string(expected) + " entries (got " +
                              std::to_string(cfg.weights->size()) + ")");
    }
    if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

std::string to_config_text(const RunConfig& cfg) {
    std::ostringstream o;
    o << "[array]\n";
    o << "M = " << cfg.num_antennas << "\n";
    o << "N = " << cfg.code_length << "\n";
    o << "fc_hz = " << format_double(cfg.carrier_hz) << "\n";
    o << "bandwidth_hz = " << format_double(cfg.bandwidth_hz) << "\n";
    if (cfg.spacing_m) o << "spacing_m = " << format_double(*cfg.spacing_m) << "\n";
    o << "\n[grid]\n";
    o << "K1 = " << cfg.num_angles << "\n";
    o << "K2 = " << cfg.num_ranges << "\n";
    o << "\n[solver]\n";
    o << "gamma = " << format_double(cfg.solver.gamma) << "\n";
    o << "rho = " << format_double(cfg.solver.rho) << "\n";
    o << "epochs = " << cfg.solver.epochs << "\n";
    o << "inner_tol = " << format_double(cfg.solver.inner_tol) << "\n";
    o << "inner_max = " << cfg.solver.inner_max << "\n";
    o << "outer_tol = " << format_double(cfg.solver.outer_tol) << "\n";
    o << "seed = " << cfg.solver.seed << "\n";
    if (cfg.weights) {
        o << "weights = [";
        for (std::size_t i = 0; i < cfg.weights->size(); ++i)
            o << (i ? ", " : "") << format_double((*cfg.weights)[i]);
        o << "]\n";
    } else {
        o << "weights = uniform\n";
    }
    o << "\n[target]\n";
    o << "k1_star = " << cfg.k1_star << "\n";
    o << "k2_star = " << cfg.k2_star << "\n";
    o << "desired_peak = " << format_double(cfg.desired_peak) << "\n";
    o << "\n[output]\n";
    o << "out_dir = \"" << cfg.out_dir << "\"\n";
    return o.str();
}

ArrayConfig array_config(const RunConfig& cfg) {
    return make_array_config(cfg.num_antennas, cfg.code_length, cfg.carrier_hz, cfg.bandwidth_hz,
                             cfg.spacing_m);
}

WislProfile wisl_profile(const RunConfig& cfg) {
    if (!cfg.weights) return uniform_wisl_profile(cfg.code_length);
    return build_wisl_profile(*cfg.weights, cfg.code_length);
}

}  // namespace nfwave
