#include "ncpd/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ncpd {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, int line,
                    const std::string& key) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigParseError(line, key, "line " + std::to_string(line) +
                                              ": cannot parse number '" +
                                              value + "' for " + key);
    }
}

long long parse_integer(const std::string& value, int line,
                        const std::string& key) {
    try {
        std::size_t used = 0;
        const long long out = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigParseError(line, key, "line " + std::to_string(line) +
                                              ": cannot parse integer '" +
                                              value + "' for " + key);
    }
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigParseError(line, key, "line " + std::to_string(line) +
                                          ": cannot parse boolean '" + value +
                                          "' for " + key);
}

// Either a comma-separated list or a min:step:max range, inclusive.
std::vector<double> parse_grid(const std::string& value, int line,
                               const std::string& key) {
    std::vector<double> grid;
    if (value.find(':') != std::string::npos) {
        std::istringstream in(value);
        std::string lo_s, step_s, hi_s;
        if (!std::getline(in, lo_s, ':') || !std::getline(in, step_s, ':') ||
            !std::getline(in, hi_s)) {
            throw ConfigParseError(line, key,
                                   "line " + std::to_string(line) +
                                       ": range must be min:step:max");
        }
        const double lo = parse_double(trim(lo_s), line, key);
        const double step = parse_double(trim(step_s), line, key);
        const double hi = parse_double(trim(hi_s), line, key);
        if (!(step > 0.0) || hi < lo) {
            throw ConfigParseError(line, key,
                                   "line " + std::to_string(line) +
                                       ": range needs step > 0 and max >= min");
        }
        for (double s = lo; s <= hi + 1e-9 * step; s += step) grid.push_back(s);
        return grid;
    }
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        grid.push_back(parse_double(trim(item), line, key));
    }
    if (grid.empty()) {
        throw ConfigParseError(line, key, "line " + std::to_string(line) +
                                              ": empty list for " + key);
    }
    return grid;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& origin) {
    ScenarioConfig cfg;
    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> setters = {
        {"n_antennas", [&](const std::string& v, int l) {
             cfg.n_antennas = static_cast<int>(parse_integer(v, l, "n_antennas"));
         }},
        {"k_secondary", [&](const std::string& v, int l) {
             cfg.k_secondary =
                 static_cast<int>(parse_integer(v, l, "k_secondary"));
         }},
        {"h_left", [&](const std::string& v, int l) {
             cfg.h_left = static_cast<int>(parse_integer(v, l, "h_left"));
         }},
        {"h_right", [&](const std::string& v, int l) {
             cfg.h_right = static_cast<int>(parse_integer(v, l, "h_right"));
         }},
        {"noise_power", [&](const std::string& v, int l) {
             cfg.noise_power = parse_double(v, l, "noise_power");
         }},
        {"cnr_db", [&](const std::string& v, int l) {
             cfg.cnr_db = parse_double(v, l, "cnr_db");
         }},
        {"jnr_db", [&](const std::string& v, int l) {
             cfg.jnr_db = parse_double(v, l, "jnr_db");
         }},
        {"clutter_rho", [&](const std::string& v, int l) {
             cfg.clutter_rho = parse_double(v, l, "clutter_rho");
         }},
        {"jammer_azimuth_deg", [&](const std::string& v, int l) {
             cfg.jammer_azimuth_deg = parse_double(v, l, "jammer_azimuth_deg");
         }},
        {"jammer_azimuth_random", [&](const std::string& v, int l) {
             cfg.jammer_azimuth_random =
                 parse_bool(v, l, "jammer_azimuth_random");
         }},
        {"target_azimuth_deg", [&](const std::string& v, int l) {
             cfg.target_azimuth_deg = parse_double(v, l, "target_azimuth_deg");
         }},
        {"jammer_present", [&](const std::string& v, int l) {
             cfg.jammer_present = parse_bool(v, l, "jammer_present");
         }},
        {"pfa", [&](const std::string& v, int l) {
             cfg.pfa = parse_double(v, l, "pfa");
         }},
        {"scnr_grid_db", [&](const std::string& v, int l) {
             cfg.scnr_grid_db = parse_grid(v, l, "scnr_grid_db");
         }},
        {"max_iterations", [&](const std::string& v, int l) {
             cfg.max_iterations =
                 static_cast<int>(parse_integer(v, l, "max_iterations"));
         }},
        {"rng_seed", [&](const std::string& v, int l) {
             cfg.rng_seed =
                 static_cast<std::uint64_t>(parse_integer(v, l, "rng_seed"));
         }},
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigParseError(line_no, "",
                                       origin + ": line " +
                                           std::to_string(line_no) +
                                           ": unterminated section header");
            }
            continue;  // sections are cosmetic; keys form one namespace
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigParseError(line_no, "",
                                   origin + ": line " +
                                       std::to_string(line_no) +
                                       ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigParseError(line_no, key,
                                   origin + ": line " +
                                       std::to_string(line_no) +
                                       ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigParseError(line_no, key,
                                   origin + ": line " +
                                       std::to_string(line_no) +
                                       ": empty value for '" + key + "'");
        }
        it->second(value, line_no);
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "n_antennas = " << cfg.n_antennas << "\n";
    out << "k_secondary = " << cfg.k_secondary << "\n";
    out << "h_left = " << cfg.h_left << "\n";
    out << "h_right = " << cfg.h_right << "\n";
    out << "noise_power = " << format_value(cfg.noise_power) << "\n";
    out << "cnr_db = " << format_value(cfg.cnr_db) << "\n";
    out << "jnr_db = " << format_value(cfg.jnr_db) << "\n";
    out << "clutter_rho = " << format_value(cfg.clutter_rho) << "\n";
    out << "jammer_present = " << (cfg.jammer_present ? "true" : "false")
        << "\n";
    out << "jammer_azimuth_deg = " << format_value(cfg.jammer_azimuth_deg)
        << "\n";
    out << "jammer_azimuth_random = "
        << (cfg.jammer_azimuth_random ? "true" : "false") << "\n";
    out << "target_azimuth_deg = " << format_value(cfg.target_azimuth_deg)
        << "\n";
    out << "\n[experiment]\n";
    out << "pfa = " << format_value(cfg.pfa) << "\n";
    out << "scnr_grid_db = ";
    for (std::size_t i = 0; i < cfg.scnr_grid_db.size(); ++i) {
        if (i) out << ",";
        out << format_value(cfg.scnr_grid_db[i]);
    }
    out << "\n";
    out << "max_iterations = " << cfg.max_iterations << "\n";
    out << "rng_seed = " << cfg.rng_seed << "\n";
    return out.str();
}

std::uint64_t config_digest(const ScenarioConfig& cfg) {
    const std::string canonical = serialize_config(cfg);
    std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace ncpd
