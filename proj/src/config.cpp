#include "proplab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace proplab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("invalid numeric value for '" + key + "': " + value);
    return out;
}

long parse_long(const std::string& key, const std::string& value) {
    long out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("invalid integer value for '" + key + "': " + value);
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": empty key or value");

        if (key == "mass") cfg.system.mass = parse_double(key, value);
        else if (key == "charge") cfg.system.charge = parse_double(key, value);
        else if (key == "b_field") cfg.system.b_field = parse_double(key, value);
        else if (key == "e_field_x") cfg.system.e_field_x = parse_double(key, value);
        else if (key == "e_field_y") cfg.system.e_field_y = parse_double(key, value);
        else if (key == "omega_x") cfg.system.omega_x = parse_double(key, value);
        else if (key == "omega_y") cfg.system.omega_y = parse_double(key, value);
        else if (key == "hbar") cfg.system.constants.hbar = parse_double(key, value);
        else if (key == "x_a") cfg.endpoints.x_a = parse_double(key, value);
        else if (key == "y_a") cfg.endpoints.y_a = parse_double(key, value);
        else if (key == "x_b") cfg.endpoints.x_b = parse_double(key, value);
        else if (key == "y_b") cfg.endpoints.y_b = parse_double(key, value);
        else if (key == "duration_t") cfg.endpoints.duration_T = parse_double(key, value);
        else if (key == "slices") cfg.slices = parse_long(key, value);
        else if (key == "basis") cfg.basis = static_cast<int>(parse_long(key, value));
        else if (key == "tolerance") cfg.tolerance = parse_double(key, value);
        else
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
    }
    cfg.system.validate();
    cfg.endpoints.validate();
    if (cfg.slices < 2) throw ConfigError("slices must be >= 2");
    if (cfg.basis < 4) throw ConfigError("basis must be >= 4");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

}  // namespace proplab
