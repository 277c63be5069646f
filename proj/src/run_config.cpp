#include "phonon/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

namespace {

enum class Kind { positive, nonnegative, count, real_list, nonneg_list, text, scheme };

const std::map<std::string, Kind>& kinds() {
    static const std::map<std::string, Kind> k = {
        {"n", Kind::count},          {"quad_tol", Kind::positive},   {"out_dir", Kind::text},
        {"cache_dir", Kind::text},   {"threads", Kind::count},       {"eps", Kind::real_list},
        {"alpha", Kind::positive},   {"Tbar", Kind::positive},       {"Lx", Kind::positive},
        {"M", Kind::count},          {"t_end", Kind::positive},      {"steps", Kind::count},
        {"scheme", Kind::scheme},    {"record_every", Kind::count},  {"p_ref", Kind::positive},
        {"sigma", Kind::positive},   {"max_stiffness", Kind::positive}, {"p", Kind::real_list},
        {"xi", Kind::nonneg_list},   {"only", Kind::text},           {"seed", Kind::count},
    };
    return k;
}

double parse_real(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw validation_error(key + ": '" + s + "' is not a number");
    if (!std::isfinite(v)) throw validation_error(key + " must be finite");
    return v;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> v;
        for (const auto& [name, kind] : kinds()) v.push_back(name);
        return v;
    }();
    return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    const auto it = kinds().find(key);
    if (it == kinds().end()) throw validation_error("unknown configuration key '" + key + "'");
    const std::string value = trim(raw);
    switch (it->second) {
        case Kind::positive:
            if (!(parse_real(key, value) > 0.0)) throw validation_error(key + " must be positive");
            break;
        case Kind::nonnegative:
            if (!(parse_real(key, value) >= 0.0)) throw validation_error(key + " must be nonnegative");
            break;
        case Kind::count: {
            char* end = nullptr;
            const long v = std::strtol(value.c_str(), &end, 10);
            if (value.empty() || *end != '\0' || v < 0 || v > 1000000000)
                throw validation_error(key + ": '" + value + "' is not a nonnegative integer");
            break;
        }
        case Kind::real_list:
        case Kind::nonneg_list: {
            const auto items = split(value);
            if (items.empty()) throw validation_error(key + " needs at least one value");
            for (const auto& s : items) {
                const double v = parse_real(key, s);
                if (it->second == Kind::real_list ? !(v > 0.0) : !(v >= 0.0))
                    throw validation_error(key + " entries must be " +
                                           (it->second == Kind::real_list ? "positive" : "nonnegative"));
            }
            break;
        }
        case Kind::scheme:
            if (value != "cn" && value != "implicit_euler")
                throw validation_error("scheme must be 'cn' or 'implicit_euler'");
            break;
        case Kind::text:
            if (value.empty()) throw validation_error(key + " must not be empty");
            break;
    }
    values_[key] = value;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

double RunConfig::real(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::strtod(it->second.c_str(), nullptr);
}

int RunConfig::integer(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : static_cast<int>(std::strtol(it->second.c_str(), nullptr, 10));
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& s : split(it->second)) out.push_back(std::strtod(s.c_str(), nullptr));
    return out;
}

SimConfig RunConfig::sim_config() const {
    SimConfig c;
    const auto eps = list("eps", {c.eps});
    c.eps = eps.front();
    c.alpha = real("alpha", c.alpha);
    c.Tbar = real("Tbar", c.Tbar);
    c.Lx = real("Lx", c.Lx);
    c.M = integer("M", c.M);
    c.n = integer("n", c.n);
    c.t_end = real("t_end", c.t_end);
    c.steps = integer("steps", c.steps);
    c.scheme = text("scheme", "cn") == "cn" ? Scheme::crank_nicolson : Scheme::implicit_euler;
    c.record_every = integer("record_every", c.record_every);
    c.p_ref = real("p_ref", c.p_ref);
    c.sigma = real("sigma", c.sigma);
    c.max_stiffness = real("max_stiffness", c.max_stiffness);
    validate(c);
    return c;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace phonon
