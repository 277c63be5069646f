#pragma once

/// @file run_config.hpp
/// Flat key=value experiment configuration and CSV number formatting.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phonon/kinetic.hpp"

namespace phonon {

class RunConfig {
public:
    /// Keys accepted in files and on the command line.
    static const std::vector<std::string>& keys();

    /// Validates and stores one entry. Throws validation_error for unknown
    /// keys, malformed numbers and values outside the allowed range.
    void set(const std::string& key, const std::string& value);

    /// Reads "key = value" lines; '#' starts a comment, blank lines are ignored.
    /// Throws io_error when the file cannot be read.
    void load_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    double real(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

    /// SimConfig with the simulation keys applied over the defaults.
    SimConfig sim_config() const;

private:
    std::map<std::string, std::string> values_;
};

/// 17 significant digits, shortest exponent form.
std::string format_real(double x);

}  // namespace phonon
