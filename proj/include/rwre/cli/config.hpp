#pragma once

// Flat key = value experiment configuration. Values are read through typed
// accessors that record every key consulted (with its effective value) so the
// full configuration, defaults included, can be echoed into reports.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace rwre::cli {

/// Carries every violated constraint; maps to exit status 3.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

class ExperimentConfig {
public:
    ExperimentConfig() = default;

    /// Parses `key = value` lines; `#` starts a comment. Throws UsageError.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    /// Later assignments win (command-line overrides).
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& def);
    double get_double(const std::string& key, double def);
    std::uint64_t get_u64(const std::string& key, std::uint64_t def);
    std::size_t get_size(const std::string& key, std::size_t def);
    int get_int(const std::string& key, int def);
    bool get_bool(const std::string& key, bool def);
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& def);
    std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& def);

    /// Direction from a comma-separated vector, normalized; default e_1.
    Direction get_direction(const std::string& key, int dim);
    /// Law record, e.g. dirichlet(2,1,1,1), homogeneous(...), uniform, trap,
    /// trap(0.25,2), pointmass(e1), pointmass(-e2).
    EnvironmentLaw get_law(const std::string& key, int dim);

    /// Records a violated constraint against `key`.
    void require(bool ok, const std::string& key, const std::string& message);
    /// Adds an error for every key present but never read.
    void reject_unused();
    /// Throws UsageError if any problem was recorded.
    void throw_if_invalid() const;

    /// Effective configuration: every key read, with its value or default.
    const std::map<std::string, std::string>& effective() const { return effective_; }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::optional<std::string> lookup(const std::string& key);

    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> effective_;
    std::map<std::string, bool> used_;
    std::vector<std::string> problems_;
};

/// Canonical text of a double: shortest form that round-trips.
std::string format_double(double v);

}  // namespace rwre::cli
