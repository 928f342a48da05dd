#pragma once

// Report envelope shared by every subcommand, with its three renderings:
// line-delimited JSON records, a tab-separated summary table, and plot tables.

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rwre::cli {

inline constexpr const char* kToolkitVersion = "1.0.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ReportEnvelope {
    std::string subcommand;
    std::map<std::string, std::string> config;  ///< effective configuration
    std::string version = kToolkitVersion;
    double wall_seconds = 0.0;
    std::vector<nlohmann::json> records;        ///< per-replica records
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::string> warnings;
    std::map<std::string, Table> series;        ///< plot series by kind
    int exit_code = 0;

    void add(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
    void add(const std::string& key, double value);
    void add_count(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
};

/// Keys excluded from the summary echo because they cannot affect results.
bool is_execution_key(const std::string& key);

/// One JSON object per line: a header (config, version, wall clock), every
/// replica record, the summary, then the warnings.
void write_records(const ReportEnvelope& env, std::ostream& out);

/// `key<TAB>value` rows: subcommand, config echo (without execution keys),
/// summary and warnings. Contains nothing that varies between identical runs.
void write_summary(const ReportEnvelope& env, std::ostream& out);

/// Throws std::invalid_argument for a kind the report does not carry.
void emit_plot_data(const ReportEnvelope& env, const std::string& kind, std::ostream& out);

}  // namespace rwre::cli
