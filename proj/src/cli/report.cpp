#include "rwre/cli/report.hpp"

#include <ostream>
#include <stdexcept>

#include "rwre/cli/config.hpp"

namespace rwre::cli {

void ReportEnvelope::add(const std::string& key, double value) { summary.emplace_back(key, format_double(value)); }

bool is_execution_key(const std::string& key) { return key == "workers" || key == "out" || key == "format"; }

void write_records(const ReportEnvelope& env, std::ostream& out) {
    nlohmann::json header{{"type", "envelope"},
                          {"subcommand", env.subcommand},
                          {"version", env.version},
                          {"wall_seconds", env.wall_seconds},
                          {"config", env.config}};
    out << header.dump() << '\n';
    for (const auto& r : env.records) {
        nlohmann::json rec = r;
        rec["type"] = "replica";
        out << rec.dump() << '\n';
    }
    nlohmann::json summary{{"type", "summary"}};
    for (const auto& [k, v] : env.summary) summary["values"][k] = v;
    out << summary.dump() << '\n';
    for (const auto& w : env.warnings) out << nlohmann::json{{"type", "warning"}, {"message", w}}.dump() << '\n';
}

void write_summary(const ReportEnvelope& env, std::ostream& out) {
    out << "subcommand\t" << env.subcommand << '\n';
    out << "version\t" << env.version << '\n';
    for (const auto& [k, v] : env.config) {
        if (!is_execution_key(k)) out << "config." << k << '\t' << v << '\n';
    }
    for (const auto& [k, v] : env.summary) out << k << '\t' << v << '\n';
    for (const auto& w : env.warnings) out << "warning\t" << w << '\n';
}

void emit_plot_data(const ReportEnvelope& env, const std::string& kind, std::ostream& out) {
    const auto it = env.series.find(kind);
    if (it == env.series.end()) {
        std::string have;
        for (const auto& [k, t] : env.series) have += (have.empty() ? "" : ", ") + k;
        throw std::invalid_argument("emit_plot_data: report has no '" + kind + "' series (available: " +
                                    (have.empty() ? "none" : have) + ")");
    }
    const Table& t = it->second;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "\t" : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << format_double(row[i]);
        out << '\n';
    }
}

}  // namespace rwre::cli
