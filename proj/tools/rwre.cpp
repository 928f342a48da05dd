// rwre: experiment runner for random walks in i.i.d. random environments.
//
//   rwre <subcommand> [--config PATH] [--seed U64] [--workers N] [--out DIR]
//                     [--d DIM] [--format records|table] [--set KEY=VALUE]...
//
// Exit status: 0 PASS/complete, 1 FAIL, 2 INCONCLUSIVE, 3 usage or validation error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rwre/cli/config.hpp"
#include "rwre/cli/report.hpp"
#include "rwre/cli/runner.hpp"

namespace {

struct Flags {
    std::string config;
    std::string seed;
    std::string workers;
    std::string out;
    std::string d;
    std::string format;
    std::vector<std::string> sets;
};

std::string defaults_footer(const std::string& sub) {
    std::string text = "\nKeys (config file or --set) and defaults:\n";
    for (const auto& [k, v] : rwre::cli::defaults_for(sub)) text += "  " + k + " = " + v + "\n";
    return text;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace rwre::cli;
    CLI::App app{"Simulation and verification toolkit for random walks in random environments"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config, "flat key = value configuration file");
        sub->add_option("--seed", flags.seed, "master seed (unsigned 64-bit)");
        sub->add_option("--workers", flags.workers, "OpenMP worker threads");
        sub->add_option("--out", flags.out, "directory for records.jsonl, summary.tsv and plot tables");
        sub->add_option("--d", flags.d, "lattice dimension");
        sub->add_option("--format", flags.format, "stdout rendering")->check(CLI::IsMember({"records", "table"}));
        sub->add_option("--set", flags.sets, "override any key, KEY=VALUE (repeatable)");
        sub->footer(defaults_footer(name));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg = flags.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(flags.config);
        for (const auto& kv : flags.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError({"--set: expected KEY=VALUE, got '" + kv + "'"});
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!flags.seed.empty()) cfg.set("seed", flags.seed);
        if (!flags.workers.empty()) cfg.set("workers", flags.workers);
        if (!flags.out.empty()) cfg.set("out", flags.out);
        if (!flags.d.empty()) cfg.set("d", flags.d);
        if (!flags.format.empty()) cfg.set("format", flags.format);

        const ReportEnvelope env = run(sub, cfg);
        const std::string format = env.config.count("format") ? env.config.at("format") : "table";
        if (format == "records") {
            write_records(env, std::cout);
        } else {
            write_summary(env, std::cout);
        }
        const std::string out = env.config.count("out") ? env.config.at("out") : "";
        if (!out.empty()) {
            const std::filesystem::path dir(out);
            std::filesystem::create_directories(dir);
            write_file(dir / "records.jsonl", [&](std::ostream& o) { write_records(env, o); });
            write_file(dir / "summary.tsv", [&](std::ostream& o) { write_summary(env, o); });
            for (const auto& [kind, t] : env.series) {
                write_file(dir / (kind + ".tsv"), [&](std::ostream& o) { emit_plot_data(env, kind, o); });
            }
        }
        return env.exit_code;
    } catch (const UsageError& e) {
        std::cerr << "rwre " << sub << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "rwre " << sub << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "rwre " << sub << ": " << e.what() << '\n';
        return kExitInconclusive;
    }
}
