#include "rwre/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rwre::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && p == end && !s.empty()) return v;
    // accept integral floating forms such as 1e6
    const auto d = parse_double(s);
    if (d && *d >= 0.0 && *d < 1.8e19 && std::floor(*d) == *d) return static_cast<std::uint64_t>(*d);
    return std::nullopt;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    return out;
}

}  // namespace

UsageError::UsageError(std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& p : problems) msg += "\n  " + p;
          return msg;
      }()),
      problems_(std::move(problems)) {}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> problems;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (!problems.empty()) throw UsageError(problems);
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError({"config: cannot open " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::optional<std::string> ExperimentConfig::lookup(const std::string& key) {
    used_[key] = true;
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& def) {
    const auto v = lookup(key).value_or(def);
    effective_[key] = v;
    return v;
}

double ExperimentConfig::get_double(const std::string& key, double def) {
    const auto raw = lookup(key);
    if (!raw) {
        effective_[key] = format_double(def);
        return def;
    }
    const auto v = parse_double(*raw);
    if (!v) {
        problems_.push_back(key + ": expected a number, got '" + *raw + "'");
        effective_[key] = *raw;
        return def;
    }
    effective_[key] = format_double(*v);
    return *v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t def) {
    const auto raw = lookup(key);
    if (!raw) {
        effective_[key] = std::to_string(def);
        return def;
    }
    const auto v = parse_u64(*raw);
    if (!v) {
        problems_.push_back(key + ": expected a non-negative integer, got '" + *raw + "'");
        effective_[key] = *raw;
        return def;
    }
    effective_[key] = std::to_string(*v);
    return *v;
}

std::size_t ExperimentConfig::get_size(const std::string& key, std::size_t def) {
    return static_cast<std::size_t>(get_u64(key, def));
}

int ExperimentConfig::get_int(const std::string& key, int def) {
    const double v = get_double(key, def);
    if (std::floor(v) != v) problems_.push_back(key + ": expected an integer");
    return static_cast<int>(v);
}

bool ExperimentConfig::get_bool(const std::string& key, bool def) {
    const auto raw = lookup(key);
    if (!raw) {
        effective_[key] = def ? "true" : "false";
        return def;
    }
    if (*raw == "true" || *raw == "1" || *raw == "yes") {
        effective_[key] = "true";
        return true;
    }
    if (*raw == "false" || *raw == "0" || *raw == "no") {
        effective_[key] = "false";
        return false;
    }
    problems_.push_back(key + ": expected true or false, got '" + *raw + "'");
    return def;
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, const std::vector<double>& def) {
    const auto raw = lookup(key);
    std::vector<double> out = def;
    if (raw) {
        out.clear();
        for (const auto& part : split(*raw, ',')) {
            const auto v = parse_double(part);
            if (!v) {
                problems_.push_back(key + ": expected a comma-separated list of numbers, got '" + *raw + "'");
                effective_[key] = *raw;
                return def;
            }
            out.push_back(*v);
        }
    }
    std::vector<std::string> txt;
    for (double v : out) txt.push_back(format_double(v));
    effective_[key] = join(txt);
    return out;
}

std::vector<std::size_t> ExperimentConfig::get_sizes(const std::string& key, const std::vector<std::size_t>& def) {
    const auto raw = lookup(key);
    std::vector<std::size_t> out = def;
    if (raw) {
        out.clear();
        for (const auto& part : split(*raw, ',')) {
            const auto v = parse_u64(part);
            if (!v) {
                problems_.push_back(key + ": expected a comma-separated list of integers, got '" + *raw + "'");
                effective_[key] = *raw;
                return def;
            }
            out.push_back(static_cast<std::size_t>(*v));
        }
    }
    std::vector<std::string> txt;
    for (auto v : out) txt.push_back(std::to_string(v));
    effective_[key] = join(txt);
    return out;
}

Direction ExperimentConfig::get_direction(const std::string& key, int dim) {
    std::vector<double> def(static_cast<std::size_t>(std::max(dim, 1)), 0.0);
    def[0] = 1.0;
    const auto v = get_doubles(key, def);
    if (static_cast<int>(v.size()) != dim) {
        problems_.push_back(key + ": expected " + std::to_string(dim) + " components");
        return Direction::normalized(def);
    }
    double norm = 0.0;
    for (double c : v) norm += c * c;
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        problems_.push_back(key + ": direction must be a nonzero finite vector");
        return Direction::normalized(def);
    }
    return Direction::normalized(v);
}

EnvironmentLaw ExperimentConfig::get_law(const std::string& key, int dim) {
    const std::string raw = get_string(key, "uniform");
    const auto open = raw.find('(');
    const std::string name = trim(raw.substr(0, open));
    std::vector<std::string> args;
    if (open != std::string::npos) {
        if (raw.back() != ')') {
            problems_.push_back(key + ": missing ')' in '" + raw + "'");
            return EnvironmentLaw::uniform(std::max(dim, 2));
        }
        args = split(raw.substr(open + 1, raw.size() - open - 2), ',');
    }
    auto numbers = [&](std::vector<double>& out) {
        for (const auto& a : args) {
            const auto v = parse_double(a);
            if (!v) {
                problems_.push_back(key + ": bad parameter '" + a + "'");
                return false;
            }
            out.push_back(*v);
        }
        return true;
    };
    try {
        if (name == "uniform") return EnvironmentLaw::uniform(dim);
        if (name == "dirichlet" || name == "homogeneous") {
            std::vector<double> v;
            if (!numbers(v)) return EnvironmentLaw::uniform(std::max(dim, 2));
            if (static_cast<int>(v.size()) != 2 * dim) {
                problems_.push_back(key + ": " + name + " needs 2d = " + std::to_string(2 * dim) + " parameters");
                return EnvironmentLaw::uniform(std::max(dim, 2));
            }
            return name == "dirichlet" ? EnvironmentLaw::dirichlet(v) : EnvironmentLaw::homogeneous(v);
        }
        if (name == "trap") {
            if (dim != 2) {
                problems_.push_back(key + ": the trap mixture is defined for d = 2 only");
                return EnvironmentLaw::uniform(std::max(dim, 2));
            }
            std::vector<double> v;
            if (!numbers(v)) return EnvironmentLaw::uniform(2);
            PhiSpec phi;
            if (!v.empty()) phi.scale = v[0];
            if (v.size() > 1) phi.exponent = v[1];
            if (v.size() > 2) {
                problems_.push_back(key + ": trap takes at most (scale, exponent)");
                return EnvironmentLaw::uniform(2);
            }
            return EnvironmentLaw::trap_mixture(phi);
        }
        if (name == "pointmass") {
            const std::string a = args.empty() ? "e1" : args[0];
            const bool neg = !a.empty() && a[0] == '-';
            const std::string body = neg ? a.substr(1) : a;
            int axis = 0;
            if (body.size() < 2 || body[0] != 'e' || !(std::istringstream(body.substr(1)) >> axis) || axis < 1 ||
                axis > dim) {
                problems_.push_back(key + ": pointmass expects e1..e" + std::to_string(dim) + " or -e1..");
                return EnvironmentLaw::uniform(std::max(dim, 2));
            }
            return EnvironmentLaw::point_mass(dim, neg ? axis - 1 + dim : axis - 1);
        }
        problems_.push_back(key + ": unknown law '" + name + "' (dirichlet, homogeneous, uniform, trap, pointmass)");
    } catch (const std::invalid_argument& e) {
        problems_.push_back(key + ": " + e.what());
    }
    return EnvironmentLaw::uniform(std::max(dim, 2));
}

void ExperimentConfig::require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) problems_.push_back(key + ": " + message);
}

void ExperimentConfig::reject_unused() {
    for (const auto& [k, v] : values_) {
        if (!used_.count(k)) problems_.push_back(k + ": unknown key for this subcommand");
    }
}

void ExperimentConfig::throw_if_invalid() const {
    if (!problems_.empty()) throw UsageError(problems_);
}

}  // namespace rwre::cli
