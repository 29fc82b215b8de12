#include "dnbs/config.hpp"

#include "dnbs/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace dnbs {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not {}", key, value, expected));
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        bad_value(key, v, std::is_integral_v<T> ? "an integer" : "a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) bad_value(key, v, "a finite number");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "a boolean");
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

struct Field {
    const char* key;
    std::function<void(RunConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define DNBS_INT(name, member)                                                                                  \
    Field {                                                                                                      \
        name, [](RunConfig& c, std::string_view k, std::string_view v) { c.member = parse_number<int>(k, v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }                                          \
    }
#define DNBS_DOUBLE(name, member)                                                                                  \
    Field {                                                                                                         \
        name, [](RunConfig& c, std::string_view k, std::string_view v) { c.member = parse_number<double>(k, v); }, \
            [](const RunConfig& c) { return fmt_double(c.member); }                                                 \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        DNBS_INT("K", tracker.K),
        DNBS_DOUBLE("lambda", tracker.lambda),
        DNBS_INT("N_f", tracker.N_f),
        DNBS_INT("N_b", tracker.N_b),
        DNBS_INT("N_u", tracker.N_u),
        DNBS_DOUBLE("gamma_update", tracker.gamma_update),
        DNBS_INT("search_radius", tracker.search_radius),
        Field{"solver", [](RunConfig& c, std::string_view k, std::string_view v) {
                  try {
                      c.tracker.solver = parse_solver(v);
                  } catch (const InvalidArgument&) {
                      bad_value(k, v, "one of direct, iterative, hierarchical");
                  }
              },
              [](const RunConfig& c) { return std::string(solver_name(c.tracker.solver)); }},
        DNBS_DOUBLE("mu", tracker.mu),
        DNBS_DOUBLE("ratio", tracker.ratio),
        Field{"expand_full_near_set",
              [](RunConfig& c, std::string_view k, std::string_view v) { c.tracker.expand_full_near_set = parse_bool(k, v); },
              [](const RunConfig& c) { return std::string(c.tracker.expand_full_near_set ? "true" : "false"); }},
        DNBS_DOUBLE("dependence_tol", tracker.dependence_tol),
        DNBS_DOUBLE("tie_tol", tracker.tie_tol),
        DNBS_DOUBLE("background_factor", tracker.background_factor),
        DNBS_DOUBLE("background_iou", tracker.background_iou),
        DNBS_DOUBLE("nms_radius", tracker.nms_radius),
        Field{"motion",
              [](RunConfig& c, std::string_view k, std::string_view v) {
                  if (v == "static") c.tracker.motion = MotionModel::static_position;
                  else if (v == "constant_velocity") c.tracker.motion = MotionModel::constant_velocity;
                  else bad_value(k, v, "static or constant_velocity");
              },
              [](const RunConfig& c) {
                  return std::string(c.tracker.motion == MotionModel::static_position ? "static" : "constant_velocity");
              }},
        Field{"seed",
              [](RunConfig& c, std::string_view k, std::string_view v) {
                  c.tracker.seed = parse_number<std::uint64_t>(k, v);
              },
              [](const RunConfig& c) { return std::to_string(c.tracker.seed); }},
        DNBS_DOUBLE("threshold", threshold),
        DNBS_INT("segments", segments),
        DNBS_DOUBLE("sre_magnitude", sre_magnitude),
    };
    return f;
}

#undef DNBS_INT
#undef DNBS_DOUBLE

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    for (const Field& f : fields()) {
        if (key == f.key) {
            f.set(*this, key, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void RunConfig::set(std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const Field& f : fields()) out += fmt::format("{} = {}\n", f.key, f.get(*this));
    return out;
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.emplace_back(f.key);
    return k;
}

void RunConfig::validate() const {
    try {
        tracker.validate();
        tracker.hier().validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    if (segments < 1) throw ConfigError("segments must be >= 1");
    if (!(sre_magnitude >= 0.0)) throw ConfigError("sre_magnitude must be >= 0");
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string_view l = trim(line);
        if (l.empty() || l.front() == '#') continue;
        const std::size_t eq = l.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("config: expected key = value (line {})", no));
        try {
            cfg.set(l.substr(0, eq), l.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{} (line {})", e.what(), no));
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_run_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << cfg.to_text();
}

}  // namespace dnbs
