#pragma once

// Flat `key = value` run configuration. Lines starting with # are comments.
// Unknown keys are errors; the effective configuration is echoed back in the
// same format so any output directory can be replayed.

#include "dnbs/errors.hpp"
#include "dnbs/tracker.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dnbs {

/// Bad key or value in a configuration file or override.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct RunConfig {
    TrackerConfig tracker;
    // Evaluation settings.
    double threshold = 0.35;
    int segments = 20;
    double sre_magnitude = 1.0;

    /// Assigns one key; throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// `key=value` form used by command-line overrides.
    void set(std::string_view assignment);

    /// Every key with its current value, one per line, in a fixed order.
    std::string to_text() const;
    static std::vector<std::string> keys();

    void validate() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace dnbs
