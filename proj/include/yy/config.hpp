#pragma once

#include "yy/lifting.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace yy {

/// Configuration problem tied to one key ("section.key"); the message starts with the key.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(const std::string& key, const std::string& what)
        : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

/// Value of the TOML subset: strings, integers, floats, booleans, arrays of strings.
using TomlValue = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>>;

/// "section.key" -> value. Supports [section] headers, key = value lines and # comments.
std::map<std::string, TomlValue> parse_toml(const std::string& text);

struct JobConfig {
    // [problem]
    std::string F;
    std::string H1 = "1";
    std::string H2 = "1";
    double      h           = 1.0;
    int         N           = 8;
    int         delay_steps = 0;

    // [synthesis]
    int           num_taps       = 0;  ///< 0 means 4N
    double        tol            = 1e-4;
    int           max_iterations = 200;
    std::uint64_t seed           = 1;

    // [simulate]
    int                                sim_rate_multiplier = 0;  ///< 0 means N
    std::vector<std::filesystem::path> corpus;                   ///< resolved against the config directory
    int                                corpus_size     = 20;     ///< synthetic corpus when no paths are given
    int                                corpus_length   = 64;     ///< synthetic corpus length in periods h
    int                                sinc_truncation = 128;
    int                                probes          = 30;

    // [baseline]
    std::string phi1        = "impulse";
    std::string phi2        = "bspline:3";
    int         tail_length = 64;

    // [output]
    std::filesystem::path out_dir = "out";  ///< resolved against the config directory

    int          taps() const { return num_taps > 0 ? num_taps : 4 * N; }
    int          fast_multiplier() const { return sim_rate_multiplier > 0 ? sim_rate_multiplier : N; }

    /// Parsed and validated problem; errors name the offending key.
    DesignProblem problem() const;
};

/// Parses and range-checks a config; relative paths resolve against `base_dir`.
JobConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir);
JobConfig load_config(const std::filesystem::path& path);

}  // namespace yy
