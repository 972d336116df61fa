#pragma once

#include "yy/config.hpp"
#include "yy/synthesis.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace yy {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNotConverged = 2, kExitInfeasible = 3 };

struct FilterFile {
    FirFilter filter{{0.0}, 1.0};
    double    achieved_norm = 0.0;
    double    lower_bound   = 0.0;
    bool      converged     = false;
};

/// "%.17g".
std::string format_real(double v);

std::string filter_json(const SynthesisReport& report);
/// Throws std::invalid_argument with the parse location on malformed input.
FilterFile read_filter_json(const std::filesystem::path& path);

/// CSV with header "t,value" and a uniform step (relative jitter at most 1e-9).
SignalGrid read_signal_csv(const std::filesystem::path& path);
void       write_signal_csv(const std::filesystem::path& path, const SignalGrid& s);

int cmd_design(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_norm(const JobConfig& cfg, const std::filesystem::path& filter_path, std::ostream& out, std::ostream& err);
int cmd_compare(const JobConfig& cfg, const std::optional<std::filesystem::path>& filter_path, std::ostream& out,
                std::ostream& err);
int cmd_baseline(const JobConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point of the yyfilter tool: subcommands design | norm | compare | baseline.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace yy
