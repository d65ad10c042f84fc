#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tempdisagg/aggregation.hpp"
#include "tempdisagg/dgp.hpp"
#include "tempdisagg/types.hpp"

namespace tempdisagg {

enum class Command { Disaggregate, Simulate, Benchmark };

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
    Command command = Command::Disaggregate;

    // disaggregate
    std::filesystem::path input;
    std::filesystem::path indicators;  // empty: a single column of ones
    Method method = Method::ChowLin;
    AggregationMode agg_mode = AggregationMode::Sum;
    Eigen::Index ratio = 4;
    /// Only used without indicators; defaults to n_low * ratio. With
    /// indicators, n_high is their row count.
    std::optional<Eigen::Index> n_high;
    std::optional<std::vector<double>> rho_grid;
    std::optional<double> correlation_threshold;

    // simulate / benchmark
    DgpConfig dgp;
    std::size_t replicates = 100;
    std::vector<Method> benchmark_methods;  // empty: every method valid for the design
    std::size_t threads = 0;                // 0: hardware concurrency

    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "tempdisagg_out";

    /// Throws DomainError on invalid combinations.
    void validate() const;
};

struct ErrorRecord {
    std::string kind;
    std::string category;
    std::string message;
    int exit_code = kExitValidation;

    [[nodiscard]] std::string to_json() const;
};

struct RunOutcome {
    int exit_code = kExitSuccess;
    std::vector<std::filesystem::path> artifacts;
    std::optional<ErrorRecord> error;
};

/// Executes one command, writing its artifacts under config.output_dir.
/// Never throws for library errors: they become an ErrorRecord (also
/// written to output_dir/error.json when possible) and a nonzero exit code.
/// Progress notes go to `log`.
RunOutcome run(const RunConfig& config, std::ostream& log);

/// "lo:hi:count" (inclusive, evenly spaced) or a comma-separated list.
[[nodiscard]] std::vector<double> parse_rho_grid(std::string_view text);

[[nodiscard]] std::string_view to_string(Command command) noexcept;

}  // namespace tempdisagg
