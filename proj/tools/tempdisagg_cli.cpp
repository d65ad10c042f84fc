#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempdisagg/errors.hpp"
#include "tempdisagg/run.hpp"

namespace td = tempdisagg;

namespace {

struct Flags {
    std::string input;
    std::string indicators;
    std::string method = "chowlin";
    std::string agg_mode = "sum";
    long ratio = 4;
    std::optional<long> n_high;
    std::string rho_grid;
    std::optional<double> corr_threshold;
    std::uint64_t seed = 42;
    std::string output_dir = "tempdisagg_out";

    long n_low = 17;
    long dims = 5;
    double beta = 1.0;
    double sparsity = 0.5;
    double rho = 0.0;
    std::string error_method = "chowlin";
    std::size_t replicates = 100;
    std::vector<std::string> methods;
    std::size_t threads = 0;
};

void add_common(CLI::App& cmd, Flags& f) {
    cmd.add_option("--agg-mode", f.agg_mode, "sum, average, first or last")->capture_default_str();
    cmd.add_option("--ratio", f.ratio, "High-frequency periods per low-frequency period")->capture_default_str();
    cmd.add_option("--seed", f.seed, "Random seed")->capture_default_str();
    cmd.add_option("--output-dir", f.output_dir, "Directory for output files")->capture_default_str();
}

void add_dgp(CLI::App& cmd, Flags& f) {
    cmd.add_option("--n-low", f.n_low, "Low-frequency observations")->capture_default_str();
    cmd.add_option("--n-high", f.n_high, "High-frequency periods (default n-low * ratio)");
    cmd.add_option("--dims", f.dims, "Number of indicators")->capture_default_str();
    cmd.add_option("--beta", f.beta, "Magnitude of nonzero coefficients")->capture_default_str();
    cmd.add_option("--sparsity", f.sparsity, "Fraction of zero coefficients")->capture_default_str();
    cmd.add_option("--rho", f.rho, "Autoregressive parameter of the errors")->capture_default_str();
    cmd.add_option("--error-method", f.error_method, "chowlin, fernandez or litterman")->capture_default_str();
}

td::RunConfig to_config(const Flags& f, td::Command command) {
    td::RunConfig config;
    config.command = command;
    config.input = f.input;
    config.indicators = f.indicators;
    config.method = td::parse_method(f.method);
    config.agg_mode = td::parse_aggregation_mode(f.agg_mode);
    config.ratio = f.ratio;
    if (!f.rho_grid.empty()) config.rho_grid = td::parse_rho_grid(f.rho_grid);
    config.correlation_threshold = f.corr_threshold;
    config.seed = f.seed;
    config.output_dir = f.output_dir;

    if (command == td::Command::Disaggregate) {
        if (f.n_high) config.n_high = *f.n_high;
        return config;
    }
    config.dgp.n_low = f.n_low;
    config.dgp.ratio = f.ratio;
    config.dgp.n_high = f.n_high.value_or(f.n_low * f.ratio);
    config.dgp.d = f.dims;
    config.dgp.beta_magnitude = f.beta;
    config.dgp.sparsity = f.sparsity;
    config.dgp.rho = f.rho;
    config.dgp.error_process = td::parse_error_process(f.error_method);
    config.dgp.agg_mode = config.agg_mode;
    config.replicates = f.replicates;
    config.threads = f.threads;
    for (const auto& m : f.methods) config.benchmark_methods.push_back(td::parse_method(m));
    return config;
}

int report(const td::ErrorRecord& record) {
    std::cerr << record.to_json() << '\n';
    return record.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal disaggregation of low-frequency series with high-frequency indicators"};
    app.require_subcommand(1);
    Flags f;

    auto* disagg = app.add_subcommand("disaggregate", "Estimate a high-frequency series from a low-frequency one");
    disagg->add_option("--input", f.input, "Low-frequency series file")->required();
    disagg->add_option("--indicators", f.indicators, "High-frequency indicator panel (default: constant)");
    disagg->add_option("--method", f.method, "chowlin, fernandez, litterman, sptd or adaptive-sptd")
        ->capture_default_str();
    disagg->add_option("--rho-grid", f.rho_grid, "lo:hi:count or comma list (default -0.99:0.99:199)");
    disagg->add_option("--corr-threshold", f.corr_threshold, "Drop indicators correlated above this level");
    disagg->add_option("--n-high", f.n_high, "High-frequency length when no indicators are given");
    add_common(*disagg, f);

    auto* simulate = app.add_subcommand("simulate", "Write a synthetic data set");
    add_dgp(*simulate, f);
    add_common(*simulate, f);

    auto* bench = app.add_subcommand("benchmark", "Monte-Carlo comparison of methods on synthetic data");
    add_dgp(*bench, f);
    add_common(*bench, f);
    bench->add_option("--replicates", f.replicates, "Number of replicates")->capture_default_str();
    bench->add_option("--methods", f.methods, "Methods to compare (default: all valid)")->delimiter(',');
    bench->add_option("--threads", f.threads, "Worker threads (0: all cores)")->capture_default_str();
    bench->add_option("--rho-grid", f.rho_grid, "lo:hi:count or comma list (default -0.99:0.99:199)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return report({"UsageError", "validation", e.what(), td::kExitValidation});
    }

    const td::Command command = simulate->parsed() ? td::Command::Simulate
                                : bench->parsed()  ? td::Command::Benchmark
                                                   : td::Command::Disaggregate;
    td::RunConfig config;
    try {
        config = to_config(f, command);
    } catch (const td::Error& e) {
        return report({e.kind(), "validation", e.what(), td::kExitValidation});
    }

    const td::RunOutcome outcome = td::run(config, std::cout);
    if (outcome.error) return report(*outcome.error);
    for (const auto& path : outcome.artifacts) std::cout << "wrote " << path.string() << '\n';
    return outcome.exit_code;
}
