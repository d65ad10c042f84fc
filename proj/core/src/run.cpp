#include "tempdisagg/run.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "tempdisagg/errors.hpp"
#include "tempdisagg/gls.hpp"
#include "tempdisagg/io.hpp"
#include "tempdisagg/sparse.hpp"

namespace tempdisagg {
namespace {

namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    const double denom = ca.norm() * cb.norm();
    return denom > 0.0 ? ca.dot(cb) / denom : kNaN;
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(Eigen::Index v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void table(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
        write_table(dir_ / name, header, rows);
        written_.push_back(dir_ / name);
    }
    void series(const std::string& name, const std::string& column, const Eigen::VectorXd& values) {
        write_series(dir_ / name, column, values);
        written_.push_back(dir_ / name);
    }
    void panel(const std::string& name, const std::vector<std::string>& columns, const Eigen::MatrixXd& values) {
        write_panel(dir_ / name, columns, values);
        written_.push_back(dir_ / name);
    }

    [[nodiscard]] std::vector<fs::path> artifacts() && { return std::move(written_); }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

std::vector<double> grid_or_default(const RunConfig& config) {
    std::vector<double> grid = config.rho_grid ? *config.rho_grid : default_rho_grid();
    validate_rho_grid(grid);
    return grid;
}

// ---------------------------------------------------------------- disaggregate

std::vector<fs::path> run_disaggregate(const RunConfig& config, std::ostream& log) {
    const LowFrequencySeries series = load_series(config.input);
    const Eigen::Index n_low = series.values.size();
    const Eigen::Index observed = n_low * config.ratio;

    IndicatorPanel panel;
    if (config.indicators.empty()) {
        const Eigen::Index n_high = config.n_high.value_or(observed);
        panel.names = {"constant"};
        panel.values = Eigen::MatrixXd::Ones(n_high, 1);
    } else {
        panel = load_panel(config.indicators);
    }
    if (panel.values.rows() < observed)
        throw ShapeError("indicator rows (n_low * ratio)", static_cast<std::size_t>(observed),
                         static_cast<std::size_t>(panel.values.rows()));

    ArtifactWriter out(config.output_dir);
    if (config.correlation_threshold) {
        const CorrelationFilterResult filter = correlation_filter(panel.values, *config.correlation_threshold);
        std::vector<std::vector<std::string>> rows;
        for (const auto& drop : filter.dropped) {
            rows.push_back({panel.names[static_cast<std::size_t>(drop.dropped)],
                            drop.kept >= 0 ? panel.names[static_cast<std::size_t>(drop.kept)] : "",
                            drop.degenerate ? "" : fmt(drop.correlation),
                            drop.degenerate ? "zero-variance" : "correlated"});
        }
        out.table("filter_audit.csv", {"dropped", "kept", "correlation", "reason"}, rows);
        log << "correlation filter: kept " << filter.kept_columns.size() << " of " << panel.values.cols()
            << " indicators\n";
        panel = select_columns(panel, filter.kept_columns);
    }

    const AggregationSpec spec{config.agg_mode, config.ratio, n_low, panel.values.rows()};
    const std::vector<double> grid = grid_or_default(config);
    const DisaggregationResult result = disaggregate(series.values, panel.values, spec, config.method, grid);
    for (const auto& note : result.notices) log << note << '\n';

    const Eigen::VectorXd flat = flat_interpolation(series.values, spec);
    {
        std::vector<std::vector<std::string>> rows;
        for (Eigen::Index t = 0; t < spec.n_high; ++t) {
            const std::string period = t < static_cast<Eigen::Index>(panel.dates.size())
                                           ? panel.dates[static_cast<std::size_t>(t)]
                                           : std::to_string(t + 1);
            rows.push_back({period, fmt(result.y_high(t)), fmt(flat(t))});
        }
        out.table("disaggregated.csv", {"period", "y_hat", "interpolated"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        if (is_sparse(result.method)) rows.push_back({"(intercept)", fmt(result.intercept())});
        for (Eigen::Index j = 0; j < result.beta().size(); ++j)
            rows.push_back({panel.names[static_cast<std::size_t>(j)], fmt(result.beta()(j))});
        out.table("coefficients.csv", {"name", "beta"}, rows);
    }

    const Eigen::VectorXd aggregated = aggregate(result.y_high, spec);
    const double scale = std::max(series.values.cwiseAbs().maxCoeff(), 1e-300);
    const double max_residual = max_consistency_residual(result.y_high, series.values, spec);
    {
        std::vector<std::vector<std::string>> rows;
        for (Eigen::Index i = 0; i < n_low; ++i) {
            const double residual = aggregated(i) - series.values(i);
            rows.push_back({std::to_string(i + 1), fmt(series.values(i)), fmt(aggregated(i)), fmt(residual),
                            fmt(std::abs(residual) / scale)});
        }
        out.table("consistency.csv", {"period", "observed", "aggregated", "residual", "relative_residual"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        const auto add = [&rows](const char* key, std::string value) { rows.push_back({key, std::move(value)}); };
        add("method", std::string(to_string(result.method)));
        add("agg_mode", std::string(to_string(spec.mode)));
        add("ratio", fmt(spec.ratio));
        add("n_low", fmt(spec.n_low));
        add("n_high", fmt(spec.n_high));
        add("n_indicators", fmt(panel.values.cols()));
        add("selected", fmt(result.selected_columns.size()));
        add("rho", fmt(result.rho()));
        if (const auto* sparse = std::get_if<SparseFit>(&result.fit)) {
            add("lambda", fmt(sparse->lambda));
            add("intercept", fmt(sparse->intercept));
            add("sigma2", fmt(sparse->sigma2));
            add("loglik", fmt(sparse->loglik));
            add("bic", fmt(sparse->bic));
        } else {
            const auto& gls = std::get<GlsFit>(result.fit);
            add("sigma2", fmt(gls.sigma2));
            add("loglik", fmt(gls.loglik));
        }
        add("max_relative_consistency_residual", fmt(max_residual));
        out.table("parameters.csv", {"key", "value"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : result.trace)
            rows.push_back({fmt(e.rho), e.knot >= 0 ? std::to_string(e.knot) : "", std::isnan(e.lambda) ? "" : fmt(e.lambda),
                            fmt(e.df), fmt(e.loglik), fmt(e.bic), e.skipped ? "skipped" : "ok"});
        out.table("bic_trace.csv", {"rho", "knot", "lambda", "df", "loglik", "bic", "status"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (Eigen::Index i = 0; i < n_low; ++i)
            rows.push_back({"observed", "low", std::to_string(i + 1), fmt(series.values(i))});
        for (Eigen::Index t = 0; t < spec.n_high; ++t)
            rows.push_back({"disaggregated", "high", std::to_string(t + 1), fmt(result.y_high(t))});
        for (Eigen::Index t = 0; t < spec.n_high; ++t)
            rows.push_back({"interpolated", "high", std::to_string(t + 1), fmt(flat(t))});
        out.table("plot_data.csv", {"series", "frequency", "period", "value"}, rows);
    }
    log << "disaggregated " << n_low << " -> " << spec.n_high << " periods with " << to_string(result.method)
        << " (rho=" << fmt(result.rho()) << ", selected " << result.selected_columns.size()
        << " indicators, max relative consistency residual " << fmt(max_residual) << ")\n";
    return std::move(out).artifacts();
}

// ---------------------------------------------------------------- simulate

std::vector<std::string> indicator_names(Eigen::Index d) {
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
}

std::vector<fs::path> run_simulate(const RunConfig& config, std::ostream& log) {
    DgpConfig dgp = config.dgp;
    dgp.seed = config.seed;
    const DgpOutput data = generate(dgp);

    ArtifactWriter out(config.output_dir);
    out.series("y_low.csv", "y_low", data.y_low);
    out.series("y_high.csv", "y_high", data.y_high);
    out.panel("X.csv", indicator_names(dgp.d), data.x);
    out.series("beta_true.csv", "beta_true", data.beta_true);
    out.series("errors.csv", "errors", data.errors);
    log << "simulated n_low=" << dgp.n_low << " n_high=" << dgp.n_high << " d=" << dgp.d << " (seed " << config.seed
        << ")\n";
    return std::move(out).artifacts();
}

// ---------------------------------------------------------------- benchmark

struct ReplicateMetrics {
    bool ok = false;
    std::string failure;
    double rho_hat = kNaN;
    std::size_t support_size = 0;
    double true_positive_rate = kNaN;
    bool exact_support = false;
    double beta_error = kNaN;
    double consistency = kNaN;
    double corr_truth = kNaN;
    double corr_flat = kNaN;
};

ReplicateMetrics score(const DgpOutput& data, Method method, std::span<const double> grid) {
    ReplicateMetrics m;
    try {
        const DisaggregationResult result = disaggregate(data.y_low, data.x, data.spec, method, grid);
        m.ok = true;
        m.rho_hat = result.rho();
        m.support_size = result.selected_columns.size();
        std::size_t true_nonzero = 0;
        std::size_t hits = 0;
        bool exact = true;
        for (Eigen::Index j = 0; j < data.beta_true.size(); ++j) {
            const bool truth = data.beta_true(j) != 0.0;
            const bool chosen = result.beta()(j) != 0.0;
            true_nonzero += truth ? 1 : 0;
            hits += (truth && chosen) ? 1 : 0;
            exact = exact && (truth == chosen);
        }
        m.true_positive_rate = true_nonzero ? static_cast<double>(hits) / static_cast<double>(true_nonzero) : kNaN;
        m.exact_support = exact;
        m.beta_error = (result.beta() - data.beta_true).norm();
        m.consistency = max_consistency_residual(result.y_high, data.y_low, data.spec);
        m.corr_truth = correlation(result.y_high, data.y_high);
        m.corr_flat = correlation(flat_interpolation(data.y_low, data.spec), data.y_high);
    } catch (const Error& e) {
        m.failure = e.kind();
    }
    return m;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::vector<fs::path> run_benchmark(const RunConfig& config, std::ostream& log) {
    config.dgp.validate();
    if (config.replicates == 0) throw DomainError("benchmark needs at least one replicate");
    const std::vector<double> grid = grid_or_default(config);

    std::vector<Method> methods = config.benchmark_methods;
    if (methods.empty()) {
        if (config.dgp.d < config.dgp.n_low) methods = {Method::ChowLin, Method::Fernandez, Method::Litterman};
        methods.push_back(Method::SpTD);
        methods.push_back(Method::AdaptiveSpTD);
    }

    const std::size_t reps = config.replicates;
    std::vector<std::vector<ReplicateMetrics>> results(reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t r = next++; r < reps; r = next++) {
            DgpConfig dgp = config.dgp;
            dgp.seed = config.seed + r;
            const DgpOutput data = generate(dgp);
            std::vector<ReplicateMetrics> row;
            row.reserve(methods.size());
            for (Method method : methods) row.push_back(score(data, method, grid));
            results[r] = std::move(row);
        }
    };
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, reps);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    ArtifactWriter out(config.output_dir);
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t r = 0; r < reps; ++r) {
            for (std::size_t k = 0; k < methods.size(); ++k) {
                const auto& m = results[r][k];
                rows.push_back({std::to_string(r), std::to_string(config.seed + r), std::string(to_string(methods[k])),
                                m.ok ? "ok" : m.failure, fmt(m.rho_hat), fmt(m.support_size),
                                fmt(m.true_positive_rate), m.exact_support ? "1" : "0", fmt(m.beta_error),
                                fmt(m.consistency), fmt(m.corr_truth), fmt(m.corr_flat)});
            }
        }
        out.table("benchmark_replicates.csv",
                  {"replicate", "seed", "method", "status", "rho_hat", "support_size", "true_positive_rate",
                   "exact_support", "beta_error", "max_consistency_residual", "corr_truth", "corr_flat"},
                  rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < methods.size(); ++k) {
            std::vector<double> rho, tpr, err, corr, flat;
            std::size_t failures = 0;
            std::size_t exact = 0;
            std::size_t beats_flat = 0;
            double worst_consistency = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& m = results[r][k];
                if (!m.ok) {
                    ++failures;
                    continue;
                }
                rho.push_back(m.rho_hat);
                if (!std::isnan(m.true_positive_rate)) tpr.push_back(m.true_positive_rate);
                err.push_back(m.beta_error);
                corr.push_back(m.corr_truth);
                flat.push_back(m.corr_flat);
                exact += m.exact_support ? 1 : 0;
                beats_flat += m.corr_truth > m.corr_flat ? 1 : 0;
                worst_consistency = std::max(worst_consistency, m.consistency);
            }
            const double succeeded = static_cast<double>(reps - failures);
            rows.push_back({std::string(to_string(methods[k])), fmt(reps), fmt(failures), fmt(mean_of(rho)),
                            fmt(mean_of(tpr)), fmt(succeeded > 0 ? static_cast<double>(exact) / succeeded : kNaN),
                            fmt(mean_of(err)), fmt(worst_consistency), fmt(mean_of(corr)), fmt(mean_of(flat)),
                            fmt(succeeded > 0 ? static_cast<double>(beats_flat) / succeeded : kNaN)});
            log << to_string(methods[k]) << ": " << (reps - failures) << "/" << reps << " fits, exact support rate "
                << rows.back()[5] << ", mean corr " << rows.back()[8] << " vs flat " << rows.back()[9] << '\n';
        }
        out.table("benchmark_summary.csv",
                  {"method", "replicates", "failures", "mean_rho_hat", "mean_true_positive_rate", "exact_support_rate",
                   "mean_beta_error", "max_consistency_residual", "mean_corr_truth", "mean_corr_flat",
                   "share_beating_flat"},
                  rows);
    }
    return std::move(out).artifacts();
}

ErrorRecord make_record(const std::string& kind, ErrorCategory category, const std::string& message) {
    ErrorRecord record;
    record.kind = kind;
    record.category = category == ErrorCategory::Numerical ? "numerical" : "validation";
    record.message = message;
    record.exit_code = category == ErrorCategory::Numerical ? kExitNumerical : kExitValidation;
    return record;
}

}  // namespace

void RunConfig::validate() const {
    if (ratio < 1) throw DomainError("--ratio must be >= 1");
    if (correlation_threshold && !(*correlation_threshold > 0.0 && *correlation_threshold <= 1.0))
        throw DomainError("--corr-threshold must lie in (0, 1]");
    if (command == Command::Disaggregate && input.empty()) throw DomainError("--input is required for disaggregate");
    if (rho_grid) validate_rho_grid(*rho_grid);
    if (command != Command::Disaggregate) dgp.validate();
}

std::string ErrorRecord::to_json() const {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["category"] = category;
    j["message"] = message;
    j["exit_code"] = exit_code;
    return j.dump();
}

RunOutcome run(const RunConfig& config, std::ostream& log) {
    RunOutcome outcome;
    try {
        config.validate();
        switch (config.command) {
            case Command::Disaggregate:
                outcome.artifacts = run_disaggregate(config, log);
                break;
            case Command::Simulate:
                outcome.artifacts = run_simulate(config, log);
                break;
            case Command::Benchmark:
                outcome.artifacts = run_benchmark(config, log);
                break;
        }
        return outcome;
    } catch (const Error& e) {
        outcome.error = make_record(e.kind(), e.category(), e.what());
    } catch (const std::exception& e) {
        outcome.error = make_record("InternalError", ErrorCategory::Numerical, e.what());
    }
    outcome.exit_code = outcome.error->exit_code;
    std::error_code ec;
    if (!config.output_dir.empty() && fs::create_directories(config.output_dir, ec), !ec) {
        std::ofstream record(config.output_dir / "error.json", std::ios::trunc);
        if (record) record << outcome.error->to_json() << '\n';
    }
    return outcome;
}

std::vector<double> parse_rho_grid(std::string_view text) {
    auto number = [&text](std::string_view part) {
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        if (!part.empty() && part.front() == '+') part.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
            throw InvalidGrid("cannot parse rho grid '" + std::string(text) + "'");
        return v;
    };

    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        const auto first = text.find(':');
        const auto second = text.find(':', first + 1);
        if (second == std::string_view::npos) throw InvalidGrid("rho grid range must be lo:hi:count");
        const double lo = number(text.substr(0, first));
        const double hi = number(text.substr(first + 1, second - first - 1));
        const double count = number(text.substr(second + 1));
        if (!(count >= 1.0) || count != std::floor(count)) throw InvalidGrid("rho grid count must be a positive integer");
        const auto n = static_cast<std::size_t>(count);
        if (n == 1) {
            if (lo != hi) throw InvalidGrid("a one-point rho grid needs lo == hi");
            grid.push_back(lo);
        } else {
            for (std::size_t k = 0; k < n; ++k)
                grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
        }
    } else {
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto pos = text.find(',', start);
            grid.push_back(number(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    }
    validate_rho_grid(grid);
    return grid;
}

std::string_view to_string(Command command) noexcept {
    switch (command) {
        case Command::Disaggregate: return "disaggregate";
        case Command::Simulate: return "simulate";
        case Command::Benchmark: return "benchmark";
    }
    return "disaggregate";
}

}  // namespace tempdisagg
