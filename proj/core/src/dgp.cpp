#include "tempdisagg/dgp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {

ErrorProcess parse_error_process(std::string_view text) {
    std::string key;
    for (char c : text) {
        if (c == '-' || c == '_' || c == ' ') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (key == "chowlin" || key == "ar1") return ErrorProcess::ChowLin;
    if (key == "fernandez") return ErrorProcess::Fernandez;
    if (key == "litterman") return ErrorProcess::Litterman;
    throw DomainError("unknown error process '" + std::string(text) + "' (expected chow-lin, fernandez or litterman)");
}

std::string_view to_string(ErrorProcess process) noexcept {
    switch (process) {
        case ErrorProcess::ChowLin: return "chow-lin";
        case ErrorProcess::Fernandez: return "fernandez";
        case ErrorProcess::Litterman: return "litterman";
    }
    return "chow-lin";
}

AggregationSpec DgpConfig::aggregation_spec() const {
    return AggregationSpec{agg_mode, ratio, n_low, n_high};
}

void DgpConfig::validate() const {
    aggregation_spec().validate();
    if (d < 1) throw DomainError("number of indicators must be >= 1");
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw DomainError("sparsity must lie in [0, 1]");
    if (!(beta_magnitude > 0.0) || !std::isfinite(beta_magnitude)) throw DomainError("beta magnitude must be positive");
    if (!(design_sd > 0.0) || !std::isfinite(design_sd)) throw DomainError("design standard deviation must be positive");
    if (!std::isfinite(design_mean)) throw DomainError("design mean must be finite");
    if (error_process != ErrorProcess::Fernandez && !(std::abs(rho) < 1.0))
        throw DomainError("rho must satisfy |rho| < 1");
}

Eigen::Index zero_count(double sparsity, Eigen::Index d) {
    return static_cast<Eigen::Index>(std::floor(sparsity * static_cast<double>(d) + 0.5));
}

Eigen::VectorXd generate_errors(ErrorProcess process, double rho, Eigen::Index n, std::mt19937_64& rng) {
    if (n < 1) throw DomainError("error series length must be >= 1");
    if (process != ErrorProcess::Fernandez && !(std::abs(rho) < 1.0)) throw DomainError("rho must satisfy |rho| < 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd u(n);
    switch (process) {
        case ErrorProcess::ChowLin: {
            u(0) = normal(rng) / std::sqrt(1.0 - rho * rho);
            for (Eigen::Index t = 1; t < n; ++t) u(t) = rho * u(t - 1) + normal(rng);
            break;
        }
        case ErrorProcess::Fernandez: {
            double level = 0.0;
            for (Eigen::Index t = 0; t < n; ++t) u(t) = (level += normal(rng));
            break;
        }
        case ErrorProcess::Litterman: {
            double level = 0.0;
            double increment = 0.0;
            for (Eigen::Index t = 0; t < n; ++t) {
                increment = rho * increment + normal(rng);
                u(t) = (level += increment);
            }
            break;
        }
    }
    return u;
}

Eigen::VectorXd generate_errors(ErrorProcess process, double rho, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return generate_errors(process, rho, n, rng);
}

DgpOutput generate(const DgpConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed ? *config.seed : std::random_device{}());

    DgpOutput out;
    out.spec = config.aggregation_spec();

    std::normal_distribution<double> design(config.design_mean, config.design_sd);
    out.x.resize(config.n_high, config.d);
    for (Eigen::Index j = 0; j < config.d; ++j)
        for (Eigen::Index t = 0; t < config.n_high; ++t) out.x(t, j) = design(rng);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(config.d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const Eigen::Index zeros = zero_count(config.sparsity, config.d);
    std::bernoulli_distribution coin(0.5);
    out.beta_true = Eigen::VectorXd::Zero(config.d);
    for (Eigen::Index k = zeros; k < config.d; ++k)
        out.beta_true(order[static_cast<std::size_t>(k)]) = coin(rng) ? config.beta_magnitude : -config.beta_magnitude;

    out.errors = generate_errors(config.error_process, config.rho, config.n_high, rng);
    out.y_high = out.x * out.beta_true + out.errors;
    out.y_low = aggregate(out.y_high, out.spec);
    return out;
}

}  // namespace tempdisagg
