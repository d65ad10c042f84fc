#include "tempdisagg/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::ChowLin: return "chow-lin";
        case Method::Fernandez: return "fernandez";
        case Method::Litterman: return "litterman";
        case Method::SpTD: return "spTD";
        case Method::AdaptiveSpTD: return "adaptive-spTD";
    }
    return "chow-lin";
}

Method parse_method(std::string_view text) {
    std::string key;
    for (char c : text) {
        if (c == '-' || c == '_' || c == ' ') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (key == "chowlin") return Method::ChowLin;
    if (key == "fernandez") return Method::Fernandez;
    if (key == "litterman") return Method::Litterman;
    if (key == "sptd") return Method::SpTD;
    if (key == "adaptivesptd") return Method::AdaptiveSpTD;
    throw DomainError("unknown method '" + std::string(text) +
                      "' (expected chow-lin, fernandez, litterman, spTD or adaptive-spTD)");
}

bool is_sparse(Method method) noexcept {
    return method == Method::SpTD || method == Method::AdaptiveSpTD;
}

const Eigen::VectorXd& DisaggregationResult::beta() const {
    return std::visit([](const auto& f) -> const Eigen::VectorXd& { return f.beta; }, fit);
}

double DisaggregationResult::rho() const {
    return std::visit([](const auto& f) { return f.rho; }, fit);
}

double DisaggregationResult::intercept() const {
    if (const auto* sparse = std::get_if<SparseFit>(&fit)) return sparse->intercept;
    return 0.0;
}

}  // namespace tempdisagg
