#pragma once

// Dataset quality metrics:
//   maer — mean absolute error rate against reference values, with an
//          epsilon guard in the denominator
//   apr  — fraction of samples inside the closed range [0, UCL]
//   overall_performance — accepted fraction times classifier accuracy
// plus the mean + k*sigma upper control limit that APR ranges against.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compacta/error.hpp"
#include "compacta/standardization.hpp"
#include "compacta/types.hpp"

namespace compacta {

inline double maer(std::span<const double> observed, std::span<const double> references,
                   double epsilon) {
    if (observed.empty())
        throw numeric_error("maer: empty input");
    if (observed.size() != references.size())
        throw numeric_error("maer: length mismatch (" + std::to_string(observed.size()) +
                            " observed vs " + std::to_string(references.size()) +
                            " references)");
    if (!(epsilon > 0.0))
        throw numeric_error("maer: epsilon must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double denom = references[i] + epsilon;
        if (denom == 0.0)
            throw numeric_error("maer: reference + epsilon is zero at index " +
                                std::to_string(i));
        acc += std::abs(observed[i] - references[i]) / denom;
    }
    return acc / static_cast<double>(observed.size());
}

// Upper control limit: mean + k_sigma standard deviations (population form).
inline double ucl(std::span<const double> data, double k_sigma) {
    if (data.empty())
        throw numeric_error("ucl: empty input");
    if (!(k_sigma > 0.0))
        throw numeric_error("ucl: k_sigma must be positive");
    const ClassicMoments m = fit_classic(data);
    return m.mean + k_sigma * std::sqrt(m.variance);
}

// Accuracy percentage within ranges: the fraction of samples in [0, ucl_value],
// both bounds inclusive.
inline double apr(std::span<const double> data, double ucl_value) {
    if (data.empty())
        throw numeric_error("apr: empty input");
    std::size_t within = 0;
    for (double v : data)
        if (v >= 0.0 && v <= ucl_value) ++within;
    return static_cast<double>(within) / static_cast<double>(data.size());
}

inline double overall_performance(const ConfusionSummary& cs) {
    if (cs.total_count == 0)
        throw numeric_error("overall_performance: total_count must be positive");
    if (cs.accepted_count > cs.total_count)
        throw numeric_error("overall_performance: accepted_count exceeds total_count");
    if (!(cs.accuracy >= 0.0 && cs.accuracy <= 1.0))
        throw numeric_error("overall_performance: accuracy out of [0,1]");
    return (static_cast<double>(cs.accepted_count) / static_cast<double>(cs.total_count)) *
           cs.accuracy;
}

// Everything a quality evaluation produced, plus the inputs that shaped it.
// Optional entries stay empty when their inputs were not supplied (maer, op)
// or the dataset was empty (apr, ucl).
struct QualityReport {
    std::optional<double> maer;
    std::optional<double> apr;
    std::optional<double> op;
    std::optional<double> ucl;
    double epsilon = 0.0;
    std::size_t within_ucl = 0;
    std::size_t total = 0;
    std::optional<std::string> note;
    std::vector<std::string> warnings;
};

} // namespace compacta
