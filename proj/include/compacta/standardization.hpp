#pragma once

// Classic and mode-based standardization. The mode-based variant replaces
// the mean with the revised mode phi: the empirical mode when its probability
// mass reaches the threshold eta, the mean otherwise. Its variance is the
// second moment about phi, which always dominates the classic variance by
// exactly (mean - phi)^2.
//
// Both transforms support two denominators: STANDARD_ERROR divides by
// sigma/sqrt(n), STANDARD_DEVIATION by sigma alone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compacta/error.hpp"

namespace compacta {

enum class ScaleConvention { standard_error, standard_deviation };

struct ClassicMoments {
    double mean = 0.0;
    double variance = 0.0; // population form, divisor n
};

struct ModeEstimate {
    double mode_value = 0.0; // x*, or the winning bin's mean of members
    double mode_prob = 0.0;  // p-hat, winning count / n
    std::optional<double> bin_width; // empty = exact value matching
};

struct StandardizationModel {
    std::size_t n = 0;
    double mean = 0.0;
    double var_classic = 0.0;
    double phi = 0.0;      // revised mode: mode_value if mode_prob >= eta, else mean
    double var_mode = 0.0; // second moment about phi
    double eta = 0.0;
    ModeEstimate mode;
    ScaleConvention scale_convention = ScaleConvention::standard_error;
};

inline ClassicMoments fit_classic(std::span<const double> data) {
    if (data.empty())
        throw numeric_error("fit_classic: empty input");
    double sum = 0.0;
    for (double v : data) {
        if (!std::isfinite(v))
            throw numeric_error("fit_classic: non-finite value in input");
        sum += v;
    }
    const double n = static_cast<double>(data.size());
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : data) {
        const double d = v - mean;
        sq += d * d;
    }
    return {mean, sq / n};
}

// Empirical mode. With no bin width, counts exact value equality; otherwise
// values land in intervals [k*w, (k+1)*w) and the winning bin reports the
// mean of its members. Ties go to the smallest mode value.
inline ModeEstimate estimate_mode(std::span<const double> data, std::optional<double> bin_width) {
    if (data.empty())
        throw numeric_error("estimate_mode: empty input");
    const double n = static_cast<double>(data.size());

    if (!bin_width) {
        std::map<double, std::size_t> counts;
        for (double v : data) ++counts[v];
        double best_value = 0.0;
        std::size_t best_count = 0;
        for (const auto& [value, count] : counts) {
            if (count > best_count) { // ascending keys: first max is smallest
                best_count = count;
                best_value = value;
            }
        }
        return {best_value, static_cast<double>(best_count) / n, std::nullopt};
    }

    if (!(*bin_width > 0.0))
        throw numeric_error("estimate_mode: bin_width must be positive");
    struct Bin {
        std::size_t count = 0;
        double sum = 0.0;
    };
    std::map<long long, Bin> bins;
    for (double v : data) {
        const auto k = static_cast<long long>(std::floor(v / *bin_width));
        Bin& bin = bins[k];
        ++bin.count;
        bin.sum += v;
    }
    const Bin* best = nullptr;
    for (const auto& [k, bin] : bins) {
        if (!best || bin.count > best->count) best = &bin;
    }
    return {best->sum / static_cast<double>(best->count),
            static_cast<double>(best->count) / n, bin_width};
}

inline double revised_mode(std::span<const double> data, double eta,
                           std::optional<double> bin_width) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw numeric_error("eta out of [0,1]");
    const ModeEstimate mode = estimate_mode(data, bin_width);
    if (mode.mode_prob >= eta) return mode.mode_value;
    return fit_classic(data).mean;
}

// Second moment about phi via the raw-moment expansion
// E[X^2] - 2*mean*phi + phi^2. Cancellation can push the result a hair below
// zero; tiny negatives are clamped, larger ones flag inconsistent inputs.
inline double fit_mode_variance(std::span<const double> data, double phi) {
    if (data.empty())
        throw numeric_error("fit_mode_variance: empty input");
    const double n = static_cast<double>(data.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : data) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double second_moment = sum_sq / n;
    const double var = second_moment - 2.0 * mean * phi + phi * phi;
    if (var < -1e-9)
        throw numeric_error("fit_mode_variance: negative result " +
                            std::to_string(var) + " indicates inconsistent inputs");
    return var < 0.0 ? 0.0 : var;
}

// Fits the full model in one pass over the rules above. var_mode is computed
// as var_classic + (mean - phi)^2, the cancellation-free equivalent of the
// raw-moment expansion; when the mode loses to eta this makes the model
// collapse onto the classic one bit-for-bit.
inline StandardizationModel fit_model(std::span<const double> data, double eta,
                                      std::optional<double> bin_width,
                                      ScaleConvention convention) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw numeric_error("eta out of [0,1]");
    const ClassicMoments classic = fit_classic(data);

    StandardizationModel model;
    model.n = data.size();
    model.mean = classic.mean;
    model.var_classic = classic.variance;
    model.eta = eta;
    model.mode = estimate_mode(data, bin_width);
    model.scale_convention = convention;
    if (model.mode.mode_prob >= eta) {
        model.phi = model.mode.mode_value;
        const double shift = model.mean - model.phi;
        model.var_mode = model.var_classic + shift * shift;
    } else {
        model.phi = model.mean;
        model.var_mode = model.var_classic;
    }
    return model;
}

namespace detail {

inline double standardization_scale(double variance, std::size_t n, ScaleConvention convention) {
    const double sigma = std::sqrt(variance);
    return convention == ScaleConvention::standard_error
               ? sigma / std::sqrt(static_cast<double>(n))
               : sigma;
}

} // namespace detail

inline double standardize_classic(double x, const StandardizationModel& model) {
    if (!(model.var_classic > 0.0))
        throw numeric_error("zero variance: cannot standardize");
    return (x - model.mean) /
           detail::standardization_scale(model.var_classic, model.n, model.scale_convention);
}

inline double standardize_mode(double x, const StandardizationModel& model) {
    if (!(model.var_mode > 0.0))
        throw numeric_error("zero mode-based variance: cannot standardize");
    return (x - model.phi) /
           detail::standardization_scale(model.var_mode, model.n, model.scale_convention);
}

// Freedman-Diaconis bin width, 2*IQR*n^(-1/3), with a range/sqrt(n) fallback
// when the IQR vanishes. Returns empty when the data admits no positive
// width (constant or singleton input), in which case exact matching applies.
inline std::optional<double> freedman_diaconis_width(std::span<const double> data) {
    if (data.empty())
        throw numeric_error("freedman_diaconis_width: empty input");
    const std::size_t n = data.size();
    if (n < 2) return std::nullopt;
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());

    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= n) return sorted[lo];
        return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    };

    const double iqr = quantile(0.75) - quantile(0.25);
    double width;
    if (iqr > 0.0) {
        width = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);
    } else {
        width = (sorted.back() - sorted.front()) / std::sqrt(static_cast<double>(n));
    }
    if (!(width > 0.0)) return std::nullopt;
    return width;
}

} // namespace compacta
