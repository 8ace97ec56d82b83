#pragma once

// Batch pipeline: ingest -> peaks -> slice -> standardize -> metrics -> write.
// Configuration is a flat key=value file with optional per-run overrides;
// unknown keys are rejected and every violation is reported, not just the
// first. Stage failures carry the stage name and partial outputs are removed.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "compacta/csv.hpp"
#include "compacta/error.hpp"
#include "compacta/metrics.hpp"
#include "compacta/peaks.hpp"
#include "compacta/slicing.hpp"
#include "compacta/standardization.hpp"
#include "compacta/types.hpp"

namespace compacta {

struct BinWidthSpec {
    enum class Kind { automatic, exact, fixed_width } kind = Kind::automatic;
    double width = 0.0; // used only when kind == fixed_width
};

struct PipelineConfig {
    SliceMethod method = SliceMethod::time_slice;
    double sampling_rate_hz = 0.0;

    std::filesystem::path signal;
    std::optional<std::filesystem::path> peaks;
    std::filesystem::path out;
    std::filesystem::path report;
    std::optional<std::filesystem::path> report_csv;
    std::optional<std::filesystem::path> references;

    bool detect = false;
    double min_height = 0.0;
    double refractory_s = 0.0;

    std::optional<double> window_s;
    std::optional<std::size_t> frame_length;
    std::optional<double> start_s;
    std::optional<double> duration_s;

    bool standardize = false;
    double eta = 0.5;
    BinWidthSpec bin_width;
    ScaleConvention scale_convention = ScaleConvention::standard_error;

    double epsilon = 1e-9;
    double k_sigma = 3.0;

    std::optional<std::size_t> op_accepted;
    std::optional<std::size_t> op_total;
    std::optional<double> op_accuracy;
};

namespace detail {

inline const char* method_config_name(SliceMethod m) {
    switch (m) {
        case SliceMethod::time_slice: return "time_slice";
        case SliceMethod::rrif: return "rrif";
        case SliceMethod::fixed: return "fixed";
    }
    return "unknown";
}

inline std::optional<SliceMethod> method_from_config_name(std::string_view name) {
    if (name == "time_slice") return SliceMethod::time_slice;
    if (name == "rrif") return SliceMethod::rrif;
    if (name == "fixed") return SliceMethod::fixed;
    return std::nullopt;
}

inline bool parse_bool(std::string_view value, bool& out) {
    if (value == "true") { out = true; return true; }
    if (value == "false") { out = false; return true; }
    return false;
}

// Splits "key=value" at the first '='; both sides trimmed.
inline bool split_kv(std::string_view entry, std::string& key, std::string& value) {
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) return false;
    key = std::string(trim(entry.substr(0, eq)));
    value = std::string(trim(entry.substr(eq + 1)));
    return !key.empty();
}

inline const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "method",       "sampling_rate_hz", "signal",     "peaks",
        "out",          "report",           "report_csv", "references",
        "detect",       "min_height",       "refractory_s",
        "window_s",     "frame_length",     "start_s",    "duration_s",
        "standardize",  "eta",              "bin_width",  "scale_convention",
        "epsilon",      "k_sigma",
        "op_accepted",  "op_total",         "op_accuracy",
    };
    return keys;
}

inline bool parse_bin_width_spec(const std::string& raw, BinWidthSpec& out,
                                 std::vector<std::string>& violations) {
    if (raw == "auto") {
        out.kind = BinWidthSpec::Kind::automatic;
        return true;
    }
    if (raw == "exact") {
        out.kind = BinWidthSpec::Kind::exact;
        return true;
    }
    if (double w; parse_double(raw, w) && w > 0.0) {
        out.kind = BinWidthSpec::Kind::fixed_width;
        out.width = w;
        return true;
    }
    violations.push_back("bin_width must be 'auto', 'exact', or a positive number; got '" + raw +
                         "'");
    return false;
}

inline bool parse_scale_convention(const std::string& raw, ScaleConvention& out,
                                   std::vector<std::string>& violations) {
    if (raw == "se") {
        out = ScaleConvention::standard_error;
        return true;
    }
    if (raw == "sd") {
        out = ScaleConvention::standard_deviation;
        return true;
    }
    violations.push_back("scale_convention must be 'se' or 'sd', got '" + raw + "'");
    return false;
}

// require_report is false for slice-only invocations, which emit no quality
// report.
inline PipelineConfig build_config(const std::map<std::string, std::string>& kv,
                                   std::vector<std::string>& violations,
                                   bool require_report = true) {
    PipelineConfig cfg;

    for (const auto& [key, value] : kv) {
        bool known = false;
        for (const auto& k : known_config_keys())
            if (k == key) { known = true; break; }
        if (!known) violations.push_back("unknown key '" + key + "'");
    }

    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto get_real = [&](const char* key, double& out) -> bool {
        const std::string* raw = get(key);
        if (!raw) return false;
        if (!parse_double(*raw, out)) {
            violations.push_back(std::string(key) + " must be a number, got '" + *raw + "'");
            return false;
        }
        return true;
    };
    auto get_count = [&](const char* key, std::size_t& out) -> bool {
        const std::string* raw = get(key);
        if (!raw) return false;
        if (!parse_index(*raw, out)) {
            violations.push_back(std::string(key) + " must be a non-negative integer, got '" +
                                 *raw + "'");
            return false;
        }
        return true;
    };
    auto get_bool = [&](const char* key, bool& out) {
        const std::string* raw = get(key);
        if (!raw) return;
        if (!parse_bool(*raw, out))
            violations.push_back(std::string(key) + " must be true or false, got '" + *raw + "'");
    };

    bool method_known = false;
    if (const std::string* raw = get("method")) {
        if (auto m = method_from_config_name(*raw)) {
            cfg.method = *m;
            method_known = true;
        } else {
            violations.push_back("method must be one of time_slice, rrif, fixed; got '" + *raw +
                                 "'");
        }
    } else {
        violations.push_back("method is required");
    }

    if (get_real("sampling_rate_hz", cfg.sampling_rate_hz)) {
        if (!(cfg.sampling_rate_hz > 0.0))
            violations.push_back("sampling_rate_hz must be positive");
    } else if (!get("sampling_rate_hz")) {
        violations.push_back("sampling_rate_hz is required");
    }

    if (const std::string* raw = get("signal")) cfg.signal = *raw;
    else violations.push_back("signal is required");
    if (const std::string* raw = get("out")) cfg.out = *raw;
    else violations.push_back("out is required");
    if (const std::string* raw = get("report")) cfg.report = *raw;
    else if (require_report) violations.push_back("report is required");
    if (const std::string* raw = get("peaks")) cfg.peaks = *raw;
    if (const std::string* raw = get("report_csv")) cfg.report_csv = *raw;
    if (const std::string* raw = get("references")) cfg.references = *raw;

    get_bool("detect", cfg.detect);
    const bool have_min_height = get_real("min_height", cfg.min_height) || get("min_height");
    if (get_real("refractory_s", cfg.refractory_s)) {
        if (cfg.refractory_s < 0.0) violations.push_back("refractory_s must be non-negative");
    }
    if (!cfg.detect) {
        if (have_min_height) violations.push_back("min_height requires detect=true");
        if (get("refractory_s")) violations.push_back("refractory_s requires detect=true");
    }

    double real_value = 0.0;
    if (get_real("window_s", real_value)) {
        cfg.window_s = real_value;
        if (!(real_value > 0.0)) violations.push_back("window_s must be positive");
    }
    std::size_t count_value = 0;
    if (get_count("frame_length", count_value)) {
        cfg.frame_length = count_value;
        if (count_value < 2) violations.push_back("frame_length must be at least 2");
    }
    if (get_real("start_s", real_value)) {
        cfg.start_s = real_value;
        if (real_value < 0.0) violations.push_back("start_s must be non-negative");
    }
    if (get_real("duration_s", real_value)) {
        cfg.duration_s = real_value;
        if (!(real_value > 0.0)) violations.push_back("duration_s must be positive");
    }

    if (method_known) {
        const char* name = method_config_name(cfg.method);
        auto require_key = [&](const char* key, bool present) {
            if (!present)
                violations.push_back(std::string(key) + " is required for " + name);
        };
        auto forbid_key = [&](const char* key) {
            if (get(key)) violations.push_back(std::string(key) + " not valid for " + name);
        };
        switch (cfg.method) {
            case SliceMethod::time_slice:
                require_key("window_s", get("window_s") != nullptr);
                forbid_key("frame_length");
                forbid_key("start_s");
                forbid_key("duration_s");
                break;
            case SliceMethod::rrif:
                require_key("frame_length", get("frame_length") != nullptr);
                forbid_key("window_s");
                forbid_key("start_s");
                forbid_key("duration_s");
                break;
            case SliceMethod::fixed:
                require_key("start_s", get("start_s") != nullptr);
                require_key("duration_s", get("duration_s") != nullptr);
                forbid_key("window_s");
                forbid_key("frame_length");
                forbid_key("peaks");
                forbid_key("detect");
                break;
        }
    }

    get_bool("standardize", cfg.standardize);
    if (get_real("eta", cfg.eta)) {
        if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0)) violations.push_back("eta out of [0,1]");
    }
    if (const std::string* raw = get("bin_width"))
        parse_bin_width_spec(*raw, cfg.bin_width, violations);
    if (const std::string* raw = get("scale_convention"))
        parse_scale_convention(*raw, cfg.scale_convention, violations);

    if (get_real("epsilon", cfg.epsilon)) {
        if (!(cfg.epsilon > 0.0)) violations.push_back("epsilon must be positive");
    }
    if (get_real("k_sigma", cfg.k_sigma)) {
        if (!(cfg.k_sigma > 0.0)) violations.push_back("k_sigma must be positive");
    }

    if (get_count("op_accepted", count_value)) cfg.op_accepted = count_value;
    if (get_count("op_total", count_value)) cfg.op_total = count_value;
    if (get_real("op_accuracy", real_value)) {
        cfg.op_accuracy = real_value;
        if (!(real_value >= 0.0 && real_value <= 1.0))
            violations.push_back("op_accuracy out of [0,1]");
    }
    const int op_keys = (get("op_accepted") != nullptr) + (get("op_total") != nullptr) +
                        (get("op_accuracy") != nullptr);
    if (op_keys != 0 && op_keys != 3) {
        violations.push_back("op_accepted, op_total, op_accuracy must be supplied together");
    } else if (op_keys == 3 && cfg.op_accepted && cfg.op_total) {
        if (*cfg.op_total == 0) violations.push_back("op_total must be positive");
        else if (*cfg.op_accepted > *cfg.op_total)
            violations.push_back("op_accepted exceeds op_total");
    }

    return cfg;
}

} // namespace detail

// Parses and validates a key=value config file plus "key=value" overrides
// (overrides win). Throws config_error carrying the complete violation list.
inline PipelineConfig validate_config(const std::filesystem::path& path,
                                      const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config file: " + path.string());

    std::vector<std::string> violations;
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t row = 0;
    while (detail::next_content_line(in, line, row)) {
        std::string key, value;
        if (!detail::split_kv(line, key, value)) {
            violations.push_back(path.string() + " row " + std::to_string(row) +
                                 ": expected key=value");
            continue;
        }
        if (kv.count(key)) {
            violations.push_back("duplicate key '" + key + "'");
            continue;
        }
        kv.emplace(std::move(key), std::move(value));
    }
    for (const auto& entry : overrides) {
        std::string key, value;
        if (!detail::split_kv(entry, key, value)) {
            violations.push_back("invalid override '" + entry + "': expected key=value");
            continue;
        }
        kv[key] = value;
    }

    PipelineConfig cfg = detail::build_config(kv, violations);
    if (!violations.empty())
        throw config_error(std::move(violations));
    return cfg;
}

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const config_error& e) {
        throw config_error(std::string(stage) + ": " + e.what());
    } catch (const io_error& e) {
        throw io_error(std::string(stage) + ": " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error(std::string(stage) + ": " + e.what());
    }
}

} // namespace detail

// Peak acquisition policy: an external peaks file always wins over detection.
inline PeakList acquire_peaks(const PipelineConfig& cfg, const Signal& sig) {
    if (cfg.peaks) {
        PeakList peaks = read_peaks_csv(*cfg.peaks);
        validate_peaks(peaks, sig.samples.size());
        return peaks;
    }
    if (cfg.detect)
        return detect_peaks(sig, PeakDetectConfig{cfg.min_height, cfg.refractory_s});
    throw config_error("no peaks file configured and detection is disabled");
}

inline FrameSet slice_frames(const PipelineConfig& cfg, const Signal& sig,
                             const PeakList& peaks) {
    switch (cfg.method) {
        case SliceMethod::time_slice:
            return time_slice(sig, peaks, TimeSliceConfig{cfg.window_s.value()});
        case SliceMethod::rrif:
            return rr_frame(sig, peaks, RRIFConfig{cfg.frame_length.value()});
        case SliceMethod::fixed:
            return fixed_slice(sig, FixedSliceConfig{cfg.start_s.value(), cfg.duration_s.value()});
    }
    throw config_error("unsupported slicing method");
}

inline std::optional<double> resolve_bin_width(const BinWidthSpec& spec,
                                               std::span<const double> data) {
    switch (spec.kind) {
        case BinWidthSpec::Kind::automatic: return freedman_diaconis_width(data);
        case BinWidthSpec::Kind::exact: return std::nullopt;
        case BinWidthSpec::Kind::fixed_width: return spec.width;
    }
    return std::nullopt;
}

// Fits the pooled model over every frame value and rewrites the frames with
// their mode-standardized values. Pooled fitting keeps frames comparable.
inline StandardizationModel standardize_frameset(FrameSet& frames, double eta,
                                                 const BinWidthSpec& bin_width,
                                                 ScaleConvention convention) {
    std::vector<double>& values = frames.values();
    const StandardizationModel model =
        fit_model(values, eta, resolve_bin_width(bin_width, values), convention);
    for (double& v : values) v = standardize_mode(v, model);
    return model;
}

struct QualityInputs {
    double epsilon = 1e-9;
    double k_sigma = 3.0;
    std::optional<std::filesystem::path> references;
    std::optional<ConfusionSummary> confusion;
};

// Quality evaluation over pooled (possibly standardized) frame values.
inline QualityReport evaluate_quality(std::span<const double> values, const QualityInputs& in) {
    QualityReport rep;
    rep.epsilon = in.epsilon;
    rep.total = values.size();
    if (values.empty()) {
        rep.note = "empty dataset";
    } else {
        const double limit = ucl(values, in.k_sigma);
        rep.ucl = limit;
        std::size_t within = 0;
        for (double v : values)
            if (v >= 0.0 && v <= limit) ++within;
        rep.within_ucl = within;
        rep.apr = static_cast<double>(within) / static_cast<double>(values.size());
        if (in.references) {
            const std::vector<double> refs = read_values_csv(*in.references);
            for (double r : refs) {
                if (r < 0.0) {
                    rep.warnings.push_back(
                        "negative reference values: relative error loses its usual meaning");
                    break;
                }
            }
            rep.maer = maer(values, refs, in.epsilon);
        }
    }
    if (in.confusion) rep.op = overall_performance(*in.confusion);
    return rep;
}

inline QualityReport compute_quality(const PipelineConfig& cfg, const FrameSet& frames) {
    QualityInputs in;
    in.epsilon = cfg.epsilon;
    in.k_sigma = cfg.k_sigma;
    in.references = cfg.references;
    if (cfg.op_accuracy)
        in.confusion = ConfusionSummary{*cfg.op_accuracy, *cfg.op_accepted, *cfg.op_total};
    return evaluate_quality(frames.values(), in);
}

namespace detail {

inline std::string report_value(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("na");
}

} // namespace detail

// key=value report, UTF-8, LF endings, fixed key order.
inline void write_report_kv(const QualityReport& rep, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open report file: " + path.string());
    out << "maer=" << detail::report_value(rep.maer) << '\n'
        << "apr=" << detail::report_value(rep.apr) << '\n'
        << "op=" << detail::report_value(rep.op) << '\n'
        << "ucl=" << detail::report_value(rep.ucl) << '\n'
        << "epsilon=" << detail::format_double(rep.epsilon) << '\n'
        << "within_ucl=" << rep.within_ucl << '\n'
        << "total=" << rep.total << '\n';
    if (rep.note) out << "note=" << *rep.note << '\n';
    for (const auto& w : rep.warnings) out << "warning=" << w << '\n';
    out.flush();
    if (!out)
        throw io_error("failed while writing " + path.string());
}

// Same report as a single CSV row.
inline void write_report_csv(const QualityReport& rep, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open report file: " + path.string());
    out << "maer,apr,op,ucl,epsilon,within_ucl,total\n"
        << detail::report_value(rep.maer) << ',' << detail::report_value(rep.apr) << ','
        << detail::report_value(rep.op) << ',' << detail::report_value(rep.ucl) << ','
        << detail::format_double(rep.epsilon) << ',' << rep.within_ucl << ',' << rep.total
        << '\n';
    out.flush();
    if (!out)
        throw io_error("failed while writing " + path.string());
}

struct RunSummary {
    std::size_t frame_count = 0;
    std::size_t frame_length = 0;
    QualityReport report;
    std::optional<StandardizationModel> model;
};

// Runs every stage in order. Any failure is rethrown with its stage name and
// whatever output files were already opened are removed, so on error no
// partial artifacts survive.
inline RunSummary run_pipeline(const PipelineConfig& cfg) {
    const Signal sig = detail::run_stage(
        "ingest", [&] { return read_signal_csv(cfg.signal, cfg.sampling_rate_hz); });

    FrameSet frames = [&] {
        if (cfg.method == SliceMethod::fixed) {
            return detail::run_stage("slice",
                                     [&] { return slice_frames(cfg, sig, PeakList{}); });
        }
        const PeakList peaks =
            detail::run_stage("peaks", [&] { return acquire_peaks(cfg, sig); });
        return detail::run_stage("slice", [&] { return slice_frames(cfg, sig, peaks); });
    }();

    RunSummary summary;
    summary.frame_length = frames.frame_length();
    summary.frame_count = frames.frame_count();

    if (cfg.standardize && frames.frame_count() > 0) {
        summary.model = detail::run_stage("standardize", [&] {
            return standardize_frameset(frames, cfg.eta, cfg.bin_width, cfg.scale_convention);
        });
    }

    summary.report =
        detail::run_stage("metrics", [&] { return compute_quality(cfg, frames); });

    std::vector<std::filesystem::path> written;
    try {
        detail::run_stage("write", [&] {
            written.push_back(cfg.out);
            write_frameset_csv(frames, cfg.out);
            written.push_back(cfg.report);
            write_report_kv(summary.report, cfg.report);
            if (cfg.report_csv) {
                written.push_back(*cfg.report_csv);
                write_report_csv(summary.report, *cfg.report_csv);
            }
        });
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
    return summary;
}

} // namespace compacta
