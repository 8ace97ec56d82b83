// compacta: batch CLI for compact-dataset construction.
// Subcommands: run (full pipeline from a config file), slice, standardize,
// metrics, inspect. Data goes to files, logs go to stderr.
// Exit codes: 0 success, 2 config error, 3 io error, 4 numeric error.

#include <cstddef>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compacta/compacta.hpp"

namespace {

using namespace compacta;

void require_valid(const std::vector<std::string>& violations) {
    if (!violations.empty()) throw config_error(violations);
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
    const PipelineConfig cfg = validate_config(config_path, overrides);
    const RunSummary summary = run_pipeline(cfg);
    std::cerr << "compacta: wrote " << summary.frame_count << " frames x "
              << summary.frame_length << " values to " << cfg.out.string() << ", report to "
              << cfg.report.string() << "\n";
    return 0;
}

int cmd_slice(const std::map<std::string, std::string>& kv) {
    std::vector<std::string> violations;
    PipelineConfig cfg = detail::build_config(kv, violations, /*require_report=*/false);
    require_valid(violations);

    const Signal sig = detail::run_stage(
        "ingest", [&] { return read_signal_csv(cfg.signal, cfg.sampling_rate_hz); });
    FrameSet frames = [&] {
        if (cfg.method == SliceMethod::fixed)
            return detail::run_stage("slice", [&] { return slice_frames(cfg, sig, PeakList{}); });
        const PeakList peaks = detail::run_stage("peaks", [&] { return acquire_peaks(cfg, sig); });
        return detail::run_stage("slice", [&] { return slice_frames(cfg, sig, peaks); });
    }();
    detail::run_stage("write", [&] { write_frameset_csv(frames, cfg.out); });
    std::cerr << "compacta: wrote " << frames.frame_count() << " frames x "
              << frames.frame_length() << " values to " << cfg.out.string() << "\n";
    return 0;
}

int cmd_standardize(const std::string& data_path, const std::string& out_path, double eta,
                    const std::string& bin_width_raw, const std::string& scale_raw,
                    bool classic) {
    std::vector<std::string> violations;
    BinWidthSpec bin_width;
    detail::parse_bin_width_spec(bin_width_raw, bin_width, violations);
    ScaleConvention convention = ScaleConvention::standard_error;
    detail::parse_scale_convention(scale_raw, convention, violations);
    if (!(eta >= 0.0 && eta <= 1.0)) violations.push_back("eta out of [0,1]");
    require_valid(violations);

    FrameSet frames = read_frameset_csv(data_path);
    if (frames.frame_count() == 0)
        throw numeric_error("standardize: dataset is empty");
    std::vector<double>& values = frames.values();
    const StandardizationModel model =
        fit_model(values, eta, resolve_bin_width(bin_width, values), convention);
    for (double& v : values)
        v = classic ? standardize_classic(v, model) : standardize_mode(v, model);
    write_frameset_csv(frames, out_path);

    std::cerr << "compacta: n=" << model.n << " mean=" << detail::format_double(model.mean)
              << " var_classic=" << detail::format_double(model.var_classic)
              << " phi=" << detail::format_double(model.phi)
              << " var_mode=" << detail::format_double(model.var_mode)
              << " mode_prob=" << detail::format_double(model.mode.mode_prob) << "\n";
    std::cerr << "compacta: wrote standardized frames to " << out_path << "\n";
    return 0;
}

int cmd_metrics(const std::string& data_path, const std::string& report_path,
                const std::string& report_csv_path, double epsilon, double k_sigma,
                const std::string& references_path, std::optional<std::size_t> op_accepted,
                std::optional<std::size_t> op_total, std::optional<double> op_accuracy) {
    std::vector<std::string> violations;
    if (!(epsilon > 0.0)) violations.push_back("epsilon must be positive");
    if (!(k_sigma > 0.0)) violations.push_back("k_sigma must be positive");
    const int op_flags =
        op_accepted.has_value() + op_total.has_value() + op_accuracy.has_value();
    if (op_flags != 0 && op_flags != 3)
        violations.push_back("--op-accepted, --op-total, --op-accuracy must be supplied together");
    if (op_accuracy && !(*op_accuracy >= 0.0 && *op_accuracy <= 1.0))
        violations.push_back("op_accuracy out of [0,1]");
    if (report_path.empty() && report_csv_path.empty())
        violations.push_back("at least one of --report, --report-csv is required");
    require_valid(violations);

    const FrameSet frames = read_frameset_csv(data_path);
    QualityInputs in;
    in.epsilon = epsilon;
    in.k_sigma = k_sigma;
    if (!references_path.empty()) in.references = references_path;
    if (op_flags == 3) in.confusion = ConfusionSummary{*op_accuracy, *op_accepted, *op_total};
    const QualityReport rep = evaluate_quality(frames.values(), in);
    if (!report_path.empty()) write_report_kv(rep, report_path);
    if (!report_csv_path.empty()) write_report_csv(rep, report_csv_path);
    std::cerr << "compacta: evaluated " << rep.total << " values\n";
    return 0;
}

int cmd_inspect(const std::string& data_path) {
    const FrameSet frames = read_frameset_csv(data_path);
    std::cout << "file: " << data_path << "\n"
              << "frames: " << frames.frame_count() << "\n"
              << "frame_length: " << frames.frame_length() << "\n"
              << "values: " << frames.frame_count() * frames.frame_length() << "\n";

    std::map<std::string, std::size_t> per_method;
    std::set<std::string> records;
    std::size_t labeled = 0;
    for (std::size_t i = 0; i < frames.frame_count(); ++i) {
        ++per_method[std::string(method_tag(frames.provenance()[i].method))];
        records.insert(frames.provenance()[i].record_id);
        if (!frames.labels()[i].empty()) ++labeled;
    }
    std::cout << "methods:";
    if (per_method.empty()) std::cout << " none";
    for (const auto& [tag, count] : per_method) std::cout << ' ' << tag << '=' << count;
    std::cout << "\nrecords:";
    if (records.empty()) std::cout << " none";
    for (const auto& r : records) std::cout << ' ' << r;
    std::cout << "\nlabeled_frames: " << labeled << "\n";
    if (frames.frame_count() > 0) {
        std::size_t lo = frames.provenance()[0].anchor_index;
        std::size_t hi = lo;
        for (const auto& info : frames.provenance()) {
            lo = std::min(lo, info.anchor_index);
            hi = std::max(hi, info.anchor_index);
        }
        std::cout << "anchor_range: [" << lo << ", " << hi << "]\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compacta: build compact fixed-shape datasets from long time-series records"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    std::string run_config;
    std::vector<std::string> run_overrides;
    run->add_option("--config", run_config, "key=value config file")->required();
    run->add_option("--set", run_overrides, "override a config key (key=value, repeatable)");

    auto* slice = app.add_subcommand("slice", "slice a signal into a frameset CSV");
    std::string sl_method, sl_signal, sl_peaks, sl_out, sl_fs;
    std::string sl_window, sl_frame_length, sl_start, sl_duration, sl_min_height, sl_refractory;
    bool sl_detect = false;
    slice->add_option("--method", sl_method, "time_slice | rrif | fixed")->required();
    slice->add_option("--fs", sl_fs, "sampling rate in Hz")->required();
    slice->add_option("--signal", sl_signal, "input signal CSV")->required();
    slice->add_option("--out", sl_out, "output frameset CSV")->required();
    slice->add_option("--peaks", sl_peaks, "peak index CSV");
    slice->add_option("--window-s", sl_window, "window seconds (time_slice)");
    slice->add_option("--frame-length", sl_frame_length, "points per frame (rrif)");
    slice->add_option("--start-s", sl_start, "range start seconds (fixed)");
    slice->add_option("--duration-s", sl_duration, "range duration seconds (fixed)");
    slice->add_flag("--detect", sl_detect, "detect peaks when no peaks file is given");
    slice->add_option("--min-height", sl_min_height, "detector amplitude threshold");
    slice->add_option("--refractory-s", sl_refractory, "detector refractory period seconds");

    auto* standardize = app.add_subcommand("standardize", "standardize a frameset in place");
    std::string st_data, st_out, st_bin_width = "auto", st_scale = "se";
    double st_eta = 0.5;
    bool st_classic = false;
    standardize->add_option("--data", st_data, "input frameset CSV")->required();
    standardize->add_option("--out", st_out, "output frameset CSV")->required();
    standardize->add_option("--eta", st_eta, "mode probability threshold (default 0.5)");
    standardize->add_option("--bin-width", st_bin_width, "auto | exact | positive number");
    standardize->add_option("--scale", st_scale, "se | sd");
    standardize->add_flag("--classic", st_classic, "apply the classic transform instead");

    auto* metrics = app.add_subcommand("metrics", "evaluate dataset quality");
    std::string mt_data, mt_report, mt_report_csv, mt_references;
    double mt_epsilon = 1e-9, mt_k_sigma = 3.0;
    std::optional<std::size_t> mt_op_accepted, mt_op_total;
    std::optional<double> mt_op_accuracy;
    metrics->add_option("--data", mt_data, "frameset CSV to evaluate")->required();
    metrics->add_option("--report", mt_report, "key=value report path");
    metrics->add_option("--report-csv", mt_report_csv, "CSV report path");
    metrics->add_option("--epsilon", mt_epsilon, "MAER denominator guard (default 1e-9)");
    metrics->add_option("--k-sigma", mt_k_sigma, "UCL sigma multiplier (default 3)");
    metrics->add_option("--references", mt_references, "reference values CSV for MAER");
    metrics->add_option("--op-accepted", mt_op_accepted, "accepted sample count");
    metrics->add_option("--op-total", mt_op_total, "total sample count");
    metrics->add_option("--op-accuracy", mt_op_accuracy, "confusion-matrix accuracy in [0,1]");

    auto* inspect = app.add_subcommand("inspect", "print frameset shape and provenance");
    std::string in_data;
    inspect->add_option("--data", in_data, "frameset CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(run_config, run_overrides);
        if (*slice) {
            std::map<std::string, std::string> kv;
            kv["method"] = sl_method;
            kv["sampling_rate_hz"] = sl_fs;
            kv["signal"] = sl_signal;
            kv["out"] = sl_out;
            if (!sl_peaks.empty()) kv["peaks"] = sl_peaks;
            if (!sl_window.empty()) kv["window_s"] = sl_window;
            if (!sl_frame_length.empty()) kv["frame_length"] = sl_frame_length;
            if (!sl_start.empty()) kv["start_s"] = sl_start;
            if (!sl_duration.empty()) kv["duration_s"] = sl_duration;
            if (sl_detect) kv["detect"] = "true";
            if (!sl_min_height.empty()) kv["min_height"] = sl_min_height;
            if (!sl_refractory.empty()) kv["refractory_s"] = sl_refractory;
            return cmd_slice(kv);
        }
        if (*standardize)
            return cmd_standardize(st_data, st_out, st_eta, st_bin_width, st_scale, st_classic);
        if (*metrics)
            return cmd_metrics(mt_data, mt_report, mt_report_csv, mt_epsilon, mt_k_sigma,
                               mt_references, mt_op_accepted, mt_op_total, mt_op_accuracy);
        if (*inspect) return cmd_inspect(in_data);
    } catch (const config_error& e) {
        std::cerr << "compacta: config error:\n" << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "compacta: io error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "compacta: numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "compacta: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
