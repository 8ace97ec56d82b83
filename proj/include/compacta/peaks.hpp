#pragma once

// Anchor-peak acquisition: either a local-maximum detector with an amplitude
// floor and a refractory gap, or ingestion of externally annotated peak
// indices. Reference datasets usually ship annotated peaks; when both are
// available the external file wins (the pipeline enforces this).

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>

#include "compacta/csv.hpp"
#include "compacta/error.hpp"
#include "compacta/types.hpp"

namespace compacta {

struct PeakDetectConfig {
    double min_height = 0.0;   // absolute amplitude threshold
    double refractory_s = 0.0; // minimum spacing between accepted peaks
};

// Scans left to right and accepts index i when samples[i] is a strict-left
// local maximum (samples[i] > samples[i-1] and samples[i] >= samples[i+1],
// so the leftmost sample of a plateau wins), at least min_height tall, and
// at least refractory_s * sampling_rate_hz samples after the previously
// accepted peak. Greedy suppression: an accepted peak silences everything in
// its refractory window regardless of amplitude.
inline PeakList detect_peaks(const Signal& sig, const PeakDetectConfig& cfg) {
    validate_signal(sig);
    if (cfg.refractory_s < 0.0)
        throw numeric_error("refractory_s must be non-negative");
    if (sig.samples.size() < 3)
        throw numeric_error("signal too short for peak detection (need at least 3 samples, got " +
                            std::to_string(sig.samples.size()) + ")");

    const auto& s = sig.samples;
    const double min_gap = cfg.refractory_s * sig.sampling_rate_hz;

    PeakList peaks;
    peaks.source_record_id = sig.record_id;
    std::size_t last_accepted = 0;
    bool have_accepted = false;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (!(s[i] > s[i - 1] && s[i] >= s[i + 1])) continue;
        if (!(s[i] >= cfg.min_height)) continue;
        if (have_accepted && static_cast<double>(i - last_accepted) < min_gap) continue;
        peaks.indices.push_back(i);
        last_accepted = i;
        have_accepted = true;
    }
    return peaks;
}

// Reads peak indices from a single-column CSV: one non-negative integer per
// row, strictly increasing, optional "index" header. An empty file is a
// valid empty peak list.
inline PeakList read_peaks_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open peaks file: " + path.string());

    PeakList peaks;
    peaks.source_record_id = path.stem().string();
    std::string line;
    std::size_t row = 0;
    bool first_content = true;
    while (detail::next_content_line(in, line, row)) {
        auto field = std::string(detail::trim(line));
        if (first_content) {
            first_content = false;
            std::string lowered = field;
            for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (lowered == "index") continue;
        }
        std::size_t value;
        if (!detail::parse_index(field, value))
            throw io_error(detail::row_msg(path, row) + ": invalid peak index '" + field + "'");
        if (!peaks.indices.empty() && value <= peaks.indices.back())
            throw io_error(path.string() + ": non-increasing at row " + std::to_string(row));
        peaks.indices.push_back(value);
    }
    return peaks;
}

} // namespace compacta
