#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compacta/error.hpp"

namespace compacta {

// A uniformly sampled single-channel waveform. Samples are dimensionless
// amplitudes; ingestion guarantees they are finite.
struct Signal {
    std::vector<double> samples;
    double sampling_rate_hz = 0.0;
    std::string record_id;
};

inline void validate_signal(const Signal& sig) {
    if (!(sig.sampling_rate_hz > 0.0))
        throw numeric_error("sampling rate must be positive");
    if (sig.samples.empty())
        throw numeric_error("signal '" + sig.record_id + "' has no samples");
}

// Ordered anchor positions (R-peak analogue) within one signal. May be empty.
struct PeakList {
    std::vector<std::size_t> indices;
    std::string source_record_id;
};

inline void validate_peaks(const PeakList& peaks, std::size_t signal_length) {
    for (std::size_t i = 1; i < peaks.indices.size(); ++i) {
        if (peaks.indices[i] <= peaks.indices[i - 1])
            throw numeric_error("peak indices not strictly increasing at position " +
                                std::to_string(i));
    }
    if (!peaks.indices.empty() && peaks.indices.back() >= signal_length)
        throw numeric_error("peak index " + std::to_string(peaks.indices.back()) +
                            " out of range for signal of " +
                            std::to_string(signal_length) + " samples");
}

enum class SliceMethod { time_slice, rrif, fixed };

constexpr std::string_view method_tag(SliceMethod m) {
    switch (m) {
        case SliceMethod::time_slice: return "TIME_SLICE";
        case SliceMethod::rrif: return "RRIF";
        case SliceMethod::fixed: return "FIXED";
    }
    return "UNKNOWN";
}

inline std::optional<SliceMethod> method_from_tag(std::string_view tag) {
    if (tag == "TIME_SLICE") return SliceMethod::time_slice;
    if (tag == "RRIF") return SliceMethod::rrif;
    if (tag == "FIXED") return SliceMethod::fixed;
    return std::nullopt;
}

// Per-frame provenance: which record the frame came from, where it was
// anchored, and which slicing method produced it.
struct FrameInfo {
    std::string record_id;
    std::size_t anchor_index = 0;
    SliceMethod method = SliceMethod::time_slice;
};

// The compact dataset: a rectangular frame_count x frame_length matrix with
// per-frame provenance and optional per-frame labels (empty string = no
// label). Rectangularity is enforced on every insertion; it is the
// compactness contract everything downstream relies on.
class FrameSet {
public:
    explicit FrameSet(std::size_t frame_length) : frame_length_(frame_length) {
        if (frame_length_ == 0)
            throw numeric_error("frame_length must be positive");
    }

    void push_frame(std::span<const double> frame, FrameInfo info,
                    std::string label = {}) {
        if (frame.size() != frame_length_)
            throw numeric_error("frame of " + std::to_string(frame.size()) +
                                " samples does not match frame_length " +
                                std::to_string(frame_length_));
        check_text_field(info.record_id, "record_id");
        check_text_field(label, "label");
        values_.insert(values_.end(), frame.begin(), frame.end());
        provenance_.push_back(std::move(info));
        labels_.push_back(std::move(label));
    }

    std::size_t frame_count() const { return provenance_.size(); }
    std::size_t frame_length() const { return frame_length_; }

    std::span<const double> frame(std::size_t i) const {
        return {values_.data() + i * frame_length_, frame_length_};
    }

    // Row-major flat view of every frame value; the pooled dataset.
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    const std::vector<FrameInfo>& provenance() const { return provenance_; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool has_labels() const {
        for (const auto& l : labels_)
            if (!l.empty()) return true;
        return false;
    }

private:
    // CSV rows are newline-delimited, so text fields must not span lines.
    static void check_text_field(const std::string& s, const char* what) {
        if (s.find_first_of("\n\r") != std::string::npos)
            throw numeric_error(std::string(what) + " must not contain line breaks");
    }

    std::size_t frame_length_;
    std::vector<double> values_;
    std::vector<FrameInfo> provenance_;
    std::vector<std::string> labels_;
};

// Classifier outcome summary consumed by the overall-performance metric:
// accepted_count of total_count samples survived screening, accuracy is the
// confusion-matrix accuracy of the downstream classifier.
struct ConfusionSummary {
    double accuracy = 0.0;
    std::size_t accepted_count = 0;
    std::size_t total_count = 0;
};

} // namespace compacta
