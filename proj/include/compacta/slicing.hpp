#pragma once

// The three compaction strategies that turn a long record into a rectangular
// frame matrix:
//   time_slice  — a fixed-duration window opened at each anchor peak
//   rr_frame    — each inter-peak segment resampled to a fixed point count
//   fixed_slice — one fixed time range retained per record
// Windows that would overrun the signal end are dropped, never zero-padded.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "compacta/error.hpp"
#include "compacta/types.hpp"

namespace compacta {

namespace detail {

// Seconds to sample count, rounding halfway cases to even. nearbyint honors
// the default FE_TONEAREST mode; nothing in this library changes it.
inline long long samples_from_seconds(double seconds, double rate_hz) {
    return static_cast<long long>(std::nearbyint(seconds * rate_hz));
}

} // namespace detail

struct TimeSliceConfig {
    double window_s = 0.0; // duration of the window opened at each peak
};

struct RRIFConfig {
    std::size_t frame_length = 0; // points per resampled inter-peak frame
};

struct FixedSliceConfig {
    double start_s = 0.0;    // offset of the retained range
    double duration_s = 0.0; // length of the retained range
};

// Opens a window of round(window_s * fs) samples at every peak and keeps the
// ones that fit: peak p contributes samples[p, p+W) iff p + W <= n. Peaks
// closer together than W produce overlapping frames.
inline FrameSet time_slice(const Signal& sig, const PeakList& peaks, const TimeSliceConfig& cfg) {
    validate_signal(sig);
    if (!(cfg.window_s > 0.0))
        throw numeric_error("window_s must be positive");
    const std::size_t n = sig.samples.size();
    validate_peaks(peaks, n);

    const long long w = detail::samples_from_seconds(cfg.window_s, sig.sampling_rate_hz);
    if (w < 1)
        throw numeric_error("window of " + std::to_string(cfg.window_s) +
                            " s rounds to zero samples at " +
                            std::to_string(sig.sampling_rate_hz) + " Hz");
    const auto window = static_cast<std::size_t>(w);
    if (window > n)
        throw numeric_error("window of " + std::to_string(window) +
                            " samples exceeds signal length " + std::to_string(n));

    FrameSet fs(window);
    for (std::size_t p : peaks.indices) {
        if (p + window > n) continue;
        fs.push_frame(std::span<const double>(sig.samples.data() + p, window),
                      FrameInfo{sig.record_id, p, SliceMethod::time_slice});
    }
    return fs;
}

// Resamples every inter-peak segment samples[p_k, p_{k+1}) to exactly
// frame_length points by linear interpolation. Output point j maps to source
// offset j*(seg_len-1)/(L-1), so the first and last samples of the segment
// are hit exactly; a segment already of length L is reproduced verbatim.
inline FrameSet rr_frame(const Signal& sig, const PeakList& peaks, const RRIFConfig& cfg) {
    validate_signal(sig);
    if (cfg.frame_length < 2)
        throw numeric_error("frame_length must be at least 2");
    validate_peaks(peaks, sig.samples.size());

    const std::size_t length = cfg.frame_length;
    FrameSet fs(length);
    std::vector<double> frame(length);
    const auto& s = sig.samples;
    for (std::size_t k = 0; k + 1 < peaks.indices.size(); ++k) {
        const std::size_t p0 = peaks.indices[k];
        const std::size_t p1 = peaks.indices[k + 1];
        const std::size_t seg_len = p1 - p0;
        if (seg_len < 2)
            throw numeric_error("RR segment between peaks " + std::to_string(p0) + " and " +
                                std::to_string(p1) + " has fewer than 2 samples");
        for (std::size_t j = 0; j < length; ++j) {
            const double pos =
                static_cast<double>(j * (seg_len - 1)) / static_cast<double>(length - 1);
            const auto i0 = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(i0);
            // frac == 0 covers both endpoints exactly and keeps the identity
            // case (L == seg_len) bit-exact.
            frame[j] = frac == 0.0
                           ? s[p0 + i0]
                           : s[p0 + i0] + frac * (s[p0 + i0 + 1] - s[p0 + i0]);
        }
        fs.push_frame(frame, FrameInfo{sig.record_id, p0, SliceMethod::rrif});
    }
    return fs;
}

// Keeps the single range [start_s, start_s + duration_s) of the record; one
// frame per signal, anchored at the range start.
inline FrameSet fixed_slice(const Signal& sig, const FixedSliceConfig& cfg) {
    validate_signal(sig);
    if (!(cfg.start_s >= 0.0))
        throw numeric_error("start_s must be non-negative");
    if (!(cfg.duration_s > 0.0))
        throw numeric_error("duration_s must be positive");

    const std::size_t n = sig.samples.size();
    const long long start = detail::samples_from_seconds(cfg.start_s, sig.sampling_rate_hz);
    const long long count = detail::samples_from_seconds(cfg.duration_s, sig.sampling_rate_hz);
    if (count < 1)
        throw numeric_error("duration of " + std::to_string(cfg.duration_s) +
                            " s rounds to zero samples at " +
                            std::to_string(sig.sampling_rate_hz) + " Hz");
    if (static_cast<unsigned long long>(start) + static_cast<unsigned long long>(count) > n)
        throw numeric_error("slice range [" + std::to_string(start) + ", " +
                            std::to_string(start + count) + ") exceeds signal length " +
                            std::to_string(n));

    FrameSet fs(static_cast<std::size_t>(count));
    fs.push_frame(std::span<const double>(sig.samples.data() + start,
                                          static_cast<std::size_t>(count)),
                  FrameInfo{sig.record_id, static_cast<std::size_t>(start), SliceMethod::fixed});
    return fs;
}

} // namespace compacta
