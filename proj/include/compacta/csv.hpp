#pragma once

// CSV ingestion and emission. Conventions shared by every format:
//   - comma field separator, period decimal separator, LF line endings
//   - '#'-prefixed lines are comments, blank lines are skipped
//   - real values are written in shortest round-trip form (std::to_chars),
//     so write -> read reproduces every double bit-exactly
//   - text fields containing commas, quotes, or a leading '#' are quoted
//     RFC-4180 style; line breaks inside fields are not supported

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "compacta/error.hpp"
#include "compacta/types.hpp"

namespace compacta {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool parse_index(std::string_view field, std::size_t& out) {
    field = trim(field);
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

// Splits one line into fields, honoring double-quoted fields with "" escapes.
inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string quote_field(std::string_view s) {
    const bool needs_quoting =
        s.find_first_of(",\"") != std::string_view::npos ||
        (!s.empty() && s.front() == '#');
    if (!needs_quoting) return std::string(s);
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Reads the next content line, skipping comments and blanks and stripping a
// trailing '\r'. `row` tracks the physical 1-based line number for error
// messages. Returns false at end of file.
inline bool next_content_line(std::istream& in, std::string& line, std::size_t& row) {
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        return true;
    }
    return false;
}

inline std::string row_msg(const std::filesystem::path& path, std::size_t row) {
    return path.string() + " row " + std::to_string(row);
}

} // namespace detail

// Reads a waveform from a single-column CSV (value per row) or a two-column
// CSV (time, value). A first row with any non-numeric field is taken as a
// header. The record id is the file stem; the sampling rate is supplied by
// the caller, never inferred from timestamps.
inline Signal read_signal_csv(const std::filesystem::path& path, double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0))
        throw config_error("sampling rate must be positive, got " +
                           detail::format_double(sampling_rate_hz));
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open signal file: " + path.string());

    Signal sig;
    sig.sampling_rate_hz = sampling_rate_hz;
    sig.record_id = path.stem().string();

    std::string line;
    std::size_t row = 0;
    std::size_t columns = 0;
    bool first_content = true;
    while (detail::next_content_line(in, line, row)) {
        auto fields = detail::split_fields(line);
        if (first_content) {
            first_content = false;
            if (fields.size() != 1 && fields.size() != 2)
                throw io_error(detail::row_msg(path, row) + ": expected 1 or 2 columns, found " +
                               std::to_string(fields.size()));
            columns = fields.size();
            bool all_numeric = true;
            double dummy;
            for (const auto& f : fields)
                if (!detail::parse_double(f, dummy)) all_numeric = false;
            if (!all_numeric) continue; // header row
        }
        if (fields.size() != columns)
            throw io_error(detail::row_msg(path, row) + ": expected " + std::to_string(columns) +
                           " columns, found " + std::to_string(fields.size()));
        double value;
        const std::string& cell = fields[columns - 1];
        if (!detail::parse_double(cell, value))
            throw io_error(detail::row_msg(path, row) + ": non-numeric value '" + cell + "'");
        if (!std::isfinite(value))
            throw io_error(detail::row_msg(path, row) + ": non-finite sample value");
        if (columns == 2) {
            double t;
            if (!detail::parse_double(fields[0], t))
                throw io_error(detail::row_msg(path, row) + ": non-numeric time value '" +
                               fields[0] + "'");
        }
        sig.samples.push_back(value);
    }
    if (sig.samples.empty())
        throw io_error(path.string() + ": no samples found");
    return sig;
}

// Reads a plain column of real values (same layout rules as read_signal_csv).
// Used for metric reference values.
inline std::vector<double> read_values_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open values file: " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    bool first_content = true;
    while (detail::next_content_line(in, line, row)) {
        auto fields = detail::split_fields(line);
        if (fields.size() != 1)
            throw io_error(detail::row_msg(path, row) + ": expected a single column, found " +
                           std::to_string(fields.size()));
        double value;
        if (!detail::parse_double(fields[0], value)) {
            if (first_content) {
                first_content = false;
                continue; // header row
            }
            throw io_error(detail::row_msg(path, row) + ": non-numeric value '" + fields[0] + "'");
        }
        first_content = false;
        if (!std::isfinite(value))
            throw io_error(detail::row_msg(path, row) + ": non-finite value");
        values.push_back(value);
    }
    return values;
}

// Emits one row per frame: record_id, anchor_index, method, label, then the
// frame_length sample values. The header always carries the value columns, so
// an empty FrameSet still round-trips its frame_length.
inline void write_frameset_csv(const FrameSet& fs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open output file: " + path.string());
    out << "record_id,anchor_index,method,label";
    for (std::size_t j = 0; j < fs.frame_length(); ++j) out << ",v" << j;
    out << '\n';
    for (std::size_t i = 0; i < fs.frame_count(); ++i) {
        const FrameInfo& info = fs.provenance()[i];
        out << detail::quote_field(info.record_id) << ',' << info.anchor_index << ','
            << method_tag(info.method) << ',' << detail::quote_field(fs.labels()[i]);
        for (double v : fs.frame(i)) out << ',' << detail::format_double(v);
        out << '\n';
    }
    out.flush();
    if (!out)
        throw io_error("failed while writing " + path.string());
}

inline FrameSet read_frameset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open frameset file: " + path.string());
    std::string line;
    std::size_t row = 0;
    if (!detail::next_content_line(in, line, row))
        throw io_error(path.string() + ": missing header row");
    auto header = detail::split_fields(line);
    if (header.size() < 5 || header[0] != "record_id" || header[1] != "anchor_index" ||
        header[2] != "method" || header[3] != "label")
        throw io_error(path.string() + ": not a frameset file (unexpected header)");
    const std::size_t frame_length = header.size() - 4;

    FrameSet fs(frame_length);
    std::vector<double> frame(frame_length);
    while (detail::next_content_line(in, line, row)) {
        auto fields = detail::split_fields(line);
        if (fields.size() != frame_length + 4)
            throw io_error(detail::row_msg(path, row) + ": expected " +
                           std::to_string(frame_length + 4) + " fields, found " +
                           std::to_string(fields.size()));
        FrameInfo info;
        info.record_id = fields[0];
        if (!detail::parse_index(fields[1], info.anchor_index))
            throw io_error(detail::row_msg(path, row) + ": invalid anchor_index '" + fields[1] + "'");
        auto method = method_from_tag(fields[2]);
        if (!method)
            throw io_error(detail::row_msg(path, row) + ": unknown method '" + fields[2] + "'");
        info.method = *method;
        for (std::size_t j = 0; j < frame_length; ++j) {
            if (!detail::parse_double(fields[4 + j], frame[j]))
                throw io_error(detail::row_msg(path, row) + ": non-numeric value '" +
                               fields[4 + j] + "'");
            if (!std::isfinite(frame[j]))
                throw io_error(detail::row_msg(path, row) + ": non-finite frame value");
        }
        fs.push_frame(frame, std::move(info), fields[3]);
    }
    return fs;
}

} // namespace compacta
