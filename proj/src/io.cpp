#include "ridematch/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ridematch::io {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("parse_double: bad number '" + s + "'");
    }
    return v;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    return rows;
}

RideTrace read_trace_csv(const std::filesystem::path& path, double sample_rate) {
    const auto rows = read_csv(path);
    if (rows.empty() || rows.front() != std::vector<std::string>{"t", "speed", "accel", "jerk"}) {
        throw std::runtime_error("read_trace_csv: expected header t,speed,accel,jerk in " +
                                 path.string());
    }
    RideTrace trace;
    trace.sample_rate = sample_rate;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 4) {
            throw std::runtime_error("read_trace_csv: bad row in " + path.string());
        }
        trace.t.push_back(parse_double(rows[r][0]));
        trace.speed.push_back(parse_double(rows[r][1]));
        trace.accel.push_back(parse_double(rows[r][2]));
        trace.jerk.push_back(parse_double(rows[r][3]));
    }
    if (trace.t.size() >= 2) {
        const double dt = trace.t[1] - trace.t[0];
        if (dt > 0.0) trace.sample_rate = 1.0 / dt;
    }
    return trace;
}

void write_trace_csv(const std::filesystem::path& path, const RideTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path.string());
    out << "t,speed,accel,jerk\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_double(trace.t[i]) << ',' << format_double(trace.speed[i]) << ','
            << format_double(trace.accel[i]) << ',' << format_double(trace.jerk[i]) << '\n';
    }
}

void write_segments_csv(const std::filesystem::path& path,
                        const std::vector<SegmentFeatures>& segments, bool with_labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_segments_csv: cannot open " + path.string());
    const auto& names = feature_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k) out << ',';
        out << names[k];
    }
    if (with_labels) out << ",label";
    out << '\n';
    for (const auto& seg : segments) {
        if (seg.values.size() != kFeatureCount) {
            throw std::runtime_error("write_segments_csv: segment is not 21-dimensional");
        }
        for (std::size_t k = 0; k < seg.values.size(); ++k) {
            if (k) out << ',';
            out << format_double(seg.values[k]);
        }
        if (with_labels) out << ',' << seg.label;
        out << '\n';
    }
}

std::vector<SegmentFeatures> read_segments_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw std::runtime_error("read_segments_csv: empty file " + path.string());
    const auto& names = feature_names();
    const auto& header = rows.front();
    const bool with_labels = header.size() == kFeatureCount + 1 && header.back() == "label";
    if (header.size() != kFeatureCount + (with_labels ? 1 : 0)) {
        throw std::runtime_error("read_segments_csv: unexpected column count in " + path.string());
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        if (header[k] != names[k]) {
            throw std::runtime_error("read_segments_csv: column " + std::to_string(k) +
                                     " should be " + names[k] + " in " + path.string());
        }
    }
    std::vector<SegmentFeatures> segments;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw std::runtime_error("read_segments_csv: bad row in " + path.string());
        }
        SegmentFeatures seg;
        seg.segment_index = static_cast<std::int64_t>(r) - 1;
        seg.values.reserve(kFeatureCount);
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            seg.values.push_back(parse_double(rows[r][k]));
        }
        if (with_labels) seg.label = std::stoi(rows[r].back());
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::uint64_t fnv1a64(const std::string& data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ridematch::io
