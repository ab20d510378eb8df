#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ridematch/features.hpp"

namespace ridematch::io {

/// Shortest representation that parses back to the same double. All file
/// output goes through this so reruns are byte-identical.
std::string format_double(double v);

double parse_double(const std::string& s);

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

/// Trace CSV: header `t,speed,accel,jerk`, one row per sample.
RideTrace read_trace_csv(const std::filesystem::path& path, double sample_rate = 10.0);
void write_trace_csv(const std::filesystem::path& path, const RideTrace& trace);

/// Segment CSV: 21 feature columns named `<signal>_<stat>` in canonical
/// order, plus a trailing `label` column when with_labels is set.
void write_segments_csv(const std::filesystem::path& path,
                        const std::vector<SegmentFeatures>& segments, bool with_labels);
std::vector<SegmentFeatures> read_segments_csv(const std::filesystem::path& path);

/// FNV-1a, used for content-addressed caching of compatibility matrices.
std::uint64_t fnv1a64(const std::string& data, std::uint64_t seed = 14695981039346656037ull);

}  // namespace ridematch::io
