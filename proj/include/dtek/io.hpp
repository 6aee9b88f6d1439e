#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtek/channel_model.hpp"
#include "dtek/evaluation.hpp"

namespace dtek {

// Channel file layout, little-endian:
//   "DTEK1" | u32 R | u32 S | f64 noise_variance | R*S (f64 re, f64 im), row-major
inline constexpr char kChannelMagic[5] = {'D', 'T', 'E', 'K', '1'};

void write_channel(std::ostream& out, const ChannelMatrix& channel);
ChannelMatrix read_channel(std::istream& in);

/// Atomic: the target either keeps its old content or gets the full new one.
void write_channel_file(const std::string& path, const ChannelMatrix& channel);
ChannelMatrix read_channel_file(const std::string& path);

/// Runs `producer` against a temporary file next to `path` and renames it
/// into place on success. On any exception the temporary is removed and the
/// exception propagates.
void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& producer);

/// Shortest round-trip decimal representation ("%.17g").
std::string format_double(double v);

/// One row per summary. Runtimes are left out so reruns are byte-identical;
/// they go to the manifest instead.
std::string sweep_csv(const std::vector<MetricsSummary>& summaries);

/// Methods as rows, (Q, size) pairs as columns. Cells hold seconds, or
/// "memcap" / "skipped".
std::string runtime_table_csv(const RuntimeTable& table);

} // namespace dtek
