#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amber/aggregation.hpp"
#include "amber/descriptor.hpp"
#include "amber/ordinal_qa.hpp"

namespace amber {

/// A parsed CSV file. `lines[r]` is the 1-based source line of `rows[r]`.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Column index by name; Error(MissingColumn) when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// RFC 4180-style parsing (double-quoted fields, CRLF tolerated, UTF-8 BOM
/// skipped). Blank lines are ignored.
CsvTable parse_csv(std::string_view text);

/// Long-format traces: header `time_s,annotator,attribute,value`. Traces are
/// grouped by (attribute, annotator) in that sort order; values are checked
/// against the scheme's descriptors. Without a scheme every value that parses
/// as a real becomes a real and anything else a level.
std::vector<AnnotationTrace> ingest_traces_text(std::string_view text, const Scheme* scheme);
std::vector<AnnotationTrace> ingest_traces(const std::filesystem::path& path, const Scheme* scheme);

/// Inverse of ingest_traces_text (rows in trace order).
std::string traces_to_csv(const std::vector<AnnotationTrace>& traces);

/// Header `segment_id,start_s,end_s`.
std::vector<Segment> ingest_segments_text(std::string_view text);

/// Locale-independent real parsing; nullopt unless the whole field is a
/// finite number.
std::optional<double> parse_real(std::string_view field);
std::string format_real(double value);

}  // namespace amber
