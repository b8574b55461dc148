#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "amber/error.hpp"
#include "amber/io.hpp"
#include "amber/serialization.hpp"

namespace amber {

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, "missing column '" + std::string(name) + "'", 1);
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  CsvTable table;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_record = [&] {
    const bool blank = fields.empty() && field.empty() && !field_started;
    if (!blank) {
      fields.push_back(std::move(field));
      if (table.header.empty() && table.rows.empty()) {
        table.header = std::move(fields);
      } else {
        if (fields.size() != table.header.size())
          throw Error(ErrorCode::ParseError,
                      "expected " + std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      record_line);
        table.rows.push_back(std::move(fields));
        table.lines.push_back(record_line);
      }
    }
    fields.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw Error(ErrorCode::ParseError, "stray quote inside a field", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field", record_line);
  end_record();
  if (table.header.empty()) throw Error(ErrorCode::ParseError, "empty CSV file", 1);
  return table;
}

std::optional<double> parse_real(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::string format_real(double value) { return Element::value(value).to_string(); }

std::vector<AnnotationTrace> ingest_traces_text(std::string_view text, const Scheme* scheme) {
  const auto table = parse_csv(text);
  const std::size_t c_time = table.column("time_s");
  const std::size_t c_annotator = table.column("annotator");
  const std::size_t c_attribute = table.column("attribute");
  const std::size_t c_value = table.column("value");

  std::map<std::pair<std::string, std::string>, AnnotationTrace> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    const auto time = parse_real(row[c_time]);
    if (!time) throw Error(ErrorCode::ParseError, "time_s '" + row[c_time] + "' is not a finite number", line);
    const std::string& annotator = row[c_annotator];
    const std::string& attribute = row[c_attribute];
    if (annotator.empty()) throw Error(ErrorCode::ParseError, "empty annotator", line);
    if (attribute.empty()) throw Error(ErrorCode::ParseError, "empty attribute", line);

    Element value;
    if (scheme != nullptr) {
      const auto* d = scheme->find(attribute);
      if (d == nullptr)
        throw Error(ErrorCode::DomainMismatch, "attribute '" + attribute + "' is not in scheme '" + scheme->name + "'",
                    line);
      if (d->kind == DescriptorKind::Numerical) {
        const auto v = parse_real(row[c_value]);
        if (!v) throw Error(ErrorCode::ParseError, "value '" + row[c_value] + "' is not a number", line);
        value = Element::value(*v);
      } else {
        value = Element::level(row[c_value]);
      }
      if (!contains(*d, value))
        throw Error(ErrorCode::DomainMismatch, "value '" + row[c_value] + "' is outside descriptor '" + d->name + "'",
                    line);
    } else {
      const auto v = parse_real(row[c_value]);
      value = v ? Element::value(*v) : Element::level(row[c_value]);
    }

    auto [it, inserted] = groups.try_emplace({attribute, annotator});
    auto& trace = it->second;
    if (inserted) {
      trace.annotator = annotator;
      trace.attribute = attribute;
    } else if (!(*time > trace.samples.back().time_s)) {
      throw Error(ErrorCode::ParseError,
                  "times for annotator '" + annotator + "' on '" + attribute + "' must be strictly increasing", line);
    }
    trace.samples.push_back(Sample{*time, std::move(value), line});
  }

  std::vector<AnnotationTrace> out;
  out.reserve(groups.size());
  for (auto& [key, trace] : groups) {
    if (trace.samples.size() >= 2) {
      const double span = trace.samples.back().time_s - trace.samples.front().time_s;
      trace.sample_period_s = std::round(span / static_cast<double>(trace.samples.size() - 1) * 1e9) / 1e9;
    }
    out.push_back(std::move(trace));
  }
  return out;
}

std::vector<AnnotationTrace> ingest_traces(const std::filesystem::path& path, const Scheme* scheme) {
  return ingest_traces_text(read_text_file(path), scheme);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string traces_to_csv(const std::vector<AnnotationTrace>& traces) {
  std::string out = "time_s,annotator,attribute,value\n";
  for (const auto& trace : traces)
    for (const auto& s : trace.samples)
      out += format_real(s.time_s) + "," + csv_field(trace.annotator) + "," + csv_field(trace.attribute) + "," +
             csv_field(s.value.to_string()) + "\n";
  return out;
}

std::vector<Segment> ingest_segments_text(std::string_view text) {
  const auto table = parse_csv(text);
  const std::size_t c_id = table.column("segment_id");
  const std::size_t c_start = table.column("start_s");
  const std::size_t c_end = table.column("end_s");
  std::vector<Segment> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto start = parse_real(row[c_start]);
    const auto end = parse_real(row[c_end]);
    if (!start || !end) throw Error(ErrorCode::ParseError, "segment bounds must be numbers", table.lines[r]);
    if (!(*end > *start)) throw Error(ErrorCode::ParseError, "segment end must exceed start", table.lines[r]);
    out.push_back(Segment{row[c_id], *start, *end});
  }
  if (out.empty()) throw Error(ErrorCode::InsufficientData, "no segments");
  return out;
}

}  // namespace amber
