// SPDX-License-Identifier: Apache-2.0
#include "nbrig/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nbrig {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits one CSV record; supports RFC-4180 quoting with doubled quotes.
std::vector<std::string> split_record(const std::string& path, std::size_t line_no,
                                      const std::string& line) {
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
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) fail(path, line_no, "unterminated quoted field");
  fields.push_back(trim(cur));
  return fields;
}

bool parse_int(const std::string& tok, std::int64_t& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct Record {
  std::size_t line_no;
  std::vector<std::string> fields;
};

// Reads data records, dropping blank lines, a UTF-8 BOM, and an optional
// header row (detected by a non-integer first field on the first record).
std::vector<Record> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_record(path, line_no, line);
    if (first_content) {
      first_content = false;
      std::int64_t probe;
      if (!parse_int(fields[0], probe)) continue;  // header row
    }
    records.push_back({line_no, std::move(fields)});
  }
  if (records.empty()) throw std::runtime_error(path + ": no data rows");
  return records;
}

}  // namespace

CountData ingest_counts(const std::string& path) {
  std::vector<CountCell> cells;
  std::map<std::int64_t, std::size_t> seen;  // count value -> line it came from
  for (const auto& rec : read_records(path)) {
    if (rec.fields.size() != 2)
      fail(path, rec.line_no,
           "expected 2 fields (count,frequency), got " + std::to_string(rec.fields.size()));
    std::int64_t x, n;
    if (!parse_int(rec.fields[0], x))
      fail(path, rec.line_no, "count is not an integer: '" + rec.fields[0] + "'");
    if (!parse_int(rec.fields[1], n))
      fail(path, rec.line_no, "frequency is not an integer: '" + rec.fields[1] + "'");
    if (x < 0) fail(path, rec.line_no, "negative count value");
    if (n < 0) fail(path, rec.line_no, "negative frequency");
    auto [it, inserted] = seen.emplace(x, rec.line_no);
    if (!inserted)
      fail(path, rec.line_no,
           "duplicate count value " + std::to_string(x) + " (first on line " +
               std::to_string(it->second) + ")");
    cells.push_back({x, n});
  }
  return make_count_data(std::move(cells));
}

SeverityPmf load_severity_csv(const std::string& path) {
  std::vector<std::pair<std::int64_t, double>> entries;
  std::map<std::int64_t, std::size_t> seen;
  for (const auto& rec : read_records(path)) {
    if (rec.fields.size() != 2)
      fail(path, rec.line_no,
           "expected 2 fields (severity,mass), got " + std::to_string(rec.fields.size()));
    std::int64_t y;
    double fy;
    if (!parse_int(rec.fields[0], y))
      fail(path, rec.line_no, "severity is not an integer: '" + rec.fields[0] + "'");
    if (!parse_double(rec.fields[1], fy))
      fail(path, rec.line_no, "mass is not a finite number: '" + rec.fields[1] + "'");
    if (y < 1) fail(path, rec.line_no, "severity must be a positive integer");
    if (fy < 0.0) fail(path, rec.line_no, "negative mass");
    auto [it, inserted] = seen.emplace(y, rec.line_no);
    if (!inserted)
      fail(path, rec.line_no,
           "duplicate severity value " + std::to_string(y) + " (first on line " +
               std::to_string(it->second) + ")");
    entries.emplace_back(y, fy);
  }
  return SeverityPmf(entries);
}

}  // namespace nbrig
