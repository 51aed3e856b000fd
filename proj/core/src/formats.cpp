// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nalm/formats.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "nalm/error.hpp"

namespace nalm {
namespace {

struct Column {
  std::string name;
  std::string type;
  bool partial = false;
};

struct Header {
  Day day{};
  std::vector<Column> columns;
  std::size_t next = 0;  // offset of the first data row
};

void check_token(std::string_view token, std::string_view what) {
  if (token.empty() || token.find_first_of(" \t\r\n,") != std::string_view::npos) {
    throw StructuralError(fmt::format(
        "{} '{}' must be non-empty without whitespace or commas", what, token));
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0;;) {
    const auto at = line.find(sep, pos);
    out.push_back(line.substr(pos, at - pos));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

class Lines {
 public:
  explicit Lines(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    line = text_.substr(pos_, nl - pos_);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number_;
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

Header read_header(Lines& lines, std::string_view kind) {
  Header h;
  std::string_view line;
  if (!lines.next(line) || line != fmt::format("# {} 1", kind)) {
    throw ParseError(fmt::format("expected '# {} 1' header", kind));
  }
  if (!lines.next(line) || !line.starts_with("# day ")) {
    throw ParseError("expected '# day YYYY-MM-DD'");
  }
  h.day = parse_day(line.substr(6));
  while (lines.next(line)) {
    if (!line.starts_with("# column ")) break;
    const auto fields = split(line.substr(9), ' ');
    Column c;
    if (kind == "nalm-traces") {
      if (fields.size() != 3 || (fields[2] != "full" && fields[2] != "partial")) {
        throw ParseError(fmt::format("line {}: bad column declaration", lines.number()));
      }
      c.partial = fields[2] == "partial";
    } else if (fields.size() != 2) {
      throw ParseError(fmt::format("line {}: bad column declaration", lines.number()));
    }
    c.name = std::string(fields[0]);
    c.type = std::string(fields[1]);
    h.columns.push_back(std::move(c));
  }
  if (h.columns.empty()) throw ParseError("no columns declared");
  std::string expected = "second";
  for (const auto& c : h.columns) expected += "," + c.name;
  if (line != expected) {
    throw ParseError(fmt::format("line {}: expected header row '{}'", lines.number(), expected));
  }
  return h;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(fmt::format("line {}: bad number '{}'", line_no, field));
  }
  return value;
}

// Reads the data rows; `cell` consumes (column, field, line number).
template <typename Cell>
std::size_t read_rows(Lines& lines, std::size_t columns, Cell&& cell) {
  std::string_view line;
  std::size_t row = 0;
  while (lines.next(line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != columns + 1) {
      throw ParseError(fmt::format("line {}: expected {} fields", lines.number(), columns + 1));
    }
    if (parse_number<std::size_t>(fields[0], lines.number()) != row) {
      throw ParseError(fmt::format("line {}: expected second {}", lines.number(), row));
    }
    for (std::size_t c = 0; c < columns; ++c) cell(c, fields[c + 1], lines.number());
    ++row;
  }
  return row;
}

std::string write_columns(std::string_view kind, Day day,
                          const std::vector<Column>& columns, std::size_t rows,
                          const auto& value) {
  std::string out = fmt::format("# {} 1\n# day {}\n", kind, format_day(day));
  for (const auto& c : columns) {
    check_token(c.name, "column name");
    check_token(c.type, "column type");
    if (kind == "nalm-traces") {
      fmt::format_to(std::back_inserter(out), "# column {} {} {}\n", c.name, c.type,
                     c.partial ? "partial" : "full");
    } else {
      fmt::format_to(std::back_inserter(out), "# column {} {}\n", c.name, c.type);
    }
  }
  out += "second";
  for (const auto& c : columns) out += "," + c.name;
  out += '\n';
  for (std::size_t t = 0; t < rows; ++t) {
    fmt::format_to(std::back_inserter(out), "{}", t);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += ',';
      value(out, c, t);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string write_trace_set(const TraceSet& traces) {
  std::vector<Column> columns;
  for (const auto& m : traces.members()) {
    columns.push_back({m.appliance.name, m.appliance.type_tag, m.trace.partial()});
  }
  const auto& members = traces.members();
  return write_columns("nalm-traces", traces.day(), columns, traces.length(),
                       [&](std::string& out, std::size_t c, std::size_t t) {
                         fmt::format_to(std::back_inserter(out), "{}", members[c].trace[t]);
                       });
}

TraceSet read_trace_set(std::string_view text) {
  Lines lines(text);
  const Header h = read_header(lines, "nalm-traces");
  std::vector<std::vector<double>> values(h.columns.size());
  read_rows(lines, h.columns.size(), [&](std::size_t c, std::string_view f, std::size_t n) {
    values[c].push_back(parse_number<double>(f, n));
  });
  TraceSet set(h.day);
  for (std::size_t c = 0; c < h.columns.size(); ++c) {
    try {
      set.insert({h.columns[c].name, h.columns[c].type},
                 PowerTrace(h.day, std::move(values[c]), h.columns[c].name, h.columns[c].partial));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  return set;
}

std::string write_trace(const PowerTrace& trace) {
  const std::vector<Column> columns{{trace.origin(), "aggregate", trace.partial()}};
  return write_columns("nalm-traces", trace.day(), columns, trace.size(),
                       [&](std::string& out, std::size_t, std::size_t t) {
                         fmt::format_to(std::back_inserter(out), "{}", trace[t]);
                       });
}

PowerTrace read_trace(std::string_view text) {
  Lines lines(text);
  const Header h = read_header(lines, "nalm-traces");
  if (h.columns.size() != 1) {
    throw ParseError(fmt::format("expected one trace column, found {}", h.columns.size()));
  }
  std::vector<double> values;
  read_rows(lines, 1, [&](std::size_t, std::string_view f, std::size_t n) {
    values.push_back(parse_number<double>(f, n));
  });
  try {
    return PowerTrace(h.day, std::move(values), h.columns[0].name, h.columns[0].partial);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::string write_mask(const StateMask& mask) {
  std::vector<Column> columns;
  for (const auto& r : mask.rows()) columns.push_back({r.appliance.name, r.appliance.type_tag});
  const auto& rows = mask.rows();
  return write_columns("nalm-mask", mask.day(), columns, mask.length(),
                       [&](std::string& out, std::size_t c, std::size_t t) {
                         out += rows[c].states[t] ? '1' : '0';
                       });
}

StateMask read_mask(std::string_view text) {
  Lines lines(text);
  const Header h = read_header(lines, "nalm-mask");
  std::vector<StateRow> rows(h.columns.size());
  const auto length =
      read_rows(lines, h.columns.size(), [&](std::size_t c, std::string_view f, std::size_t n) {
        if (f != "0" && f != "1") {
          throw ParseError(fmt::format("line {}: mask values are 0 or 1", n));
        }
        rows[c].push_back(f == "1");
      });
  StateMask mask(h.day, length);
  for (std::size_t c = 0; c < h.columns.size(); ++c) {
    mask.insert({h.columns[c].name, h.columns[c].type}, std::move(rows[c]));
  }
  return mask;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw Error(fmt::format("cannot create directory for '{}': {}", path, ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
}

}  // namespace nalm
