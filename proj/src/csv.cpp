#include "csv.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cemkit/common.h"

namespace cemkit::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

Table Table::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("missing or unreadable file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), std::filesystem::path(path).filename().string());
}

Table Table::from_string(const std::string& text, const std::string& name) {
  Table t;
  t.name_ = name;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (first) {
      t.header_ = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header_.size()) {
        throw SchemaError(name + " row " + std::to_string(t.cells_.size() + 1) +
                          ": expected " + std::to_string(t.header_.size()) +
                          " fields, got " + std::to_string(fields.size()));
      }
      t.cells_.push_back(std::move(fields));
    }
  }
  if (first) throw SchemaError(name + ": empty file (no header row)");
  return t;
}

bool Table::has_column(const std::string& col) const {
  for (const auto& h : header_)
    if (h == col) return true;
  return false;
}

int Table::column_index(const std::string& col) const {
  for (size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == col) return static_cast<int>(i);
  throw SchemaError(name_ + ": missing column '" + col + "'");
}

const std::string& Table::cell(int row, const std::string& col) const {
  if (row < 0 || row >= rows())
    throw SchemaError(name_ + ": row " + std::to_string(row + 1) + " out of range");
  return cells_[row][column_index(col)];
}

double Table::num(int row, const std::string& col) const {
  const std::string& s = cell(row, col);
  return parse_number(s, name_ + " row " + std::to_string(row + 1) + " column '" + col + "'");
}

int Table::integer(int row, const std::string& col) const {
  double v = num(row, col);
  int i = static_cast<int>(std::llround(v));
  if (std::abs(v - i) > 1e-9) {
    throw SchemaError(name_ + " row " + std::to_string(row + 1) + " column '" + col +
                      "': expected an integer, got '" + cell(row, col) + "'");
  }
  return i;
}

std::optional<double> Table::opt_num(int row, const std::string& col) const {
  const std::string& s = cell(row, col);
  if (s.empty()) return std::nullopt;
  return num(row, col);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // avoid "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  return s;
}

double parse_number(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw SchemaError(context + ": not a number: '" + text + "'");
  }
  return v;
}

void write_file(const std::string& path,
                const std::vector<std::vector<std::string>>& rows) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cemkit::csv
