#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cemkit::csv {

// Minimal CSV held in memory: a header row plus string cells. Fields never
// contain commas in the canonical schema; quoting is not supported.
class Table {
 public:
  static Table read_file(const std::string& path);
  static Table from_string(const std::string& text, const std::string& name);

  const std::string& name() const { return name_; }
  int rows() const { return static_cast<int>(cells_.size()); }
  const std::vector<std::string>& header() const { return header_; }
  bool has_column(const std::string& col) const;

  // Cell accessors throw SchemaError mentioning file, row (1-based data row)
  // and column on any failure.
  const std::string& cell(int row, const std::string& col) const;
  double num(int row, const std::string& col) const;
  int integer(int row, const std::string& col) const;
  // Empty cell -> nullopt.
  std::optional<double> opt_num(int row, const std::string& col) const;

 private:
  int column_index(const std::string& col) const;
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
};

// Shortest round-trip decimal form of a double (std::to_chars); integral
// values print without an exponent or trailing ".0".
std::string format_number(double value);
double parse_number(const std::string& text, const std::string& context);

// Writes rows joined by commas with a trailing newline; creates parents.
void write_file(const std::string& path,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace cemkit::csv
