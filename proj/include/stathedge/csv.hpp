#pragma once

#include <string>
#include <vector>

namespace stathedge::csv {

/// 17 significant digits, '.' decimal, independent of the global locale.
std::string format(double v);

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  /// `key=value` line emitted before the column header.
  void meta(const std::string& key, double value);
  void row(const std::vector<double>& values);
  std::string str() const;
  /// Writes with LF line endings; creates parent directories.
  void write(const std::string& path) const;

 private:
  std::vector<std::string> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace stathedge::csv
