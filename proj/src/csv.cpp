#include "stathedge/csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "stathedge/errors.hpp"

namespace stathedge::csv {

std::string format(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Table::meta(const std::string& key, double value) { meta_.push_back(key + "=" + format(value)); }

void Table::row(const std::vector<double>& values) {
  require(values.size() == columns_.size(), ErrorKind::InvalidArgument, "csv row width mismatch");
  rows_.push_back(values);
}

std::string Table::str() const {
  std::string out;
  for (const auto& m : meta_) out += "# " + m + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ",";
      out += format(r[i]);
    }
    out += "\n";
  }
  return out;
}

void Table::write(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
  f << str();
}

}  // namespace stathedge::csv
