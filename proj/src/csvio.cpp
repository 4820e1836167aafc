#include "acoustolab/csvio.hpp"

#include <cstdio>
#include <stdexcept>

namespace acoustolab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_)
    throw std::runtime_error("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != width_)
    throw std::runtime_error("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace acoustolab
