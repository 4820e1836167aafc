#pragma once

// CSV emission with explicit float formatting.  Everything numeric is printed
// with %.17g so files round-trip exactly and reruns diff clean.

#include <fstream>
#include <string>
#include <vector>

namespace acoustolab {

std::string format_double(double v);  // %.17g

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  // Mixed row: strings are written verbatim (no quoting needed for our data).
  void row_mixed(const std::vector<std::string>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace acoustolab
