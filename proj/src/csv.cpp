#include "sirdi/csv.hpp"

#include <cmath>

#include <fmt/core.h>

namespace sirdi::csv {

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string cell(const std::optional<double>& v) { return v ? cell(*v) : std::string(); }

Writer::Writer(std::ostream& os, std::initializer_list<std::string_view> header) : os_(os) {
  bool first = true;
  for (auto h : header) {
    os_ << (first ? "" : ",") << h;
    first = false;
  }
  os_ << '\n';
}

}  // namespace sirdi::csv
