#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

/// Minimal CSV output: comma-delimited, header row, LF endings, floats at 17
/// significant digits so values round-trip exactly.
namespace sirdi::csv {

std::string cell(double v);
std::string cell(const std::optional<double>& v);
template <class I>
  requires(std::is_integral_v<I> && !std::is_same_v<I, bool> && !std::is_same_v<I, char>)
std::string cell(I v) {
  return std::to_string(v);
}
inline std::string cell(std::string_view v) { return std::string(v); }
inline std::string cell(const char* v) { return std::string(v); }

class Writer {
 public:
  Writer(std::ostream& os, std::initializer_list<std::string_view> header);

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(values), first = false), ...);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

}  // namespace sirdi::csv
