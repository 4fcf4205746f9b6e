#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace stabletree::lab {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Minimal CSV row writer: fields are separated by commas, no quoting.
class CsvRow {
 public:
  explicit CsvRow(std::ostream& os) : os_(os) {}
  ~CsvRow() { os_ << '\n'; }
  CsvRow(const CsvRow&) = delete;
  CsvRow& operator=(const CsvRow&) = delete;

  CsvRow& operator<<(double x) { return field(format_double(x)); }
  CsvRow& operator<<(std::string_view s) { return field(s); }
  CsvRow& operator<<(const char* s) { return field(s); }
  template <typename I>
    requires std::is_integral_v<I>
  CsvRow& operator<<(I v) {
    return field(std::to_string(v));
  }

 private:
  CsvRow& field(std::string_view s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << s;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

}  // namespace stabletree::lab
