#ifndef CWAVE_CSV_HPP
#define CWAVE_CSV_HPP

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace cwave::csv {

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Writes `# text` lines.
inline void comment(std::ostream& out, std::string_view text) { out << "# " << text << '\n'; }

template <typename... Ts>
void row(std::ostream& out, const Ts&... cells) {
  bool first = true;
  const auto put = [&](const auto& c) {
    if (!first) out << ',';
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(c)>>) {
      out << number(c);
    } else {
      out << c;
    }
  };
  (put(cells), ...);
  out << '\n';
}

}  // namespace cwave::csv

#endif  // CWAVE_CSV_HPP
