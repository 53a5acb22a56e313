#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>

namespace promind::detail {

// Shortest round-trip decimal form, locale independent. All file output goes
// through these so repeated runs are byte identical.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int v) {
  char buf[16];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& cell, const char* what) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + cell + "'");
  }
  return value;
}

// Deterministic uniform helpers on top of the standard engine. Avoids the
// distribution classes, whose outputs are not pinned across library versions.
struct DetRng {
  std::mt19937_64 eng;

  explicit DetRng(std::uint64_t seed) : eng(seed) {}

  double u01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    const int n = hi - lo + 1;
    int k = static_cast<int>(u01() * n);
    if (k >= n) k = n - 1;
    return lo + k;
  }
};

}  // namespace promind::detail
