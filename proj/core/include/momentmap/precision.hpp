#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

namespace momentmap {

enum class Precision { binary32, binary64 };

template <class T>
concept Real = std::is_same_v<T, float> || std::is_same_v<T, double>;

template <Real T>
inline constexpr Precision precision_of = std::is_same_v<T, float> ? Precision::binary32
                                                                   : Precision::binary64;

// Unit roundoff u = eps/2 of the active precision.
template <Real T>
constexpr T unit_roundoff() {
  return std::numeric_limits<T>::epsilon() / T(2);
}

inline double unit_roundoff(Precision p) {
  return p == Precision::binary32 ? double(unit_roundoff<float>()) : unit_roundoff<double>();
}

inline std::string_view to_string(Precision p) {
  return p == Precision::binary32 ? "binary32" : "binary64";
}

// Short tag used in difference labels ("32" / "64").
inline std::string_view bits_tag(Precision p) {
  return p == Precision::binary32 ? "32" : "64";
}

inline std::optional<Precision> parse_precision(std::string_view s) {
  if (s == "binary32" || s == "32" || s == "float" || s == "single") return Precision::binary32;
  if (s == "binary64" || s == "64" || s == "double") return Precision::binary64;
  return std::nullopt;
}

// Calls f with a default-constructed value of the scalar type selected by p,
// so runtime precision tags can reach templated kernels.
template <class F>
decltype(auto) dispatch(Precision p, F&& f) {
  if (p == Precision::binary32) return f(float{});
  return f(double{});
}

}  // namespace momentmap
