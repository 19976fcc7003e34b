#pragma once

#include <string_view>

namespace noisytrees {

/// Three-way comparison outcome. The integer values (-1, 0, +1) are part of
/// the interface: serialized reports and tests rely on them.
enum class Ordering3 : int {
  Less = -1,
  Equal = 0,
  Greater = 1,
};

constexpr int to_int(Ordering3 o) { return static_cast<int>(o); }

constexpr Ordering3 ordering_from_int(int v) {
  return v < 0 ? Ordering3::Less : (v > 0 ? Ordering3::Greater : Ordering3::Equal);
}

/// Ordering of (b, a) given the ordering of (a, b).
constexpr Ordering3 reversed(Ordering3 o) { return ordering_from_int(-to_int(o)); }

constexpr const char* to_string(Ordering3 o) {
  switch (o) {
    case Ordering3::Less: return "less";
    case Ordering3::Equal: return "equal";
    case Ordering3::Greater: return "greater";
  }
  return "?";
}

/// Exact comparison of any type with operator<.
template <typename T>
constexpr Ordering3 compare_values(const T& a, const T& b) {
  if (a < b) return Ordering3::Less;
  if (b < a) return Ordering3::Greater;
  return Ordering3::Equal;
}

inline Ordering3 compare_strings(std::string_view a, std::string_view b) {
  int r = a.compare(b);
  return ordering_from_int(r);
}

/// Default exact comparator functor used by NoisyComparator.
template <typename Key>
struct ExactCompare {
  constexpr Ordering3 operator()(const Key& a, const Key& b) const {
    return compare_values(a, b);
  }
};

}  // namespace noisytrees
