#pragma once

#include <cstdint>
#include <string>

#include "core/errors.hpp"

namespace minplan {

// Overflow-checked unsigned 128-bit integer, just wide enough for the planner
// budget certificates (which leave the 64-bit range around depth 40 for three
// modes). Arithmetic that would leave 128 bits raises errc::integer_overflow
// instead of wrapping.
class WideUint {
 public:
  WideUint() = default;
  explicit WideUint(std::uint64_t v) : v_(v) {}

  // 1 + base + base^2 + ... + base^(terms-1), evaluated by Horner steps so each
  // partial result is overflow-checked.
  static WideUint geometric_sum(std::uint64_t base, int terms) {
    if (base < 2 || terms < 1) {
      fail(errc::invalid_argument, "geometric_sum: base must be >= 2 and terms >= 1");
    }
    WideUint r(1);
    for (int i = 1; i < terms; ++i) {
      r = r.mul_add(base, 1);
    }
    return r;
  }

  WideUint mul_add(std::uint64_t m, std::uint64_t a) const {
    constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
    if (m != 0 && v_ > (kMax - a) / m) {
      fail(errc::integer_overflow, "wide integer overflow: value exceeds 128 bits");
    }
    WideUint r;
    r.v_ = v_ * m + a;
    return r;
  }

  bool fits_int64() const { return v_ <= static_cast<unsigned __int128>(INT64_MAX); }

  std::int64_t as_int64() const {
    if (!fits_int64()) {
      fail(errc::integer_overflow,
           "budget " + str() + " does not fit a 64-bit integer and cannot be run directly");
    }
    return static_cast<std::int64_t>(v_);
  }

  std::string str() const {
    if (v_ == 0) return "0";
    unsigned __int128 v = v_;
    std::string out;
    while (v != 0) {
      out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return {out.rbegin(), out.rend()};
  }

  friend bool operator==(const WideUint& a, const WideUint& b) { return a.v_ == b.v_; }
  friend bool operator<=(const WideUint& a, const WideUint& b) { return a.v_ <= b.v_; }
  friend bool operator<(const WideUint& a, const WideUint& b) { return a.v_ < b.v_; }

 private:
  unsigned __int128 v_ = 0;
};

}  // namespace minplan
