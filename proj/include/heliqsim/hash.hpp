#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace heliqsim {

/// 64-bit FNV-1a, used for cache keys and provenance stamps.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& add(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g;", value);
    return add(std::string_view(buf));
  }
  Fnv1a& add(std::span<const double> values) {
    for (double v : values) add(v);
    return *this;
  }
  std::uint64_t value() const { return state_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace heliqsim
