#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "passval/errors.hpp"

namespace passval {

// FNV-1a, used for cache keys and run manifests.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ull;
    }
    return *this;
  }

  Fnv1a& update_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for hashing: " + path);
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
      update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
    }
    return *this;
  }

  std::uint64_t value() const { return h_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = h_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

inline std::string hash_hex(std::string_view bytes) {
  return Fnv1a().update(bytes).hex();
}

inline std::string hash_file_hex(const std::string& path) {
  return Fnv1a().update_file(path).hex();
}

}  // namespace passval
