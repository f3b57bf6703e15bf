#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "edgerecon/errors.hpp"

// Little-endian encoding helpers shared by the training-record and
// checkpoint formats.
namespace edgerecon::binary {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  std::uint32_t u32() {
    unsigned char b[4];
    read(b, 4);
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | b[k];
    return v;
  }

  std::uint64_t u64() {
    unsigned char b[8];
    read(b, 8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string string(std::size_t max_len = 1u << 20) {
    const std::uint32_t n = u32();
    if (n > max_len) throw ParseError(path_, 0, "string length " + std::to_string(n) + " is implausible");
    std::string s(n, '\0');
    read(reinterpret_cast<unsigned char*>(s.data()), n);
    return s;
  }

  void expect_magic(const char* magic) {
    char b[4];
    read(reinterpret_cast<unsigned char*>(b), 4);
    if (std::memcmp(b, magic, 4) != 0) {
      throw ParseError(path_, 0, std::string("bad magic, expected '") + magic + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  void read(unsigned char* dst, std::size_t n) {
    is_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw ParseError(path_, 0, "unexpected end of file");
  }

  std::istream& is_;
  std::string path_;
};

}  // namespace edgerecon::binary
