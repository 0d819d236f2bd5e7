#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "core/error.hpp"

// Little-endian primitive IO shared by the on-disk formats. Offsets are
// tracked by the callers so format errors can report byte positions.
namespace isleflow::binio {

inline std::uint64_t byteswap64(std::uint64_t v) {
  v = ((v & 0x00000000ffffffffULL) << 32) | (v >> 32);
  v = ((v & 0x0000ffff0000ffffULL) << 16) | ((v >> 16) & 0x0000ffff0000ffffULL);
  v = ((v & 0x00ff00ff00ff00ffULL) << 8) | ((v >> 8) & 0x00ff00ff00ff00ffULL);
  return v;
}

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return byteswap64(v);
  return v;
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  const std::uint64_t le = to_le(v);
  out.write(reinterpret_cast<const char*>(&le), 8);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline std::uint64_t get_u64(std::istream& in, const std::string& path,
                             std::uint64_t offset, const char* what) {
  std::uint64_t le = 0;
  in.read(reinterpret_cast<char*>(&le), 8);
  if (in.gcount() != 8) {
    throw Error(ErrorCode::Format, path + ": truncated while reading " + what +
                                       " at byte offset " +
                                       std::to_string(offset));
  }
  return to_le(le);
}

inline double get_f64(std::istream& in, const std::string& path,
                      std::uint64_t offset, const char* what) {
  const std::uint64_t bits = get_u64(in, path, offset, what);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace isleflow::binio
