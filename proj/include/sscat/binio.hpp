#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "sscat/errors.hpp"

namespace sscat::binio {

// Little-endian primitives for the SSCR/SSCW/SSCL container formats.

template <typename U>
inline void write_uint(std::ostream& os, U v) {
    unsigned char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
inline U read_uint(std::istream& is) {
    unsigned char buf[sizeof(U)];
    is.read(reinterpret_cast<char*>(buf), sizeof(U));
    if (!is) throw ParseError("unexpected end of binary stream");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

inline void write_f32(std::ostream& os, float v) { write_uint<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v)); }
inline void write_f64(std::ostream& os, double v) { write_uint<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v)); }
inline float read_f32(std::istream& is) { return std::bit_cast<float>(read_uint<std::uint32_t>(is)); }
inline double read_f64(std::istream& is) { return std::bit_cast<double>(read_uint<std::uint64_t>(is)); }

inline void write_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char (&magic)[5], const std::string& what) {
    char buf[4];
    is.read(buf, 4);
    if (!is || std::memcmp(buf, magic, 4) != 0) throw ParseError("bad magic, not a " + what + " file");
}

}  // namespace sscat::binio
