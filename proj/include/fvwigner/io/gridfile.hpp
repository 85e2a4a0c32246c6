#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fvwigner/errors.hpp"
#include "fvwigner/grid.hpp"
#include "fvwigner/wigner.hpp"

namespace fvw::io {

/// Binary phase-space snapshot, version 1.
///
///   offset  size  field
///   0       4     magic "FVWG"
///   4       4     version (u32 = 1)
///   8       4     n_p (u32)
///   12      4     n_q (u32)
///   16      8     p_extent (f64)
///   24      8     q_extent (f64)
///   32      ...   4 blocks of n_p*n_q (re, im) f64 pairs, row-major in p,
///                 order W_+^+, W_-^-, W_+^-, W_-^+
///
/// All multi-byte fields are little-endian regardless of host order.
inline constexpr std::array<char, 4> kGridMagic{'F', 'V', 'W', 'G'};
inline constexpr std::uint32_t kGridVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 32;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

inline void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
  return v;
}

inline double get_f64(const std::string& in, std::size_t at) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline std::size_t grid_file_size(std::size_t n_p, std::size_t n_q) { return kGridHeaderBytes + 4 * n_p * n_q * 16; }

inline std::string encode_grid(const WignerComponents& w) {
  const WignerComponents d = to_direct(w);
  const auto& g = d.grid();
  std::string out;
  out.reserve(grid_file_size(g.n_p, g.n_q));
  out.append(kGridMagic.data(), kGridMagic.size());
  detail::put_u32(out, kGridVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(g.n_p));
  detail::put_u32(out, static_cast<std::uint32_t>(g.n_q));
  detail::put_f64(out, g.p_extent);
  detail::put_f64(out, g.q_extent);
  for (const PhaseField* f : {&d.even_plus, &d.even_minus, &d.odd_plus, &d.odd_minus}) {
    for (const auto& v : f->values()) {
      detail::put_f64(out, v.real());
      detail::put_f64(out, v.imag());
    }
  }
  return out;
}

inline WignerComponents decode_grid(const std::string& in) {
  if (in.size() < kGridHeaderBytes) throw FormatError("grid file: truncated header");
  if (std::memcmp(in.data(), kGridMagic.data(), 4) != 0) throw FormatError("grid file: bad magic (expected FVWG)");
  const auto version = detail::get_u32(in, 4);
  if (version != kGridVersion) throw FormatError("grid file: unsupported version " + std::to_string(version));
  const std::size_t n_p = detail::get_u32(in, 8);
  const std::size_t n_q = detail::get_u32(in, 12);
  const double p_ext = detail::get_f64(in, 16);
  const double q_ext = detail::get_f64(in, 24);
  if (in.size() != grid_file_size(n_p, n_q)) {
    std::ostringstream os;
    os << "grid file: payload is " << in.size() - kGridHeaderBytes << " bytes, expected " << 4 * n_p * n_q * 16;
    throw FormatError(os.str());
  }
  PhaseGrid g;
  try {
    g = make_grid(n_p, n_q, p_ext, q_ext);
  } catch (const DomainError& e) {
    throw FormatError(std::string("grid file: ") + e.what());
  }
  WignerComponents w(g);
  std::size_t at = kGridHeaderBytes;
  for (PhaseField* f : {&w.even_plus, &w.even_minus, &w.odd_plus, &w.odd_minus}) {
    for (auto& v : f->values()) {
      v = cplx{detail::get_f64(in, at), detail::get_f64(in, at + 8)};
      at += 16;
    }
  }
  return w;
}

inline void write_grid_file(const std::string& path, const WignerComponents& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string bytes = encode_grid(w);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline WignerComponents read_grid_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace fvw::io
