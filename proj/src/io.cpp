#include "ndtv/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ndtv/errors.hpp"

namespace ndtv {
namespace {

constexpr char kMagic[4] = {'N', 'D', 'C', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kTagSignal = 0;
constexpr std::uint8_t kTagHaar = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw FormatError("NDCS: truncated header");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  auto u = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  os.write(b, 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw FormatError("NDCS: truncated payload");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("NDCS: cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("NDCS: cannot open for reading: " + path.string());
  return is;
}

void write_header(std::ostream& os, std::uint32_t d, std::uint32_t n) {
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, d);
  put_u32(os, n);
}

struct Header {
  std::uint32_t d = 0, n = 0;
};

Header read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("NDCS: bad magic in " + path.string());
  const auto version = get_u32(is);
  if (version != kVersion)
    throw FormatError("NDCS: unsupported version " + std::to_string(version));
  Header h;
  h.d = get_u32(is);
  h.n = get_u32(is);
  return h;
}

void write_values(std::ostream& os, const std::vector<cxd>& v, bool complex_payload) {
  for (const auto& z : v) {
    put_f64(os, z.real());
    if (complex_payload) put_f64(os, z.imag());
  }
}

std::vector<cxd> read_values(std::istream& is, std::size_t count, bool complex_payload) {
  std::vector<cxd> v(count);
  for (auto& z : v) {
    const double re = get_f64(is);
    const double im = complex_payload ? get_f64(is) : 0.0;
    z = {re, im};
  }
  return v;
}

std::uint8_t read_flag(std::istream& is) {
  char c;
  is.read(&c, 1);
  if (!is) throw FormatError("NDCS: truncated header (flag byte)");
  return static_cast<std::uint8_t>(c);
}

}  // namespace

void write_signal_ndcs(const std::filesystem::path& path, const NdSignal& x) {
  auto os = open_out(path);
  write_header(os, static_cast<std::uint32_t>(x.dim()), static_cast<std::uint32_t>(x.side()));
  const std::uint8_t flag = 1;  // complex payload, signal tag
  os.put(static_cast<char>(flag));
  write_values(os, x.values(), true);
}

NdSignal read_signal_ndcs(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = read_header(is, path);
  const auto flag = read_flag(is);
  if ((flag >> 1) != kTagSignal)
    throw FormatError("NDCS: " + path.string() + " holds a coefficient payload, not a signal");
  NdSignal x(h.d, h.n);
  x.values() = read_values(is, x.size(), flag & 1);
  return x;
}

void write_field_ndcs(const std::filesystem::path& path, const MixedField& g) {
  auto os = open_out(path);
  write_header(os, static_cast<std::uint32_t>(g.dim()), static_cast<std::uint32_t>(g.side()));
  put_u32(os, static_cast<std::uint32_t>(g.channels()));
  os.put(static_cast<char>(1));
  write_values(os, g.values(), true);
}

MixedField read_field_ndcs(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = read_header(is, path);
  const auto channels = get_u32(is);
  const auto flag = read_flag(is);
  MixedField g(h.d, h.n, channels);
  g.values() = read_values(is, g.size(), flag & 1);
  return g;
}

void write_haar_ndcs(const std::filesystem::path& path, std::size_t d, std::size_t n,
                     const std::vector<cxd>& coeffs) {
  auto os = open_out(path);
  write_header(os, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(n));
  const std::uint8_t flag = static_cast<std::uint8_t>((kTagHaar << 1) | 1);
  os.put(static_cast<char>(flag));
  write_values(os, coeffs, true);
}

HaarPayload read_haar_ndcs(const std::filesystem::path& path) {
  auto is = open_in(path);
  const auto h = read_header(is, path);
  const auto flag = read_flag(is);
  if ((flag >> 1) != kTagHaar)
    throw FormatError("NDCS: " + path.string() + " holds a signal payload, not coefficients");
  HaarPayload p;
  p.d = h.d;
  p.n = h.n;
  std::size_t count = 1;
  for (std::size_t a = 0; a < p.d; ++a) count *= p.n;
  p.coeffs = read_values(is, count, flag & 1);
  return p;
}

void write_vector_ndcs(const std::filesystem::path& path, const std::vector<cxd>& y) {
  NdSignal wrapped(1, y.size(), y);
  write_signal_ndcs(path, wrapped);
}

std::vector<cxd> read_vector_ndcs(const std::filesystem::path& path) {
  auto x = read_signal_ndcs(path);
  if (x.dim() != 1) throw FormatError("NDCS: expected a 1-d vector payload in " + path.string());
  return x.values();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open for writing " + path.string());
  os << text;
}

}  // namespace ndtv
