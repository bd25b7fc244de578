#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ndtv/signal.hpp"

namespace ndtv {

// NDCS binary container.
//
// Signal payload (the baseline layout, bit-exact):
//   "NDCS" | u32 version=1 | u32 d | u32 N | u8 flag | N^d float64 values
// All integers and floats little-endian. The flag byte carries the complex
// bit (bit 0: values interleaved re,im when set) and the payload tag in the
// upper bits (0 = signal, 1 = Haar coefficients), so plain real/complex
// signals keep flag = 0/1 exactly.
//
// Gradient/mixed-field payload inserts a u32 channel count after N:
//   "NDCS" | u32 1 | u32 d | u32 N | u32 channels | u8 flag | channels*N^d values
//
// Dense matrices reuse the field layout with d = 1, N = cols,
// channels = rows (values column-major as a consequence of the
// channel-fastest field ordering).

void write_signal_ndcs(const std::filesystem::path& path, const NdSignal& x);
NdSignal read_signal_ndcs(const std::filesystem::path& path);

void write_field_ndcs(const std::filesystem::path& path, const MixedField& g);
MixedField read_field_ndcs(const std::filesystem::path& path);

// Haar coefficients travel as the canonical flat coefficient vector of an
// (d, N) transform; see haar.hpp for the ordering.
void write_haar_ndcs(const std::filesystem::path& path, std::size_t d, std::size_t n,
                     const std::vector<cxd>& coeffs);
struct HaarPayload {
  std::size_t d = 0, n = 0;
  std::vector<cxd> coeffs;
};
HaarPayload read_haar_ndcs(const std::filesystem::path& path);

// Measurement vectors (1-d payloads) reuse the signal layout with d = 1.
void write_vector_ndcs(const std::filesystem::path& path, const std::vector<cxd>& y);
std::vector<cxd> read_vector_ndcs(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ndtv
