#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "qmri/ndarray.hpp"

namespace qmri {

enum class DType : std::uint8_t { float64 = 0x01, complex128 = 0x02, boolean = 0x03 };

using Tensor = std::variant<RealArray, ComplexArray, BoolArray>;

DType dtype_of(const Tensor& t);
const Shape& shape_of(const Tensor& t);

// QMRT container:
//   "QMRT" | version 0x01 | dtype code | ndim (u8) | extents (u64 LE each) | payload (LE, row-major)
// Complex values are (re, im) float64 pairs; booleans are one byte each.
inline constexpr std::uint8_t kQmrtVersion = 0x01;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

// Typed readers; a dtype mismatch is a FormatError naming the file.
RealArray read_real(const std::filesystem::path& path);
ComplexArray read_complex(const std::filesystem::path& path);
BoolArray read_bool(const std::filesystem::path& path);

}  // namespace qmri
