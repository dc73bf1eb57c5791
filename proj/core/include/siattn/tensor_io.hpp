#pragma once

#include <filesystem>
#include <iosfwd>

#include "siattn/tensor.hpp"

namespace siattn {

// Binary tensor container ("SIAT"): 4-byte magic, then little-endian u32
// version (= 1), u32 ndim, ndim x u64 dims, and the row-major f64 payload.
// Malformed or truncated files raise std::runtime_error.
void write_tensor(const Tensor& tensor, std::ostream& out);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);
Tensor read_tensor(std::istream& in);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace siattn
