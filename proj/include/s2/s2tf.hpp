#pragma once

#include "s2/tensor.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace s2::s2tf {

// S2TF tensor container, little-endian throughout:
//
//   "S2TF" | u32 version=1 | u32 tensor count N
//   N records: u32 name_len | name bytes (UTF-8) | u32 rank
//              | rank * u64 dims | u32 dtype (0 = f32)
//              | u64 payload_offset (absolute, 4-byte aligned)
//   payload region: raw little-endian f32 data
//
// The canonical encoding produced by write() orders records by name
// (ascending byte order) and packs payloads in the same order, so
// identical tensor maps serialize to identical bytes.

constexpr std::uint32_t kVersion = 1;

std::map<std::string, Tensor> read(std::span<const std::byte> bytes);
std::vector<std::byte> write(const std::map<std::string, Tensor>& tensors);

std::map<std::string, Tensor> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors);

} // namespace s2::s2tf
