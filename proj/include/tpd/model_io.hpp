#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tpd/pipeline.hpp"

namespace tpd {

/// Model file layout (all integers little-endian):
///
///   "TPDMODEL"             8-byte magic
///   u32 version            kModelFormatVersion
///   u64 payload length
///   payload:
///     u64 metadata length, metadata as JSON (schema, normalisation,
///       thresholds, bands, run config)
///     per fitted dimension (discrete branch first, then continuous):
///       u64 n, f64 skewness, n x f64 sorted training values
///   u32 CRC-32 of the payload
///
/// Doubles are stored as raw IEEE-754 bits, so a loaded model reproduces the
/// saved model's predictions exactly.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const TpdModel& model);

/// Throws CorruptModel on a bad magic, version, length or checksum.
TpdModel deserialize_model(const std::string& bytes);

void save_model(const TpdModel& model, const std::filesystem::path& path);
TpdModel load_model(const std::filesystem::path& path);

}  // namespace tpd
