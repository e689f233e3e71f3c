#pragma once

#include <string>

#include "bifirom/rom_offline.hpp"

namespace bifirom {

// Binary artifact container: magic "BFRM", u32 LE format version (1), a
// length-prefixed UTF-8 metadata block, then named typed sections (f64/u64
// arrays, row-major), finishing with a "crc64" section of per-section
// FNV-1a 64 checksums. Saving the same artifact twice is byte-identical.
inline constexpr std::uint32_t kArtifactVersion = 1;

void save_artifact(const RomArtifact& artifact, const std::string& path);

// Reads, checksums and re-validates the artifact invariants; refuses
// truncated, version-mismatched or corrupted files.
RomArtifact load_artifact(const std::string& path);

}  // namespace bifirom
