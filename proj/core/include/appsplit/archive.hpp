#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace appsplit {

using Bytes = std::vector<std::uint8_t>;

/// One named entry of a deflate container. Entry contents are deflated
/// individually; the surrounding index is plain little-endian binary.
struct ArchiveEntry {
  std::string name;
  Bytes data;
};

/// Serializes entries under a 4-byte magic. Entries are sorted by name before
/// writing, so equal inputs always produce identical bytes.
Bytes write_archive(const std::string& magic, std::vector<ArchiveEntry> entries);

/// Parses a container previously written with `write_archive`. Throws
/// MalformedArchive on a magic mismatch, truncation, or corrupt payload.
std::vector<ArchiveEntry> read_archive(const std::string& magic, const Bytes& bytes);

/// Returns the entry named `name` or throws MalformedArchive.
const ArchiveEntry& find_entry(const std::vector<ArchiveEntry>& entries,
                               const std::string& name);

}  // namespace appsplit
