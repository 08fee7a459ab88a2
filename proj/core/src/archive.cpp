#include "appsplit/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "appsplit/errors.hpp"

namespace appsplit {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const Bytes& bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  const std::uint8_t* raw(std::size_t n) {
    need(n);
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw MalformedArchive("truncated archive");
  }

  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

Bytes deflate_bytes(const Bytes& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  Bytes out(bound);
  int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw MalformedArchive("deflate failed");
  out.resize(bound);
  return out;
}

Bytes inflate_bytes(const std::uint8_t* data, std::size_t size, std::size_t raw_size) {
  Bytes out(raw_size);
  uLongf dest_len = static_cast<uLongf>(raw_size);
  int rc = uncompress(out.data(), &dest_len, data, static_cast<uLong>(size));
  if (rc != Z_OK || dest_len != raw_size) throw MalformedArchive("corrupt entry payload");
  return out;
}

}  // namespace

Bytes write_archive(const std::string& magic, std::vector<ArchiveEntry> entries) {
  if (magic.size() != 4) throw MalformedArchive("magic must be 4 bytes");
  std::sort(entries.begin(), entries.end(),
            [](const ArchiveEntry& a, const ArchiveEntry& b) { return a.name < b.name; });
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    if (entries[i].name == entries[i + 1].name)
      throw MalformedArchive("duplicate entry name '" + entries[i].name + "'");
  }

  Bytes out;
  out.insert(out.end(), magic.begin(), magic.end());
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const ArchiveEntry& e : entries) {
    if (e.name.empty() || e.name.size() > 0xffff)
      throw MalformedArchive("entry name length out of range");
    put_u16(out, static_cast<std::uint16_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    Bytes packed = deflate_bytes(e.data);
    put_u32(out, static_cast<std::uint32_t>(e.data.size()));
    put_u32(out, static_cast<std::uint32_t>(packed.size()));
    out.insert(out.end(), packed.begin(), packed.end());
  }
  return out;
}

std::vector<ArchiveEntry> read_archive(const std::string& magic, const Bytes& bytes) {
  Reader in(bytes);
  const std::uint8_t* head = in.raw(4);
  if (magic.size() != 4 || std::memcmp(head, magic.data(), 4) != 0)
    throw MalformedArchive("magic mismatch");

  std::uint32_t count = in.u32();
  std::vector<ArchiveEntry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ArchiveEntry e;
    std::uint16_t name_len = in.u16();
    if (name_len == 0) throw MalformedArchive("empty entry name");
    const std::uint8_t* name = in.raw(name_len);
    e.name.assign(reinterpret_cast<const char*>(name), name_len);
    std::uint32_t raw_len = in.u32();
    std::uint32_t comp_len = in.u32();
    const std::uint8_t* payload = in.raw(comp_len);
    e.data = inflate_bytes(payload, comp_len, raw_len);
    entries.push_back(std::move(e));
  }
  if (!in.at_end()) throw MalformedArchive("trailing bytes after last entry");
  return entries;
}

const ArchiveEntry& find_entry(const std::vector<ArchiveEntry>& entries,
                               const std::string& name) {
  for (const ArchiveEntry& e : entries) {
    if (e.name == name) return e;
  }
  throw MalformedArchive("missing archive entry '" + name + "'");
}

}  // namespace appsplit
