#include "labbook/provstore/zip.hpp"

#include <cstdint>
#include <set>

#include "labbook/compress.hpp"
#include "labbook/error.hpp"

namespace labbook::provstore::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kDosDate1980 = (0 << 9) | (1 << 5) | 1;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(Errc::corrupt_bundle, "bundle archive: " + what);
}

struct Cursor {
  std::string_view buf;

  std::uint16_t u16(std::size_t at) const {
    if (at + 2 > buf.size()) corrupt("truncated");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(buf[at]) |
                                      (static_cast<unsigned char>(buf[at + 1]) << 8));
  }
  std::uint32_t u32(std::size_t at) const {
    return static_cast<std::uint32_t>(u16(at)) | (static_cast<std::uint32_t>(u16(at + 2)) << 16);
  }
  std::string_view slice(std::size_t at, std::size_t len) const {
    if (at > buf.size() || len > buf.size() - at) corrupt("truncated");
    return buf.substr(at, len);
  }
};

} // namespace

void Writer::add(std::string name, std::string data) {
  entries_.push_back({std::move(name), std::move(data)});
}

std::string Writer::finish() {
  std::string out;
  std::string central;
  for (const auto& e : entries_) {
    auto offset = static_cast<std::uint32_t>(out.size());
    auto crc = crc32_of(e.data);
    auto size = static_cast<std::uint32_t>(e.data.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 0);   // stored
    put16(out, 0);   // time
    put16(out, kDosDate1980);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(e.name.size()));
    put16(out, 0);
    out += e.name;
    out += e.data;

    put32(central, kCentralSig);
    put16(central, 20); // made by
    put16(central, 20); // needed
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate1980);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, static_cast<std::uint16_t>(e.name.size()));
    put16(central, 0); // extra
    put16(central, 0); // comment
    put16(central, 0); // disk
    put16(central, 0); // internal attrs
    put32(central, 0); // external attrs
    put32(central, offset);
    central += e.name;
  }
  auto central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries_.size()));
  put16(out, static_cast<std::uint16_t>(entries_.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);
  entries_.clear();
  return out;
}

std::vector<Entry> read_archive(std::string_view archive) {
  Cursor cur{archive};
  if (archive.size() < 22) corrupt("too short");

  std::size_t eocd = std::string_view::npos;
  std::size_t lowest = archive.size() > 22 + 65535 ? archive.size() - 22 - 65535 : 0;
  for (std::size_t i = archive.size() - 22 + 1; i-- > lowest;) {
    if (cur.u32(i) == kEndSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) corrupt("end of central directory not found");

  std::size_t count = cur.u16(eocd + 10);
  std::size_t cd_size = cur.u32(eocd + 12);
  std::size_t cd_offset = cur.u32(eocd + 16);
  cur.slice(cd_offset, cd_size);

  std::vector<Entry> out;
  std::set<std::string> names;
  std::size_t pos = cd_offset;
  for (std::size_t n = 0; n < count; ++n) {
    if (cur.u32(pos) != kCentralSig) corrupt("bad central directory record");
    std::uint16_t flags = cur.u16(pos + 8);
    std::uint16_t method = cur.u16(pos + 10);
    std::uint32_t crc = cur.u32(pos + 16);
    std::size_t csize = cur.u32(pos + 20);
    std::size_t usize = cur.u32(pos + 24);
    std::size_t name_len = cur.u16(pos + 28);
    std::size_t extra_len = cur.u16(pos + 30);
    std::size_t comment_len = cur.u16(pos + 32);
    std::size_t local = cur.u32(pos + 42);
    std::string name(cur.slice(pos + 46, name_len));
    pos += 46 + name_len + extra_len + comment_len;

    if (flags & 0x1) corrupt("encrypted entries are not supported");
    if (cur.u32(local) != kLocalSig) corrupt("bad local header for " + name);
    std::size_t data_at = local + 30 + cur.u16(local + 26) + cur.u16(local + 28);
    auto payload = cur.slice(data_at, csize);

    std::string data;
    if (method == 0) {
      if (csize != usize) corrupt("size mismatch for " + name);
      data = std::string(payload);
    } else if (method == 8) {
      try {
        data = raw_inflate(payload, usize);
      } catch (const Error&) {
        corrupt("cannot inflate " + name);
      }
    } else {
      corrupt("unsupported compression method for " + name);
    }
    if (crc32_of(data) != crc) corrupt("CRC mismatch for " + name);
    if (!names.insert(name).second) corrupt("duplicate entry " + name);
    out.push_back(Entry{std::move(name), std::move(data), data_at});
  }
  return out;
}

} // namespace labbook::provstore::zip
