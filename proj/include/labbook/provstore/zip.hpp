#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace labbook::provstore::zip {

// Minimal deterministic ZIP writer: stored entries, fixed 1980-01-01
// timestamps, entries in insertion order. No ZIP64.
class Writer {
public:
  void add(std::string name, std::string data);
  std::string finish();

private:
  struct Pending {
    std::string name;
    std::string data;
  };
  std::vector<Pending> entries_;
};

struct Entry {
  std::string name;
  std::string data;
  std::size_t data_offset = 0; // position of the entry payload in the archive
};

// Reads stored and deflated entries; verifies every CRC-32. Throws
// Error(corrupt_bundle) on any structural or checksum problem.
std::vector<Entry> read_archive(std::string_view archive);

} // namespace labbook::provstore::zip
