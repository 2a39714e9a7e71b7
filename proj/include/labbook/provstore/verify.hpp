#pragma once

#include <string>
#include <vector>

#include "labbook/provstore/repository.hpp"

namespace labbook::provstore {

struct Finding {
  std::string check;   // e.g. "digest", "tree-order", "parent", "ref"
  std::string subject; // object id, ref name or file
  std::string detail;
};

struct VerifyReport {
  std::vector<Finding> findings;
  std::size_t objects_checked = 0;

  bool ok() const noexcept { return findings.empty(); }
};

// Checks every loose object digest, tree canonical form, commit tree/parent
// existence, the single-root rule, ref and HEAD resolution, and annotation
// records. Problems are reported as findings, never thrown.
VerifyReport verify(const Repository& repo);

} // namespace labbook::provstore
