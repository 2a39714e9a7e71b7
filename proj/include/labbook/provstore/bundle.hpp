#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "labbook/provstore/repository.hpp"

namespace labbook::provstore {

inline constexpr int kBundleFormatVersion = 1;

// ZIP archive: manifest.json, HEAD, objects/<2>/<38> (loose bytes verbatim),
// refs/heads/<name>, annotations/<id>. Byte-identical for identical repos.
// Throws Error(integrity_error) if the repository does not verify.
std::string export_bundle_bytes(const Repository& repo);
void export_bundle(const Repository& repo, const std::filesystem::path& bundle);

// Verifies every digest and the resulting repository before returning.
// Errors: corrupt_bundle (checksum/digest/structure), unsupported (manifest
// version or no `main`), already_exists (non-empty destination).
Repository import_bundle_bytes(std::string_view bytes, const std::filesystem::path& dest);
Repository import_bundle(const std::filesystem::path& bundle, const std::filesystem::path& dest);

} // namespace labbook::provstore
