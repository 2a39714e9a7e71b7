#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "labbook/provstore/objects.hpp"

namespace labbook::provstore {

// On-disk encoding of a loose object: zlib("<kind> <len>\0" + content).
std::string encode_loose_object(ObjectKind kind, std::string_view content);

struct LooseObject {
  ObjectKind kind;
  std::string content;
};

// Throws Error(integrity_error) if the stream or header is malformed.
LooseObject decode_loose_object(std::string_view compressed);

// <repo>/objects/<2-hex>/<38-hex>
std::filesystem::path loose_object_path(const std::filesystem::path& repo, const ObjectId& id);

} // namespace labbook::provstore
