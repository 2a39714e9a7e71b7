#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace labbook {

using Sha1Digest = std::array<std::uint8_t, 20>;

/// Incremental SHA-1 over byte chunks.
class Sha1 {
public:
  Sha1();
  ~Sha1();
  Sha1(const Sha1&) = delete;
  Sha1& operator=(const Sha1&) = delete;

  Sha1& update(std::string_view bytes);
  Sha1Digest finish();

private:
  void* ctx_;
};

Sha1Digest sha1(std::string_view bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<std::string> from_hex(std::string_view hex);

std::string base64_encode(std::string_view bytes);
// Strict: rejects whitespace, bad padding and non-alphabet characters.
std::optional<std::string> base64_decode(std::string_view text);

bool is_valid_utf8(std::string_view text) noexcept;
std::size_t utf8_length(std::string_view text) noexcept;

} // namespace labbook
