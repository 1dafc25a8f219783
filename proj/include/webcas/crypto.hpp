#pragma once

#include <string>
#include <string_view>

namespace webcas {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Random version-4 UUID in canonical 8-4-4-4-12 lowercase form.
std::string random_uuid();

bool is_uuid(std::string_view text) noexcept;

std::string to_hex(std::string_view bytes);

}  // namespace webcas
