#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "webcas/error.hpp"

namespace webcas::exchange {

struct ZipEntry {
    std::string name;
    std::string data;
};

class ZipError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct ZipLimits {
    std::size_t max_entries = 4096;
    std::size_t max_total_bytes = std::size_t{512} << 20;
};

/// Deflated entries in the given order, fixed 1980-01-01 timestamps, UTF-8
/// names. Same input, same bytes.
std::string write_zip(const std::vector<ZipEntry>& entries);

/// Reads via the central directory. Accepts stored and deflated entries;
/// rejects encryption, ZIP64, CRC/size mismatches and archives beyond
/// `limits`. Names are returned verbatim (no path interpretation).
std::vector<ZipEntry> read_zip(std::string_view bytes, const ZipLimits& limits = {});

}  // namespace webcas::exchange
