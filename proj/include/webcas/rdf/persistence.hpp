#pragma once

#include <filesystem>

#include "webcas/rdf/store.hpp"

namespace webcas::rdf {

/// Writes `index.ttl` plus one `g_<n>.ttl` per named graph. Every file is
/// written to a temporary name and renamed into place; graph files no longer
/// referenced by the new index are removed afterwards.
void save_store(const QuadStore& store, const std::filesystem::path& directory);

/// Inverse of save_store. Throws IoError / ParseError naming the offending
/// file or graph.
QuadStore load_store(const std::filesystem::path& directory);

/// Atomic single-file write (temp file + rename) shared by other modules.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace webcas::rdf
