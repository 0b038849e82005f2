#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace babagrid {

// Read a whole file; throws Error(IoError).
std::string read_file(const std::filesystem::path& path);

// Write via a sibling temp file and rename, so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace babagrid
