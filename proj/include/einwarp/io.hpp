#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace einwarp::io {

/// Decimal with 17 significant digits ("%.17g"); non-finite values as nan/inf.
std::string fmt17(double value);

/// Serializes JSON with every floating-point number printed at 17 significant
/// digits and object keys in sorted order, so equal inputs give equal bytes.
std::string dump(const nlohmann::json& value, int indent = 2);

/// Writes through a temporary sibling file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace einwarp::io
