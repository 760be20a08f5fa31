#pragma once

namespace qdepol {

inline constexpr const char* version_string = "qdepol 0.1.0";

}  // namespace qdepol
