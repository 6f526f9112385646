#pragma once

namespace lamegap {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "lamegap-csv v1";

}  // namespace lamegap
