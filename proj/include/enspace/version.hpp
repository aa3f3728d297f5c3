#pragma once

#ifndef ENSPACE_VERSION_STRING
#define ENSPACE_VERSION_STRING "unknown"
#endif

namespace enspace {
inline constexpr const char* kVersion = ENSPACE_VERSION_STRING;
}
