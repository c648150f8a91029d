#pragma once

namespace fluorospec {
inline constexpr const char* kVersion = "0.1.0";
}
