#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace zipknn {

using ByteSequence = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace zipknn
