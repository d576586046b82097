#pragma once

#include <cstddef>
#include <string_view>

namespace logiscan {

/// Default token estimate: ceil(bytes / 4).
constexpr std::size_t estimate_tokens(std::string_view text) noexcept
{
    return (text.size() + 3) / 4;
}

} // namespace logiscan
