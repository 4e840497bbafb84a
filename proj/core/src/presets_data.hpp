#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace qtrap::detail {

// (file name, JSON text) for every preset under presets/.
const std::vector<std::pair<std::string_view, std::string_view>>& bundled_presets();

}  // namespace qtrap::detail
