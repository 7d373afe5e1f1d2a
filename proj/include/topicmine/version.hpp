#pragma once

#include <string_view>

namespace topicmine {

inline constexpr std::string_view kVersion = "1.0.0";
// Bumped whenever an output file layout changes.
inline constexpr int kArtifactFormat = 1;

}  // namespace topicmine
