#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

#include "slobench/errors.hpp"

namespace slobench {

// The configurable streaming parameters and their legal values. The cross
// product forms the action space of 108 configurations.
inline constexpr std::array<int, 6> kStreamChoices{1, 2, 5, 10, 15, 20};
inline constexpr std::array<int, 3> kResolutionChoices{180, 360, 720};
inline constexpr std::array<int, 6> kFpsChoices{5, 10, 15, 20, 25, 30};
inline constexpr int kNumActions = static_cast<int>(
    kStreamChoices.size() * kResolutionChoices.size() * kFpsChoices.size());

struct StreamConfig {
  int streams = 1;
  int resolution = 180;
  int fps = 5;

  // Lexicographic (streams, resolution, fps); the stable ordering used for
  // action indices and tensor layout.
  auto operator<=>(const StreamConfig&) const = default;
};

namespace detail {
template <std::size_t N>
inline int choice_index(const std::array<int, N>& choices, int value) {
  for (std::size_t i = 0; i < N; ++i)
    if (choices[i] == value) return static_cast<int>(i);
  return -1;
}
}  // namespace detail

inline int streams_axis_index(int streams) { return detail::choice_index(kStreamChoices, streams); }
inline int resolution_axis_index(int resolution) {
  return detail::choice_index(kResolutionChoices, resolution);
}
inline int fps_axis_index(int fps) { return detail::choice_index(kFpsChoices, fps); }

inline bool is_legal(const StreamConfig& c) {
  return streams_axis_index(c.streams) >= 0 && resolution_axis_index(c.resolution) >= 0 &&
         fps_axis_index(c.fps) >= 0;
}

inline int action_index(const StreamConfig& c) {
  const int si = streams_axis_index(c.streams);
  const int ri = resolution_axis_index(c.resolution);
  const int fi = fps_axis_index(c.fps);
  if (si < 0 || ri < 0 || fi < 0)
    throw std::domain_error("configuration outside the action space");
  return (si * static_cast<int>(kResolutionChoices.size()) + ri) *
             static_cast<int>(kFpsChoices.size()) +
         fi;
}

inline int action_index_from_axes(int si, int ri, int fi) {
  return (si * static_cast<int>(kResolutionChoices.size()) + ri) *
             static_cast<int>(kFpsChoices.size()) +
         fi;
}

inline StreamConfig action_config(int index) {
  if (index < 0 || index >= kNumActions)
    throw std::domain_error("action index out of range: " + std::to_string(index));
  const int nf = static_cast<int>(kFpsChoices.size());
  const int nr = static_cast<int>(kResolutionChoices.size());
  const int fi = index % nf;
  const int ri = (index / nf) % nr;
  const int si = index / (nf * nr);
  return {kStreamChoices[si], kResolutionChoices[ri], kFpsChoices[fi]};
}

inline const std::vector<StreamConfig>& enumerate_actions() {
  static const std::vector<StreamConfig> all = [] {
    std::vector<StreamConfig> v;
    v.reserve(kNumActions);
    for (int i = 0; i < kNumActions; ++i) v.push_back(action_config(i));
    return v;
  }();
  return all;
}

// The 8 extreme points of the grid: {1,20} x {180,720} x {5,30}.
inline bool is_corner(const StreamConfig& c) {
  return (c.streams == kStreamChoices.front() || c.streams == kStreamChoices.back()) &&
         (c.resolution == kResolutionChoices.front() || c.resolution == kResolutionChoices.back()) &&
         (c.fps == kFpsChoices.front() || c.fps == kFpsChoices.back());
}

inline const std::array<int, 8>& corner_action_indices() {
  static const std::array<int, 8> corners = [] {
    std::array<int, 8> out{};
    int k = 0;
    for (int i = 0; i < kNumActions; ++i)
      if (is_corner(action_config(i))) out[k++] = i;
    return out;
  }();
  return corners;
}

inline std::string config_to_string(const StreamConfig& c) {
  return std::to_string(c.streams) + "x" + std::to_string(c.resolution) + "@" +
         std::to_string(c.fps);
}

}  // namespace slobench
