#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "typeprobe/error.hpp"

namespace typeprobe {

class SeededRng;

struct RgbColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  constexpr RgbColor() = default;
  /// Channels are checked against [0, 255]; out-of-range values throw.
  constexpr RgbColor(int red, int green, int blue)
      : r(checked(red)), g(checked(green)), b(checked(blue)) {}

  friend constexpr bool operator==(const RgbColor&, const RgbColor&) = default;

 private:
  static constexpr std::uint8_t checked(int channel) {
    if (channel < 0 || channel > 255) {
      throw Error("color channel out of range [0,255]: " + std::to_string(channel));
    }
    return static_cast<std::uint8_t>(channel);
  }
};

struct NamedColor {
  std::string_view name;
  RgbColor rgb;
};

/// The eight text colors.
inline constexpr std::array<NamedColor, 8> kTextPalette{{
    {"Black", {0, 0, 0}},
    {"Red", {220, 50, 50}},
    {"Blue", {50, 50, 220}},
    {"Green", {50, 150, 50}},
    {"Gray", {128, 128, 128}},
    {"Orange", {230, 130, 30}},
    {"Purple", {150, 50, 180}},
    {"Brown", {140, 90, 40}},
}};

/// Achromatic background candidates. Every palette color has at least one
/// entry at contrast >= 4.5 (checked exhaustively in tests).
inline constexpr std::array<NamedColor, 12> kBackgroundPool{{
    {"white", {255, 255, 255}},
    {"snow", {253, 253, 253}},
    {"paper", {250, 250, 248}},
    {"ivory", {250, 249, 244}},
    {"smoke", {245, 245, 245}},
    {"linen", {244, 243, 240}},
    {"mist", {240, 240, 240}},
    {"silver", {235, 235, 235}},
    {"charcoal", {30, 30, 30}},
    {"coal", {20, 20, 20}},
    {"ink", {10, 10, 10}},
    {"black", {0, 0, 0}},
}};

inline constexpr double kMinContrast = 4.5;

/// WCAG 2.x relative luminance with sRGB gamma expansion, in [0, 1].
double relative_luminance(RgbColor c);

/// (L_hi + 0.05) / (L_lo + 0.05); symmetric, in [1, 21].
double contrast_ratio(RgbColor a, RgbColor b);

/// Uniform draw among pool entries meeting kMinContrast against text_color.
RgbColor select_background(RgbColor text_color, SeededRng& rng);

double rgb_distance(RgbColor a, RgbColor b);

std::optional<NamedColor> palette_color(std::string_view name);
std::optional<NamedColor> palette_color(RgbColor rgb);
/// Palette entry with the smallest Euclidean RGB distance to (r, g, b).
const NamedColor& nearest_palette_color(double r, double g, double b);

}  // namespace typeprobe
