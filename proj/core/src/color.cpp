#include "typeprobe/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

double linearize(std::uint8_t channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

}  // namespace

double relative_luminance(RgbColor c) {
  return 0.2126 * linearize(c.r) + 0.7152 * linearize(c.g) + 0.0722 * linearize(c.b);
}

double contrast_ratio(RgbColor a, RgbColor b) {
  const double la = relative_luminance(a);
  const double lb = relative_luminance(b);
  return (std::max(la, lb) + 0.05) / (std::min(la, lb) + 0.05);
}

RgbColor select_background(RgbColor text_color, SeededRng& rng) {
  std::vector<RgbColor> valid;
  for (const auto& candidate : kBackgroundPool) {
    if (contrast_ratio(text_color, candidate.rgb) >= kMinContrast) valid.push_back(candidate.rgb);
  }
  if (valid.empty()) {
    // Only reachable for colors outside the palette.
    return relative_luminance(text_color) > 0.18 ? RgbColor{0, 0, 0} : RgbColor{255, 255, 255};
  }
  return rng.pick(valid);
}

double rgb_distance(RgbColor a, RgbColor b) {
  const double dr = double(a.r) - b.r;
  const double dg = double(a.g) - b.g;
  const double db = double(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

std::optional<NamedColor> palette_color(std::string_view name) {
  for (const auto& c : kTextPalette) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

std::optional<NamedColor> palette_color(RgbColor rgb) {
  for (const auto& c : kTextPalette) {
    if (c.rgb == rgb) return c;
  }
  return std::nullopt;
}

const NamedColor& nearest_palette_color(double r, double g, double b) {
  const NamedColor* best = &kTextPalette[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : kTextPalette) {
    const double dr = r - c.rgb.r, dg = g - c.rgb.g, db = b - c.rgb.b;
    const double d = dr * dr + dg * dg + db * db;
    if (d < best_d) {
      best_d = d;
      best = &c;
    }
  }
  return *best;
}

}  // namespace typeprobe
