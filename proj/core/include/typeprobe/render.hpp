#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "typeprobe/color.hpp"
#include "typeprobe/font_registry.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/types.hpp"

namespace typeprobe {

struct RenderSpec {
  std::string text;
  std::string font_id;
  int size_pt = 24;
  FontStyle style = FontStyle::Regular;
  RgbColor color{0, 0, 0};
  RgbColor background{255, 255, 255};
  int dpi = kRenderDpi;
  int padding_px = kPaddingPx;

  friend bool operator==(const RenderSpec&, const RenderSpec&) = default;
};

/// Throws Error if size_pt is not a benchmark size or contrast < 4.5.
void validate_render_spec(const RenderSpec& spec);

/// Tight ink box of a shaped, rasterized line.
struct TextBox {
  int width_px = 0;
  int height_px = 0;
  /// Distance from the top ink row down to the baseline.
  int baseline_px = 0;
};

/// Slant applied to synthesized italics.
inline constexpr double kFauxItalicDegrees = 12.0;
/// Minimum share of non-space codepoints the face must cover.
inline constexpr double kMinGlyphCoverage = 0.90;

/// True when the file opens as a scalable outline font.
bool is_scalable_font(const std::filesystem::path& path);

/// Shapes and rasterizes one line of text into its tight ink mask.
/// px per pt is dpi / 72. Throws RenderError on empty text, unreadable fonts or
/// glyph coverage below kMinGlyphCoverage.
CoverageMask rasterize_text(const ResolvedFace& face, std::string_view text, double size_pt,
                            int dpi, TextBox* box = nullptr);

TextBox measure_text(const ResolvedFace& face, std::string_view text, double size_pt, int dpi);

/// Renders spec onto a canvas of ink box + 2 * padding. Byte-deterministic.
RasterImage render_sample(const RenderSpec& spec, const FontRegistry& registry);

/// Same, with the face already resolved (the oracle re-renders hypotheses).
RasterImage render_with_face(const RenderSpec& spec, const ResolvedFace& face);

}  // namespace typeprobe
