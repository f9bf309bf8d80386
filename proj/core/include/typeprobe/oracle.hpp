#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/font_registry.hpp"
#include "typeprobe/mcq.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/run_log.hpp"
#include "typeprobe/sample_generator.hpp"

namespace typeprobe {

/// Blind: image and options only. Informed: image plus the sample metadata
/// except the property being asked about.
enum class OracleMode { Blind, Informed };

std::string_view to_string(OracleMode m);
OracleMode parse_oracle_mode(std::string_view text);

inline constexpr double kInkThreshold = 32.0;

struct InkBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

struct InkMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> ink;  // 0 / 1
  double ink_fraction = 0;
  InkBox box;

  bool at(int x, int y) const {
    return ink[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x)] != 0;
  }
};

/// Pixels farther than `threshold` (RGB distance) from the background.
/// Connected specks smaller than 2% of the largest component (and under 3 px)
/// are dropped. Throws Error when nothing remains.
InkMask extract_ink_mask(const RasterImage& image, RgbColor background,
                         double threshold = kInkThreshold);

/// Per-channel median of the outermost pixel ring.
RgbColor estimate_background(const RasterImage& image);

/// Mean color of the eroded ink interior (falling back to the most saturated
/// ink pixels for hairline strokes), mapped to the nearest palette entry.
std::string classify_color(const RasterImage& image, RgbColor background);

struct SampleHints;

/// Informed variant: ink mass sum(p - bg) over the image divided by the
/// coverage of a clean re-render of the known text. Blur, chroma subsampling
/// and block DCT roughly preserve that mass; interior means do not survive
/// heavy JPEG on thin strokes.
std::string classify_color_by_mass(const RasterImage& image, const SampleHints& hints,
                                   const FontRegistry& registry);

/// Metadata the informed oracle may use. Fields for the queried property are
/// never read.
struct SampleHints {
  std::string text;
  std::string font_id;
  int size_pt = 0;
  FontStyle style = FontStyle::Regular;
  RgbColor color;
  RgbColor background;
};

SampleHints hints_from(const Sample& sample);

/// Mean absolute RGB difference after registering the two ink boxes at their
/// top-left corners; the window is the union of both boxes, filled with the
/// respective backgrounds outside each image's box.
double aligned_distance(const RasterImage& observed, RgbColor observed_bg,
                        const RasterImage& hypothesis, RgbColor hypothesis_bg);

/// Renders at a reference size, scales by the ink extent ratio and snaps to
/// the nearest offered point size (log scale). Returns the chosen size.
int estimate_size(const RasterImage& image, const SampleHints& hints, const FontRegistry& registry,
                  const std::vector<int>& offered_sizes);

/// Hypothesis-renders each candidate style and returns the closest.
FontStyle classify_style(const RasterImage& image, const SampleHints& hints,
                         const FontRegistry& registry, const std::vector<FontStyle>& candidates);

/// Hypothesis-renders each candidate font (ids) and returns the closest id.
std::string classify_family(const RasterImage& image, const SampleHints& hints,
                            const FontRegistry& registry,
                            const std::vector<std::string>& candidate_ids);

/// Answers one question; returns the chosen option index.
std::size_t answer_question(const Question& question, const Sample& sample, const RasterImage& image,
                            const FontRegistry& registry, OracleMode mode, std::uint64_t seed);

/// Answers every question and emits a RunLog in the vlm-client format, model
/// name "pixel-oracle/<mode>". Per-question failures become failed records.
RunLog answer_manifest(const std::vector<Question>& questions, const std::vector<Sample>& samples,
                       const std::function<RasterImage(const Sample&)>& load_image,
                       const FontRegistry& registry, OracleMode mode,
                       const std::string& manifest_hash, std::uint64_t seed = 0);

}  // namespace typeprobe
