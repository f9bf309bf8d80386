#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "typeprobe/raster.hpp"
#include "typeprobe/sample_generator.hpp"

namespace typeprobe {

/// Additive per-channel Gaussian noise; sigma in 8-bit intensity units.
struct Noise {
  double sigma = 10;
};
/// Gaussian blur; radius is the kernel standard deviation in pixels.
struct Blur {
  double radius = 1;
};
/// Lossy JPEG round trip at libjpeg quality 1-100.
struct Jpeg {
  int quality = 75;
};
/// Bilinear rotation (counter-clockwise degrees) onto an expanded canvas.
struct Rotate {
  double degrees = 5;
};
/// Bicubic resize to round-half-up(factor * size), minimum 1 px.
struct Rescale {
  double factor = 1;
};

using PerturbationKind = std::variant<Noise, Blur, Jpeg, Rotate, Rescale>;

struct PerturbationSpec {
  PerturbationKind kind;
  std::uint64_t seed = 0;

  /// Throws Error on illegal parameters.
  void validate() const;
  /// "noise(sigma=10,seed=0)" style description stored in manifests.
  std::string describe() const;
};

/// Named presets: noise-10, noise-50, blur-1, blur-4, jpeg-75, jpeg-10, rot-5,
/// rot-45, scale-0.25, scale-0.5, scale-1, scale-2.
std::vector<std::string> preset_names();
/// Throws ConfigError listing the valid names (closest first) when unknown.
PerturbationSpec preset(std::string_view name, std::uint64_t seed = 0);

/// Applies one transform. `fill` is the rotation background; when absent the
/// median border color is used.
RasterImage apply(const RasterImage& image, const PerturbationSpec& spec,
                  std::optional<RgbColor> fill = std::nullopt);

/// Mean absolute 4-neighbour Laplacian over the luma channel.
double mean_abs_laplacian(const RasterImage& image);

struct DeriveResult {
  DatasetManifest manifest;
  /// Per-sample I/O failures; those samples are omitted from the manifest.
  std::vector<std::string> failures;
};

/// Re-emits every sample of `source_root` with a perturbed image under
/// `target_root`; labels are copied unchanged. Noise streams are keyed by
/// (spec.seed, seed_index) so output is independent of processing order.
DeriveResult derive_dataset(const DatasetManifest& manifest, const std::filesystem::path& source_root,
                            const PerturbationSpec& spec, const std::filesystem::path& target_root);

}  // namespace typeprobe
