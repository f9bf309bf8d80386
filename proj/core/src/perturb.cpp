#include "typeprobe/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "typeprobe/error.hpp"
#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};

std::uint8_t clamp_round(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RgbColor border_median(const RasterImage& image) {
  std::array<std::vector<std::uint8_t>, 3> ch;
  auto add = [&](int x, int y) {
    const RgbColor c = image.at(x, y);
    ch[0].push_back(c.r);
    ch[1].push_back(c.g);
    ch[2].push_back(c.b);
  };
  for (int x = 0; x < image.width(); ++x) {
    add(x, 0);
    if (image.height() > 1) add(x, image.height() - 1);
  }
  for (int y = 1; y + 1 < image.height(); ++y) {
    add(0, y);
    if (image.width() > 1) add(image.width() - 1, y);
  }
  std::array<int, 3> m{};
  for (int k = 0; k < 3; ++k) {
    auto mid = ch[k].begin() + static_cast<long>(ch[k].size() / 2);
    std::nth_element(ch[k].begin(), mid, ch[k].end());
    m[k] = *mid;
  }
  return {m[0], m[1], m[2]};
}

RasterImage apply_noise(const RasterImage& in, double sigma, std::uint64_t seed) {
  RasterImage out = in;
  if (sigma == 0) return out;
  SeededRng rng(seed);
  for (auto& v : out.bytes()) v = clamp_round(v + sigma * rng.normal());
  return out;
}

RasterImage apply_blur(const RasterImage& in, double sigma) {
  if (sigma == 0) return in;
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    kernel[static_cast<std::size_t>(i + half)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[static_cast<std::size_t>(i + half)];
  }
  for (auto& k : kernel) k /= sum;

  const int w = in.width(), h = in.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.row(y);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int i = -half; i <= half; ++i) {
          const int xx = std::clamp(x + i, 0, w - 1);
          acc += kernel[static_cast<std::size_t>(i + half)] * row[3 * xx + c];
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  RasterImage out(w, h);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* row = out.row(y);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int i = -half; i <= half; ++i) {
          const int yy = std::clamp(y + i, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(i + half)] *
                 tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
        }
        row[3 * x + c] = clamp_round(acc);
      }
    }
  }
  return out;
}

RasterImage apply_rotate(const RasterImage& in, double degrees, RgbColor fill) {
  const double t = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(t), sn = std::sin(t);
  const int w = in.width(), h = in.height();
  // Tolerance keeps multiples of 90 degrees from growing a pixel.
  const int ow = std::max(1, static_cast<int>(std::ceil(std::abs(w * cs) + std::abs(h * sn) - 1e-6)));
  const int oh = std::max(1, static_cast<int>(std::ceil(std::abs(w * sn) + std::abs(h * cs) - 1e-6)));
  const double icx = (w - 1) / 2.0, icy = (h - 1) / 2.0;
  const double ocx = (ow - 1) / 2.0, ocy = (oh - 1) / 2.0;

  auto sample = [&](int x, int y, int c) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) {
      return c == 0 ? fill.r : (c == 1 ? fill.g : fill.b);
    }
    return in.row(y)[3 * x + c];
  };

  RasterImage out(ow, oh, fill);
  for (int y = 0; y < oh; ++y) {
    std::uint8_t* row = out.row(y);
    for (int x = 0; x < ow; ++x) {
      // Inverse map; counter-clockwise as displayed (y axis points down).
      const double dx = x - ocx, dy = y - ocy;
      const double sx = dx * cs - dy * sn + icx;
      const double sy = dx * sn + dy * cs + icy;
      if (sx <= -1 || sy <= -1 || sx >= w || sy >= h) continue;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      for (int c = 0; c < 3; ++c) {
        const double top = sample(x0, y0, c) * (1 - fx) + sample(x0 + 1, y0, c) * fx;
        const double bot = sample(x0, y0 + 1, c) * (1 - fx) + sample(x0 + 1, y0 + 1, c) * fx;
        row[3 * x + c] = clamp_round(top * (1 - fy) + bot * fy);
      }
    }
  }
  return out;
}

double keys_cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1) return ((a + 2) * x - (a + 3)) * x * x + 1;
  if (x < 2) return ((a * x - 5 * a) * x + 8 * a) * x - 4 * a;
  return 0;
}

struct Taps {
  int first = 0;
  std::vector<double> weights;
};

// Per-output-index taps along one axis. Downscaling widens the kernel so the
// filter also acts as the anti-alias prefilter.
std::vector<Taps> resample_taps(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double support = scale > 1 ? 2.0 * scale : 2.0;
  const double stretch = scale > 1 ? scale : 1.0;
  std::vector<Taps> taps(static_cast<std::size_t>(out_size));
  for (int o = 0; o < out_size; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(center - support)) + 1;
    const int hi = static_cast<int>(std::ceil(center + support)) - 1;
    Taps& t = taps[static_cast<std::size_t>(o)];
    t.first = lo;
    double sum = 0;
    for (int i = lo; i <= hi; ++i) {
      const double wgt = keys_cubic((i - center) / stretch);
      t.weights.push_back(wgt);
      sum += wgt;
    }
    for (auto& wgt : t.weights) wgt /= sum;
  }
  return taps;
}

RasterImage apply_rescale(const RasterImage& in, double factor) {
  const int w = in.width(), h = in.height();
  const int ow = std::max(1, static_cast<int>(std::floor(factor * w + 0.5)));
  const int oh = std::max(1, static_cast<int>(std::floor(factor * h + 0.5)));
  const auto xt = resample_taps(w, ow);
  const auto yt = resample_taps(h, oh);

  std::vector<double> tmp(static_cast<std::size_t>(ow) * h * 3);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.row(y);
    for (int x = 0; x < ow; ++x) {
      const Taps& t = xt[static_cast<std::size_t>(x)];
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          const int xx = std::clamp(t.first + static_cast<int>(k), 0, w - 1);
          acc += t.weights[k] * row[3 * xx + c];
        }
        tmp[(static_cast<std::size_t>(y) * ow + x) * 3 + c] = acc;
      }
    }
  }
  RasterImage out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const Taps& t = yt[static_cast<std::size_t>(y)];
    std::uint8_t* row = out.row(y);
    for (int x = 0; x < ow; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) {
          const int yy = std::clamp(t.first + static_cast<int>(k), 0, h - 1);
          acc += t.weights[k] * tmp[(static_cast<std::size_t>(yy) * ow + x) * 3 + c];
        }
        row[3 * x + c] = clamp_round(acc);
      }
    }
  }
  return out;
}

struct Preset {
  std::string_view name;
  PerturbationKind kind;
};

const std::array<Preset, 12>& presets() {
  static const std::array<Preset, 12> kPresets{{
      {"noise-10", Noise{10}},
      {"noise-50", Noise{50}},
      {"blur-1", Blur{1}},
      {"blur-4", Blur{4}},
      {"jpeg-75", Jpeg{75}},
      {"jpeg-10", Jpeg{10}},
      {"rot-5", Rotate{5}},
      {"rot-45", Rotate{45}},
      {"scale-0.25", Rescale{0.25}},
      {"scale-0.5", Rescale{0.5}},
      {"scale-1", Rescale{1}},
      {"scale-2", Rescale{2}},
  }};
  return kPresets;
}

}  // namespace

void PerturbationSpec::validate() const {
  std::visit(Overloaded{
                 [](const Noise& n) {
                   if (!std::isfinite(n.sigma) || n.sigma < 0) throw Error("noise sigma must be >= 0");
                 },
                 [](const Blur& b) {
                   if (!std::isfinite(b.radius) || b.radius < 0) throw Error("blur radius must be >= 0");
                 },
                 [](const Jpeg& j) {
                   if (j.quality < 1 || j.quality > 100) throw Error("jpeg quality must be in [1, 100]");
                 },
                 [](const Rotate& r) {
                   if (!std::isfinite(r.degrees)) throw Error("rotation angle must be finite");
                 },
                 [](const Rescale& s) {
                   if (!std::isfinite(s.factor) || s.factor <= 0) {
                     throw Error("rescale factor must be positive, got " + fmt(s.factor));
                   }
                 },
             },
             kind);
}

std::string PerturbationSpec::describe() const {
  const std::string s = std::to_string(seed);
  return std::visit(
      Overloaded{
          [&](const Noise& n) { return "noise(sigma=" + fmt(n.sigma) + ",seed=" + s + ")"; },
          [](const Blur& b) { return "blur(radius=" + fmt(b.radius) + ")"; },
          [](const Jpeg& j) { return "jpeg(quality=" + std::to_string(j.quality) + ")"; },
          [](const Rotate& r) { return "rotate(degrees=" + fmt(r.degrees) + ")"; },
          [](const Rescale& r) { return "rescale(factor=" + fmt(r.factor) + ")"; },
      },
      kind);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.emplace_back(p.name);
  return out;
}

PerturbationSpec preset(std::string_view name, std::uint64_t seed) {
  for (const auto& p : presets()) {
    if (p.name == name) return {p.kind, seed};
  }
  auto names = preset_names();
  std::stable_sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    return edit_distance(name, a) < edit_distance(name, b);
  });
  std::string message = "unknown perturbation preset '" + std::string(name) + "'";
  if (edit_distance(name, names.front()) <= 3) message += "; did you mean '" + names.front() + "'?";
  message += " valid presets:";
  for (const auto& n : names) message += " " + n;
  throw ConfigError(message);
}

RasterImage apply(const RasterImage& image, const PerturbationSpec& spec, std::optional<RgbColor> fill) {
  if (image.empty()) throw Error("cannot perturb an empty image");
  spec.validate();
  return std::visit(
      Overloaded{
          [&](const Noise& n) { return apply_noise(image, n.sigma, spec.seed); },
          [&](const Blur& b) { return apply_blur(image, b.radius); },
          [&](const Jpeg& j) { return decode_jpeg(encode_jpeg(image, j.quality)); },
          [&](const Rotate& r) { return apply_rotate(image, r.degrees, fill.value_or(border_median(image))); },
          [&](const Rescale& r) { return apply_rescale(image, r.factor); },
      },
      spec.kind);
}

double mean_abs_laplacian(const RasterImage& image) {
  const int w = image.width(), h = image.height();
  if (w == 0 || h == 0) return 0;
  std::vector<double> luma(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = image.row(y);
    for (int x = 0; x < w; ++x) {
      luma[static_cast<std::size_t>(y) * w + x] = 0.299 * row[3 * x] + 0.587 * row[3 * x + 1] + 0.114 * row[3 * x + 2];
    }
  }
  auto at = [&](int x, int y) {
    return luma[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  double total = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      total += std::abs(4 * at(x, y) - at(x - 1, y) - at(x + 1, y) - at(x, y - 1) - at(x, y + 1));
    }
  }
  return total / (static_cast<double>(w) * h);
}

DeriveResult derive_dataset(const DatasetManifest& manifest, const std::filesystem::path& source_root,
                            const PerturbationSpec& spec, const std::filesystem::path& target_root) {
  spec.validate();
  DeriveResult result;
  result.manifest.master_seed = manifest.master_seed;
  for (const Sample& s : manifest.samples) {
    try {
      PerturbationSpec local = spec;
      local.seed = SeededRng::for_stream(spec.seed, "perturb", s.seed_index).next_u64();
      const RasterImage src = decode_png(read_file_bytes(source_root / s.image_path));
      const RasterImage out = apply(src, local, s.spec.background);
      const auto path = target_root / s.image_path;
      std::filesystem::create_directories(path.parent_path());
      write_file_bytes(path, encode_png(out));
      Sample derived = s;
      derived.perturbation = spec.describe();
      result.manifest.samples.push_back(std::move(derived));
    } catch (const std::exception& ex) {
      result.failures.push_back(s.id + ": " + ex.what());
    }
  }
  return result;
}

}  // namespace typeprobe
