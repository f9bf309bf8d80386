#include "typeprobe/oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "typeprobe/answer_parser.hpp"
#include "typeprobe/color.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/render.hpp"
#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

constexpr int kReferenceSizePt = 32;

double channel_distance(const std::uint8_t* p, RgbColor bg) {
  const double dr = double(p[0]) - bg.r, dg = double(p[1]) - bg.g, db = double(p[2]) - bg.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

std::size_t option_index(const Question& q, std::string_view label) {
  auto it = std::find(q.options.begin(), q.options.end(), label);
  if (it == q.options.end()) throw Error("oracle answer '" + std::string(label) + "' is not an option of " + q.id);
  return static_cast<std::size_t>(it - q.options.begin());
}

std::size_t nearest_color_option(const Question& q, std::string_view name) {
  auto direct = std::find(q.options.begin(), q.options.end(), name);
  if (direct != q.options.end()) return static_cast<std::size_t>(direct - q.options.begin());
  const auto target = palette_color(name);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    const auto c = palette_color(q.options[i]);
    if (!c || !target) continue;
    const double d = rgb_distance(c->rgb, target->rgb);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

RasterImage render_hypothesis(const SampleHints& h, const std::string& font_id, int size_pt, FontStyle style,
                              const FontRegistry& registry) {
  RenderSpec spec;
  spec.text = h.text;
  spec.font_id = font_id;
  spec.size_pt = size_pt;
  spec.style = style;
  spec.color = h.color;
  spec.background = h.background;
  return render_with_face(spec, resolve_face(registry.at(font_id), style));
}

}  // namespace

std::string_view to_string(OracleMode m) { return m == OracleMode::Blind ? "blind" : "informed"; }

OracleMode parse_oracle_mode(std::string_view text) {
  if (text == "blind") return OracleMode::Blind;
  if (text == "informed") return OracleMode::Informed;
  throw ConfigError("unknown oracle mode '" + std::string(text) + "' (blind, informed)");
}

InkMask extract_ink_mask(const RasterImage& image, RgbColor background, double threshold) {
  const int w = image.width(), h = image.height();
  InkMask mask;
  mask.width = w;
  mask.height = h;
  mask.ink.assign(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = image.row(y);
    for (int x = 0; x < w; ++x) {
      if (channel_distance(row + 3 * x, background) > threshold) mask.ink[static_cast<std::size_t>(y) * w + x] = 1;
    }
  }

  // 8-connected components.
  std::vector<int> label(mask.ink.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.ink.size(); ++start) {
    if (!mask.ink[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (mask.ink[q] && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
    sizes.push_back(count);
  }
  if (sizes.empty()) throw Error("image has no ink (blank against its background)");
  const double largest = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));

  mask.box = {w, h, 0, 0};
  std::size_t kept = 0;
  for (std::size_t i = 0; i < mask.ink.size(); ++i) {
    if (!mask.ink[i]) continue;
    const auto size = static_cast<double>(sizes[static_cast<std::size_t>(label[i])]);
    if (size < 3 && size < 0.02 * largest) {
      mask.ink[i] = 0;
      continue;
    }
    ++kept;
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    mask.box.x0 = std::min(mask.box.x0, x);
    mask.box.y0 = std::min(mask.box.y0, y);
    mask.box.x1 = std::max(mask.box.x1, x + 1);
    mask.box.y1 = std::max(mask.box.y1, y + 1);
  }
  if (kept == 0) throw Error("image has no ink (blank against its background)");
  mask.ink_fraction = static_cast<double>(kept) / static_cast<double>(mask.ink.size());
  return mask;
}

RgbColor estimate_background(const RasterImage& image) {
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
  if (ch[0].empty()) throw Error("cannot estimate background of an empty image");
  std::array<int, 3> m{};
  for (int k = 0; k < 3; ++k) {
    auto mid = ch[k].begin() + static_cast<long>(ch[k].size() / 2);
    std::nth_element(ch[k].begin(), mid, ch[k].end());
    m[k] = *mid;
  }
  return {m[0], m[1], m[2]};
}

std::string classify_color(const RasterImage& image, RgbColor background) {
  const InkMask mask = extract_ink_mask(image, background);
  const int w = mask.width, h = mask.height;
  std::array<double, 3> sum{};
  std::size_t n = 0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      bool interior = true;
      for (int dy = -1; dy <= 1 && interior; ++dy) {
        for (int dx = -1; dx <= 1 && interior; ++dx) interior = mask.at(x + dx, y + dy);
      }
      if (!interior) continue;
      const std::uint8_t* p = image.row(y) + 3 * x;
      for (int k = 0; k < 3; ++k) sum[k] += p[k];
      ++n;
    }
  }
  if (n == 0) {
    // Hairline strokes: no pixel survives erosion, so use the ink pixels
    // closest to full coverage (farthest from the background).
    double max_d = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (mask.at(x, y)) max_d = std::max(max_d, channel_distance(image.row(y) + 3 * x, background));
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* p = image.row(y) + 3 * x;
        if (!mask.at(x, y) || channel_distance(p, background) < 0.85 * max_d) continue;
        for (int k = 0; k < 3; ++k) sum[k] += p[k];
        ++n;
      }
    }
  }
  const double dn = static_cast<double>(n);
  return std::string(nearest_palette_color(sum[0] / dn, sum[1] / dn, sum[2] / dn).name);
}

std::string classify_color_by_mass(const RasterImage& image, const SampleHints& hints,
                                   const FontRegistry& registry) {
  RenderSpec spec;
  spec.text = hints.text;
  spec.font_id = hints.font_id;
  spec.size_pt = hints.size_pt;
  spec.style = hints.style;
  spec.color = RgbColor(255, 255, 255);
  spec.background = RgbColor(0, 0, 0);
  const RasterImage cover = render_with_face(spec, resolve_face(registry.at(hints.font_id), hints.style));
  double coverage = 0;
  for (int y = 0; y < cover.height(); ++y) {
    const std::uint8_t* row = cover.row(y);
    for (int x = 0; x < cover.width(); ++x) coverage += row[3 * x] / 255.0;
  }
  if (coverage <= 0) throw Error("empty coverage render");
  // Same aspect: assume a uniform rescale and correct the area. Rotation
  // keeps pixel scale, so other shapes stay at 1.
  const double aspect_obs = static_cast<double>(image.width()) / image.height();
  const double aspect_ref = static_cast<double>(cover.width()) / cover.height();
  if (std::abs(aspect_obs / aspect_ref - 1) < 0.02) {
    coverage *= static_cast<double>(image.width()) * image.height() /
                (static_cast<double>(cover.width()) * cover.height());
  }
  std::array<double, 3> mass{};
  const RgbColor bg = hints.background;
  for (int y = 0; y < image.height(); ++y) {
    const std::uint8_t* row = image.row(y);
    for (int x = 0; x < image.width(); ++x) {
      mass[0] += row[3 * x] - bg.r;
      mass[1] += row[3 * x + 1] - bg.g;
      mass[2] += row[3 * x + 2] - bg.b;
    }
  }
  auto channel = [&](int k, std::uint8_t base) { return std::clamp(base + mass[k] / coverage, 0.0, 255.0); };
  return std::string(nearest_palette_color(channel(0, bg.r), channel(1, bg.g), channel(2, bg.b)).name);
}

SampleHints hints_from(const Sample& sample) {
  return {sample.spec.text, sample.spec.font_id, sample.spec.size_pt, sample.spec.style,
          sample.spec.color, sample.spec.background};
}

double aligned_distance(const RasterImage& observed, RgbColor observed_bg, const RasterImage& hypothesis,
                        RgbColor hypothesis_bg) {
  const InkBox a = extract_ink_mask(observed, observed_bg).box;
  const InkBox b = extract_ink_mask(hypothesis, hypothesis_bg).box;
  const int w = std::max(a.width(), b.width());
  const int h = std::max(a.height(), b.height());
  auto pixel = [](const RasterImage& img, const InkBox& box, RgbColor bg, int x, int y) -> RgbColor {
    if (x >= box.width() || y >= box.height()) return bg;
    return img.at(box.x0 + x, box.y0 + y);
  };
  double total = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const RgbColor p = pixel(observed, a, observed_bg, x, y);
      const RgbColor q = pixel(hypothesis, b, hypothesis_bg, x, y);
      total += std::abs(p.r - q.r) + std::abs(p.g - q.g) + std::abs(p.b - q.b);
    }
  }
  return total / (3.0 * w * h);
}

int estimate_size(const RasterImage& image, const SampleHints& hints, const FontRegistry& registry,
                  const std::vector<int>& offered_sizes) {
  if (offered_sizes.empty()) throw Error("no size options offered");
  const InkBox observed = extract_ink_mask(image, hints.background).box;
  const RasterImage ref = render_hypothesis(hints, hints.font_id, kReferenceSizePt, hints.style, registry);
  const InkBox reference = extract_ink_mask(ref, hints.background).box;
  const double ratio = static_cast<double>(observed.width() + observed.height()) /
                       static_cast<double>(reference.width() + reference.height());
  const double estimate = kReferenceSizePt * ratio;
  int best = offered_sizes.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int s : offered_sizes) {
    const double d = std::abs(std::log(estimate) - std::log(static_cast<double>(s)));
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

FontStyle classify_style(const RasterImage& image, const SampleHints& hints, const FontRegistry& registry,
                         const std::vector<FontStyle>& candidates) {
  if (candidates.empty()) throw Error("no style candidates");
  FontStyle best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (FontStyle s : candidates) {
    const RasterImage hyp = render_hypothesis(hints, hints.font_id, hints.size_pt, s, registry);
    const double d = aligned_distance(image, hints.background, hyp, hints.background);
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

std::string classify_family(const RasterImage& image, const SampleHints& hints, const FontRegistry& registry,
                            const std::vector<std::string>& candidate_ids) {
  if (candidate_ids.empty()) throw Error("no family candidates");
  std::string best = candidate_ids.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& id : candidate_ids) {
    double d = std::numeric_limits<double>::infinity();
    try {
      const RasterImage hyp = render_hypothesis(hints, id, hints.size_pt, hints.style, registry);
      d = aligned_distance(image, hints.background, hyp, hints.background);
    } catch (const RenderError&) {
      // A face that cannot render the text cannot be the answer.
    }
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

std::size_t answer_question(const Question& question, const Sample& sample, const RasterImage& image,
                            const FontRegistry& registry, OracleMode mode, std::uint64_t seed) {
  if (question.options.empty()) throw Error("question " + question.id + " has no options");
  if (mode == OracleMode::Blind) {
    if (question.property == Property::Color) {
      return nearest_color_option(question, classify_color(image, estimate_background(image)));
    }
    SeededRng rng = SeededRng::for_stream(seed, "oracle-blind/" + question.id, 0);
    return rng.uniform_index(question.options.size());
  }

  const SampleHints hints = hints_from(sample);
  switch (question.property) {
    case Property::Color:
      return nearest_color_option(question, classify_color_by_mass(image, hints, registry));
    case Property::Size: {
      std::vector<int> sizes;
      for (const auto& o : question.options) sizes.push_back(std::stoi(o));
      return option_index(question, size_display_name(estimate_size(image, hints, registry, sizes)));
    }
    case Property::Style: {
      std::vector<FontStyle> styles;
      for (const auto& o : question.options) {
        auto it = std::find_if(kAllStyles.begin(), kAllStyles.end(),
                               [&](FontStyle s) { return style_display_name(s) == o; });
        if (it == kAllStyles.end()) throw Error("unknown style option '" + o + "'");
        styles.push_back(*it);
      }
      return option_index(question, style_display_name(classify_style(image, hints, registry, styles)));
    }
    case Property::Family: {
      std::vector<std::string> ids;
      for (const auto& o : question.options) {
        const FontEntry* e = registry.find_display_name(o);
        if (e == nullptr) throw Error("unknown font option '" + o + "'");
        ids.push_back(e->id);
      }
      const std::string id = classify_family(image, hints, registry, ids);
      return option_index(question, registry.at(id).display_name);
    }
  }
  throw Error("unknown property");
}

RunLog answer_manifest(const std::vector<Question>& questions, const std::vector<Sample>& samples,
                       const std::function<RasterImage(const Sample&)>& load_image,
                       const FontRegistry& registry, OracleMode mode, const std::string& manifest_hash,
                       std::uint64_t seed) {
  std::map<std::string, const Sample*, std::less<>> by_id;
  for (const auto& s : samples) by_id.emplace(s.id, &s);

  RunLog log;
  log.endpoint = "pixel-oracle/" + std::string(to_string(mode));
  log.run_id = "pixel-oracle-" + std::string(to_string(mode));
  log.manifest_hash = manifest_hash;
  log.started = utc_timestamp();

  std::string cached_id;
  RasterImage cached;
  for (const auto& q : questions) {
    AnswerRecord r;
    r.question_id = q.id;
    r.attempts = 1;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto it = by_id.find(q.sample_id);
      if (it == by_id.end()) throw Error("unknown sample " + q.sample_id);
      if (cached_id != q.sample_id) {
        cached = load_image(*it->second);
        cached_id = q.sample_id;
      }
      const std::size_t choice = answer_question(q, *it->second, cached, registry, mode, seed);
      r.raw_response = std::string(1, option_letter(choice));
      r.status = TransportStatus::Ok;
    } catch (const std::exception& ex) {
      r.status = TransportStatus::Failed;
      r.error = ex.what();
      cached_id.clear();
    }
    r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    log.records.push_back(std::move(r));
  }
  log.finished = utc_timestamp();
  return log;
}

}  // namespace typeprobe
