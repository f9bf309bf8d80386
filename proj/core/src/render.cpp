#include "typeprobe/render.hpp"

#include <ft2build.h>
#include FT_FREETYPE_H
#include FT_OUTLINE_H
#include <hb.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>

#include "typeprobe/error.hpp"

namespace typeprobe {

namespace {

/// Per-thread FreeType library plus opened faces. FT_Face objects must not
/// be shared across threads, so each worker keeps its own.
class FaceCache {
 public:
  struct Face {
    std::vector<std::uint8_t> bytes;
    FT_Face ft = nullptr;
    hb_blob_t* blob = nullptr;
    hb_face_t* hb_face = nullptr;
    hb_font_t* hb_font = nullptr;
  };

  FaceCache() {
    if (FT_Init_FreeType(&library_) != 0) throw RenderError("FreeType initialization failed");
  }
  ~FaceCache() {
    for (auto& [path, face] : faces_) {
      hb_font_destroy(face->hb_font);
      hb_face_destroy(face->hb_face);
      hb_blob_destroy(face->blob);
      FT_Done_Face(face->ft);
    }
    FT_Done_FreeType(library_);
  }
  FaceCache(const FaceCache&) = delete;
  FaceCache& operator=(const FaceCache&) = delete;

  Face& get(const std::filesystem::path& path) {
    const std::string key = path.string();
    if (auto it = faces_.find(key); it != faces_.end()) return *it->second;

    auto face = std::make_unique<Face>();
    try {
      face->bytes = read_file_bytes(path);
    } catch (const Error&) {
      throw RenderError("cannot read font file " + key);
    }
    if (FT_New_Memory_Face(library_, face->bytes.data(), static_cast<FT_Long>(face->bytes.size()),
                           0, &face->ft) != 0) {
      throw RenderError("cannot parse font file " + key);
    }
    if (!FT_IS_SCALABLE(face->ft)) {
      FT_Done_Face(face->ft);
      throw RenderError("font file is not scalable: " + key);
    }
    face->blob = hb_blob_create(reinterpret_cast<const char*>(face->bytes.data()),
                                static_cast<unsigned>(face->bytes.size()),
                                HB_MEMORY_MODE_READONLY, nullptr, nullptr);
    face->hb_face = hb_face_create(face->blob, 0);
    face->hb_font = hb_font_create(face->hb_face);
    auto& ref = *face;
    faces_.emplace(key, std::move(face));
    return ref;
  }

  FT_Library library() const { return library_; }

 private:
  FT_Library library_ = nullptr;
  std::map<std::string, std::unique_ptr<Face>> faces_;
};

FaceCache& thread_cache() {
  thread_local FaceCache cache;
  return cache;
}

bool is_invisible(hb_codepoint_t cp) {
  switch (hb_unicode_general_category(hb_unicode_funcs_get_default(), cp)) {
    case HB_UNICODE_GENERAL_CATEGORY_SPACE_SEPARATOR:
    case HB_UNICODE_GENERAL_CATEGORY_LINE_SEPARATOR:
    case HB_UNICODE_GENERAL_CATEGORY_PARAGRAPH_SEPARATOR:
    case HB_UNICODE_GENERAL_CATEGORY_FORMAT:
    case HB_UNICODE_GENERAL_CATEGORY_CONTROL:
      return true;
    default:
      return false;
  }
}

struct GlyphBitmap {
  int left = 0;  // canvas x of the first column
  int top = 0;   // canvas y (down) of the first row, baseline at y = 0
  int width = 0;
  int rows = 0;
  std::vector<std::uint8_t> alpha;
};

int floor_div64(long v) { return static_cast<int>(v >= 0 ? v / 64 : -((-v + 63) / 64)); }

void check_coverage(hb_buffer_t* buf, hb_font_t* font, const std::filesystem::path& path) {
  unsigned int count = 0;
  const hb_glyph_info_t* infos = hb_buffer_get_glyph_infos(buf, &count);
  std::size_t visible = 0;
  std::vector<hb_codepoint_t> missing;
  for (unsigned int i = 0; i < count; ++i) {
    const hb_codepoint_t cp = infos[i].codepoint;
    if (is_invisible(cp)) continue;
    ++visible;
    hb_codepoint_t glyph = 0;
    if (!hb_font_get_nominal_glyph(font, cp, &glyph) || glyph == 0) missing.push_back(cp);
  }
  if (visible == 0) throw RenderError("text has no visible characters");
  const double covered = double(visible - missing.size()) / double(visible);
  if (covered < kMinGlyphCoverage) {
    std::string message = "font " + path.filename().string() + " lacks glyphs for";
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    for (std::size_t i = 0; i < missing.size() && i < 16; ++i) {
      char buf_cp[16];
      std::snprintf(buf_cp, sizeof buf_cp, " U+%04X", missing[i]);
      message += buf_cp;
    }
    if (missing.size() > 16) message += " ...";
    throw RenderError(message);
  }
}

void dilate_3x3(CoverageMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<std::uint8_t> out(mask.alpha.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t m = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w) continue;
          m = std::max(m, mask.at(xx, yy));
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = m;
    }
  }
  mask.alpha = std::move(out);
}

}  // namespace

void validate_render_spec(const RenderSpec& spec) {
  if (point_size_index(spec.size_pt) < 0) {
    throw Error("size_pt " + std::to_string(spec.size_pt) + " is not a benchmark size");
  }
  if (contrast_ratio(spec.color, spec.background) < kMinContrast) {
    throw Error("text/background contrast below 4.5:1");
  }
  if (spec.dpi <= 0 || spec.padding_px < 0) throw Error("dpi must be positive, padding >= 0");
}

bool is_scalable_font(const std::filesystem::path& path) {
  try {
    thread_cache().get(path);
    return true;
  } catch (const RenderError&) {
    return false;
  }
}

CoverageMask rasterize_text(const ResolvedFace& resolved, std::string_view text, double size_pt,
                            int dpi, TextBox* box) {
  if (text.empty()) throw RenderError("cannot render empty text");
  if (size_pt <= 0 || dpi <= 0) throw RenderError("size and dpi must be positive");
  auto& face = thread_cache().get(resolved.path);

  std::unique_ptr<hb_buffer_t, decltype(&hb_buffer_destroy)> buf(hb_buffer_create(),
                                                                  hb_buffer_destroy);
  hb_buffer_add_utf8(buf.get(), text.data(), static_cast<int>(text.size()), 0,
                     static_cast<int>(text.size()));
  hb_buffer_guess_segment_properties(buf.get());
  check_coverage(buf.get(), face.hb_font, resolved.path);

  const double ppem = size_pt * dpi / 72.0;
  const int scale = static_cast<int>(std::lround(ppem * 64.0));
  hb_font_set_scale(face.hb_font, scale, scale);
  hb_shape(face.hb_font, buf.get(), nullptr, 0);

  if (FT_Set_Char_Size(face.ft, 0, static_cast<FT_F26Dot6>(std::lround(size_pt * 64.0)),
                       static_cast<FT_UInt>(dpi), static_cast<FT_UInt>(dpi)) != 0) {
    throw RenderError("FT_Set_Char_Size failed for " + resolved.path.filename().string());
  }

  unsigned int count = 0;
  const hb_glyph_info_t* infos = hb_buffer_get_glyph_infos(buf.get(), &count);
  const hb_glyph_position_t* positions = hb_buffer_get_glyph_positions(buf.get(), &count);

  FT_Matrix shear{0x10000, 0, 0, 0x10000};
  if (resolved.faux_italic) {
    shear.xy = static_cast<FT_Fixed>(
        std::lround(std::tan(kFauxItalicDegrees * std::numbers::pi / 180.0) * 65536.0));
  }

  std::vector<GlyphBitmap> glyphs;
  glyphs.reserve(count);
  long pen_x = 0, pen_y = 0;
  for (unsigned int i = 0; i < count; ++i) {
    const long gx = pen_x + positions[i].x_offset;
    const long gy = pen_y + positions[i].y_offset;
    pen_x += positions[i].x_advance;
    pen_y += positions[i].y_advance;

    if (FT_Load_Glyph(face.ft, infos[i].codepoint,
                      FT_LOAD_NO_HINTING | FT_LOAD_NO_BITMAP | FT_LOAD_NO_AUTOHINT) != 0) {
      continue;
    }
    FT_GlyphSlot slot = face.ft->glyph;
    if (slot->format != FT_GLYPH_FORMAT_OUTLINE || slot->outline.n_points == 0) continue;
    if (resolved.faux_italic) FT_Outline_Transform(&slot->outline, &shear);

    const int ix = floor_div64(gx);
    const int iy = floor_div64(gy);
    FT_Outline_Translate(&slot->outline, gx - 64L * ix, gy - 64L * iy);
    if (FT_Render_Glyph(slot, FT_RENDER_MODE_NORMAL) != 0) continue;

    const FT_Bitmap& bm = slot->bitmap;
    if (bm.width == 0 || bm.rows == 0) continue;
    GlyphBitmap g;
    g.left = ix + slot->bitmap_left;
    g.top = -(iy + slot->bitmap_top);
    g.width = static_cast<int>(bm.width);
    g.rows = static_cast<int>(bm.rows);
    g.alpha.resize(static_cast<std::size_t>(g.width) * g.rows);
    for (int r = 0; r < g.rows; ++r) {
      const unsigned char* src = bm.buffer + static_cast<long>(r) * bm.pitch;
      std::copy(src, src + g.width, g.alpha.begin() + static_cast<long>(r) * g.width);
    }
    glyphs.push_back(std::move(g));
  }
  if (glyphs.empty()) throw RenderError("text produced no ink");

  int min_x = glyphs[0].left, min_y = glyphs[0].top;
  int max_x = glyphs[0].left + glyphs[0].width, max_y = glyphs[0].top + glyphs[0].rows;
  for (const auto& g : glyphs) {
    min_x = std::min(min_x, g.left);
    min_y = std::min(min_y, g.top);
    max_x = std::max(max_x, g.left + g.width);
    max_y = std::max(max_y, g.top + g.rows);
  }
  const int margin = resolved.faux_bold ? 1 : 0;
  CoverageMask canvas;
  canvas.width = max_x - min_x + 2 * margin;
  canvas.height = max_y - min_y + 2 * margin;
  canvas.alpha.assign(static_cast<std::size_t>(canvas.width) * canvas.height, 0);
  for (const auto& g : glyphs) {
    for (int r = 0; r < g.rows; ++r) {
      const int y = g.top - min_y + margin + r;
      std::uint8_t* dst = canvas.alpha.data() + static_cast<std::size_t>(y) * canvas.width +
                          (g.left - min_x + margin);
      const std::uint8_t* src = g.alpha.data() + static_cast<std::size_t>(r) * g.width;
      for (int c = 0; c < g.width; ++c) dst[c] = std::max(dst[c], src[c]);
    }
  }
  if (resolved.faux_bold) dilate_3x3(canvas);

  // Crop to the tight ink box.
  int x0 = canvas.width, y0 = canvas.height, x1 = -1, y1 = -1;
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      if (canvas.at(x, y) != 0) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) throw RenderError("text produced no ink");
  CoverageMask mask;
  mask.width = x1 - x0 + 1;
  mask.height = y1 - y0 + 1;
  mask.alpha.resize(static_cast<std::size_t>(mask.width) * mask.height);
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* src = canvas.alpha.data() + static_cast<std::size_t>(y + y0) * canvas.width + x0;
    std::copy(src, src + mask.width, mask.alpha.begin() + static_cast<long>(y) * mask.width);
  }
  if (box != nullptr) {
    box->width_px = mask.width;
    box->height_px = mask.height;
    // Baseline sits at canvas row (0 - min_y + margin).
    box->baseline_px = (margin - min_y) - y0;
  }
  return mask;
}

TextBox measure_text(const ResolvedFace& face, std::string_view text, double size_pt, int dpi) {
  TextBox box;
  rasterize_text(face, text, size_pt, dpi, &box);
  return box;
}

RasterImage render_with_face(const RenderSpec& spec, const ResolvedFace& face) {
  const CoverageMask mask = rasterize_text(face, spec.text, spec.size_pt, spec.dpi);
  const int pad = spec.padding_px;
  RasterImage image(mask.width + 2 * pad, mask.height + 2 * pad, spec.background);
  const RgbColor bg = spec.background, fg = spec.color;
  auto blend = [](int b, int f, int a) { return static_cast<std::uint8_t>((b * (255 - a) + f * a + 127) / 255); };
  for (int y = 0; y < mask.height; ++y) {
    std::uint8_t* row = image.row(y + pad) + static_cast<std::size_t>(pad) * 3;
    for (int x = 0; x < mask.width; ++x) {
      const int a = mask.at(x, y);
      if (a == 0) continue;
      row[3 * x] = blend(bg.r, fg.r, a);
      row[3 * x + 1] = blend(bg.g, fg.g, a);
      row[3 * x + 2] = blend(bg.b, fg.b, a);
    }
  }
  return image;
}

RasterImage render_sample(const RenderSpec& spec, const FontRegistry& registry) {
  validate_render_spec(spec);
  const FontEntry& entry = registry.at(spec.font_id);
  return render_with_face(spec, resolve_face(entry, spec.style));
}

}  // namespace typeprobe
