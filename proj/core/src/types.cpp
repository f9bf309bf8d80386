#include "typeprobe/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "typeprobe/error.hpp"

namespace typeprobe {

namespace {

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    if (ch == '-' || ch == ' ') ch = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view what) {
  const std::string key = fold(text);
  for (Enum v : values) {
    if (fold(to_string(v)) == key) return v;
  }
  throw Error("unknown " + std::string(what) + ": '" + std::string(text) + "'");
}

}  // namespace

ScriptGroup script_group(Script s) {
  switch (s) {
    case Script::Latin: return ScriptGroup::Latin;
    case Script::CJK: return ScriptGroup::CJK;
    case Script::Arabic:
    case Script::Devanagari: return ScriptGroup::Other;
  }
  return ScriptGroup::Other;
}

int point_size_index(int size_pt) {
  const auto it = std::find(kPointSizes.begin(), kPointSizes.end(), size_pt);
  return it == kPointSizes.end() ? -1 : static_cast<int>(it - kPointSizes.begin());
}

SizeBucket size_bucket(int size_pt) {
  switch (size_pt) {
    case 12:
    case 16: return SizeBucket::Small;
    case 20:
    case 24: return SizeBucket::Medium;
    case 32:
    case 40: return SizeBucket::Large;
    case 48:
    case 64: return SizeBucket::XLarge;
    default: throw Error("not a benchmark point size: " + std::to_string(size_pt));
  }
}

std::string_view to_string(Script s) {
  switch (s) {
    case Script::Latin: return "latin";
    case Script::CJK: return "cjk";
    case Script::Arabic: return "arabic";
    case Script::Devanagari: return "devanagari";
  }
  return "?";
}

std::string_view to_string(ScriptGroup g) {
  switch (g) {
    case ScriptGroup::Latin: return "latin";
    case ScriptGroup::CJK: return "cjk";
    case ScriptGroup::Other: return "other";
  }
  return "?";
}

std::string_view to_string(FontCategory c) {
  switch (c) {
    case FontCategory::Serif: return "serif";
    case FontCategory::SansSerif: return "sans_serif";
    case FontCategory::Monospace: return "monospace";
    case FontCategory::SlabSerif: return "slab_serif";
    case FontCategory::Display: return "display";
    case FontCategory::CJK: return "cjk";
    case FontCategory::Arabic: return "arabic";
    case FontCategory::Devanagari: return "devanagari";
  }
  return "?";
}

std::string_view to_string(FontStyle s) {
  switch (s) {
    case FontStyle::Regular: return "regular";
    case FontStyle::Bold: return "bold";
    case FontStyle::Italic: return "italic";
    case FontStyle::BoldItalic: return "bold_italic";
  }
  return "?";
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

std::string_view to_string(Property p) {
  switch (p) {
    case Property::Family: return "family";
    case Property::Size: return "size";
    case Property::Style: return "style";
    case Property::Color: return "color";
  }
  return "?";
}

std::string_view to_string(SizeBucket b) {
  switch (b) {
    case SizeBucket::Small: return "small";
    case SizeBucket::Medium: return "medium";
    case SizeBucket::Large: return "large";
    case SizeBucket::XLarge: return "xlarge";
  }
  return "?";
}

Script parse_script(std::string_view text) { return parse_enum(text, kAllScripts, "script"); }

ScriptGroup parse_script_group(std::string_view text) {
  return parse_enum(text, kAllScriptGroups, "script group");
}

FontCategory parse_category(std::string_view text) {
  static constexpr std::array kAll{FontCategory::Serif,     FontCategory::SansSerif,
                                   FontCategory::Monospace, FontCategory::SlabSerif,
                                   FontCategory::Display,   FontCategory::CJK,
                                   FontCategory::Arabic,    FontCategory::Devanagari};
  return parse_enum(text, kAll, "font category");
}

FontStyle parse_style(std::string_view text) { return parse_enum(text, kAllStyles, "style"); }

Difficulty parse_difficulty(std::string_view text) {
  return parse_enum(text, kAllDifficulties, "difficulty");
}

Property parse_property(std::string_view text) {
  return parse_enum(text, kAllProperties, "property");
}

std::string_view style_display_name(FontStyle s) {
  switch (s) {
    case FontStyle::Regular: return "Regular";
    case FontStyle::Bold: return "Bold";
    case FontStyle::Italic: return "Italic";
    case FontStyle::BoldItalic: return "Bold Italic";
  }
  return "?";
}

std::string size_display_name(int size_pt) { return std::to_string(size_pt) + "pt"; }

bool script_matches_category(Script s, FontCategory c) {
  switch (c) {
    case FontCategory::CJK: return s == Script::CJK;
    case FontCategory::Arabic: return s == Script::Arabic;
    case FontCategory::Devanagari: return s == Script::Devanagari;
    default: return s == Script::Latin;
  }
}

}  // namespace typeprobe
