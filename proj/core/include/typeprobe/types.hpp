#pragma once

#include <array>
#include <string>
#include <string_view>

namespace typeprobe {

enum class Script { Latin, CJK, Arabic, Devanagari };

/// Reporting groups: Arabic and Devanagari are pooled as "Other".
enum class ScriptGroup { Latin, CJK, Other };

enum class FontCategory { Serif, SansSerif, Monospace, SlabSerif, Display, CJK, Arabic, Devanagari };

enum class FontStyle { Regular, Bold, Italic, BoldItalic };

enum class Difficulty { Easy, Medium, Hard };

enum class Property { Family, Size, Style, Color };

enum class SizeBucket { Small, Medium, Large, XLarge };

inline constexpr std::array<Script, 4> kAllScripts{Script::Latin, Script::CJK, Script::Arabic,
                                                   Script::Devanagari};
inline constexpr std::array<ScriptGroup, 3> kAllScriptGroups{ScriptGroup::Latin, ScriptGroup::CJK,
                                                             ScriptGroup::Other};
inline constexpr std::array<FontStyle, 4> kAllStyles{FontStyle::Regular, FontStyle::Bold,
                                                     FontStyle::Italic, FontStyle::BoldItalic};
inline constexpr std::array<Difficulty, 3> kAllDifficulties{Difficulty::Easy, Difficulty::Medium,
                                                            Difficulty::Hard};
inline constexpr std::array<Property, 4> kAllProperties{Property::Family, Property::Size,
                                                        Property::Style, Property::Color};
inline constexpr std::array<SizeBucket, 4> kAllSizeBuckets{SizeBucket::Small, SizeBucket::Medium,
                                                           SizeBucket::Large, SizeBucket::XLarge};

/// Point sizes, ascending. Size-question distractors are chosen by position
/// in this list.
inline constexpr std::array<int, 8> kPointSizes{12, 16, 20, 24, 32, 40, 48, 64};

inline constexpr int kRenderDpi = 96;
inline constexpr int kPaddingPx = 20;

ScriptGroup script_group(Script s);

/// Throws Error for sizes outside kPointSizes.
SizeBucket size_bucket(int size_pt);
/// Index of size_pt in kPointSizes, or -1.
int point_size_index(int size_pt);

// Canonical lowercase/snake names used in manifests and on the command line.
std::string_view to_string(Script s);
std::string_view to_string(ScriptGroup g);
std::string_view to_string(FontCategory c);
std::string_view to_string(FontStyle s);
std::string_view to_string(Difficulty d);
std::string_view to_string(Property p);
std::string_view to_string(SizeBucket b);

// Parsers are case-insensitive and throw Error on unknown names.
Script parse_script(std::string_view text);
ScriptGroup parse_script_group(std::string_view text);
FontCategory parse_category(std::string_view text);
FontStyle parse_style(std::string_view text);
Difficulty parse_difficulty(std::string_view text);
Property parse_property(std::string_view text);

/// Option text shown to models for a style ("Regular", "Bold Italic", ...).
std::string_view style_display_name(FontStyle s);
/// "12pt", "64pt".
std::string size_display_name(int size_pt);

bool script_matches_category(Script s, FontCategory c);

}  // namespace typeprobe
