#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/font_registry.hpp"
#include "typeprobe/sample_generator.hpp"
#include "typeprobe/types.hpp"

namespace typeprobe {

class SeededRng;

struct Question {
  std::string id;
  std::string sample_id;
  Property property = Property::Family;
  std::string prompt;
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  double chance_baseline = 0.25;

  const std::string& correct_option() const { return options.at(correct_index); }
  friend bool operator==(const Question&, const Question&) = default;
};

struct OptionSet {
  std::vector<std::string> options;
  std::size_t correct_index = 0;
};

/// Question phrasings, four per property.
const std::array<std::string_view, 4>& prompt_templates(Property p);

/// Option display string of a sample's ground truth for one property.
std::string truth_display(const Sample& sample, Property p);

/// Distractor rules per property (options shuffled by rng):
///   Family  distractor_fonts(); option count shrinks to the script's font
///           count (minimum 2) when fewer than four fonts exist.
///   Size    Hard = three nearest list positions (lower size wins ties);
///           Easy = three positions >= 3 steps away; Medium = one adjacent,
///           one >= 3 away, one other.
///   Style   always the four styles.
///   Color   Euclidean RGB rank among the other seven palette colors:
///           Hard = ranks 0-2, Easy = ranks 4-6, Medium = ranks 0, 2, 4.
///
/// `truth` is the canonical value: font id, point size ("24"), style name
/// ("bold_italic") or palette color name. A truth that is not a legal value of
/// the property throws Error.
OptionSet build_options(Property property, std::string_view truth, Difficulty difficulty,
                        const FontRegistry& registry, SeededRng& rng);

/// Family, Size, Style, Color questions for one sample.
std::vector<Question> questions_for_sample(const Sample& sample, const FontRegistry& registry,
                                           SeededRng& rng);

/// Questions for a whole manifest; per-sample streams keyed by seed_index.
std::vector<Question> questions_for_manifest(const DatasetManifest& manifest,
                                             const FontRegistry& registry);

inline constexpr std::size_t kFrbOptionCount = 15;

/// 15-way family question (truth + 14 Latin distractors spread over
/// categories). Latin samples only.
Question frb_style_family_question(const Sample& sample, const FontRegistry& registry,
                                   SeededRng& rng);

}  // namespace typeprobe
