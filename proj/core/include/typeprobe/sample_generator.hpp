#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typeprobe/font_registry.hpp"
#include "typeprobe/render.hpp"
#include "typeprobe/types.hpp"

namespace typeprobe {

class SeededRng;

/// One rendered image plus its ground truth.
struct Sample {
  std::string id;
  std::string image_path;  // relative to the dataset root
  RenderSpec spec;
  std::string font_display_name;
  Script script = Script::Latin;
  FontCategory category = FontCategory::SansSerif;
  Difficulty difficulty = Difficulty::Easy;
  bool stroop = false;
  std::optional<std::string> conflicting_name;  // the font name the text spells
  bool faux_bold = false;
  bool faux_italic = false;
  std::uint64_t seed_index = 0;
  /// Set on derived (perturbed) datasets only.
  std::optional<std::string> perturbation;

  std::string color_name() const;
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct DatasetManifest {
  std::uint64_t master_seed = 0;
  std::vector<Sample> samples;  // index order
};

/// Sample counts per (script group, difficulty) cell.
class QuotaTable {
 public:
  QuotaTable() = default;

  /// Latin 73/57/73, CJK 7/7/4, Other 8/13/8 over Easy/Medium/Hard.
  static QuotaTable standard();

  int get(ScriptGroup g, Difficulty d) const;
  void set(ScriptGroup g, Difficulty d, int count);
  int total() const;
  int total(ScriptGroup g) const;
  int total(Difficulty d) const;
  /// Zero every row except g.
  QuotaTable only(ScriptGroup g) const;

  friend bool operator==(const QuotaTable&, const QuotaTable&) = default;

 private:
  std::array<std::array<int, 3>, 3> counts_{};  // [group][difficulty]
};

/// Stochastic alternative to quotas: each sample draws its difficulty, then
/// its script group conditioned on that difficulty.
struct SamplingDistribution {
  int total = 0;
  std::array<double, 3> difficulty_weights{1, 1, 1};
  std::array<std::array<double, 3>, 3> group_weights{};  // [difficulty][group]

  /// Marginals matching QuotaTable::standard().
  static SamplingDistribution from_quotas(const QuotaTable& quotas, int total);
};

struct GeneratorConfig {
  std::uint64_t master_seed = 42;
  QuotaTable quotas = QuotaTable::standard();
  std::optional<SamplingDistribution> sampling;
  double stroop_fraction = 0.0;
  std::filesystem::path output_dir;
  /// Worker threads for rendering; 0 means hardware concurrency.
  unsigned threads = 0;

  int target_count() const { return sampling ? sampling->total : quotas.total(); }
};

/// Sentences per script.
struct TextCorpus {
  std::map<Script, std::vector<std::string>> sentences;

  const std::vector<std::string>& for_script(Script s) const;
};

/// Reads <dir>/{latin,cjk,arabic,devanagari}.txt: one sentence per line,
/// blank lines and lines starting with '#' ignored. Missing files yield an
/// empty list for that script.
TextCorpus load_corpus(const std::filesystem::path& dir);

struct PlanEntry {
  ScriptGroup group = ScriptGroup::Latin;
  Difficulty difficulty = Difficulty::Easy;
};

/// Cell label of every sample index. Quota mode shuffles the exact cell list
/// with a dedicated stream; sampling mode draws each index independently.
std::vector<PlanEntry> plan_samples(const GeneratorConfig& config);

/// Font, size, style, color and background. Text is left empty.
RenderSpec sample_parameters(SeededRng& rng, Difficulty difficulty, Script script,
                             const FontRegistry& registry);

/// Uniform corpus sentence, or in stroop mode a Latin display name other than
/// the rendering font's. Stroop for non-Latin scripts throws GenerationError.
std::string pick_text(const TextCorpus& corpus, Script script, SeededRng& rng, bool stroop,
                      const FontRegistry& registry, const FontEntry& rendering_font);

/// Metadata of sample `index` without rendering it.
Sample describe_sample(const GeneratorConfig& config, const FontRegistry& registry,
                       const TextCorpus& corpus, const std::vector<PlanEntry>& plan,
                       std::size_t index);

struct RenderedSample {
  Sample sample;
  std::vector<std::uint8_t> png;
};

/// Regenerates one sample in isolation (metadata + PNG bytes).
RenderedSample regenerate_sample(const GeneratorConfig& config, const FontRegistry& registry,
                                 const TextCorpus& corpus, std::size_t index);

/// Renders every planned sample to <output_dir>/images/<id>.png and returns
/// the manifest in index order. Throws GenerationError for unsatisfiable
/// cells or empty corpora before anything is written.
DatasetManifest generate_dataset(const GeneratorConfig& config, const FontRegistry& registry,
                                 const TextCorpus& corpus);

std::string sample_id_for(std::size_t index);

}  // namespace typeprobe
