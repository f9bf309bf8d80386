#include "typeprobe/sample_generator.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "typeprobe/color.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

std::size_t weighted_index(SeededRng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0)) throw GenerationError("sampling weights must have a positive sum");
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding can leave u just above the last weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0) return i;
  }
  return 0;
}

/// Scripts of a group that can actually produce a sample.
std::vector<Script> usable_scripts(ScriptGroup group, const FontRegistry& registry,
                                   const TextCorpus& corpus) {
  std::vector<Script> out;
  for (Script s : kAllScripts) {
    if (script_group(s) != group) continue;
    if (registry.by_script(s).empty() || corpus.for_script(s).empty()) continue;
    out.push_back(s);
  }
  return out;
}

std::string cell_name(ScriptGroup g, Difficulty d) {
  return std::string(to_string(g)) + "/" + std::string(to_string(d));
}

}  // namespace

std::string Sample::color_name() const {
  if (auto named = palette_color(spec.color)) return std::string(named->name);
  return "custom";
}

QuotaTable QuotaTable::standard() {
  QuotaTable q;
  q.counts_ = {{{73, 57, 73}, {7, 7, 4}, {8, 13, 8}}};
  return q;
}

int QuotaTable::get(ScriptGroup g, Difficulty d) const {
  return counts_[static_cast<std::size_t>(g)][static_cast<std::size_t>(d)];
}

void QuotaTable::set(ScriptGroup g, Difficulty d, int count) {
  if (count < 0) throw ConfigError("quota counts must be non-negative");
  counts_[static_cast<std::size_t>(g)][static_cast<std::size_t>(d)] = count;
}

int QuotaTable::total() const {
  int n = 0;
  for (const auto& row : counts_) n += std::accumulate(row.begin(), row.end(), 0);
  return n;
}

int QuotaTable::total(ScriptGroup g) const {
  const auto& row = counts_[static_cast<std::size_t>(g)];
  return std::accumulate(row.begin(), row.end(), 0);
}

int QuotaTable::total(Difficulty d) const {
  int n = 0;
  for (const auto& row : counts_) n += row[static_cast<std::size_t>(d)];
  return n;
}

QuotaTable QuotaTable::only(ScriptGroup g) const {
  QuotaTable q;
  q.counts_[static_cast<std::size_t>(g)] = counts_[static_cast<std::size_t>(g)];
  return q;
}

SamplingDistribution SamplingDistribution::from_quotas(const QuotaTable& quotas, int total) {
  SamplingDistribution dist;
  dist.total = total;
  for (Difficulty d : kAllDifficulties) {
    const auto di = static_cast<std::size_t>(d);
    dist.difficulty_weights[di] = quotas.total(d);
    for (ScriptGroup g : kAllScriptGroups) {
      dist.group_weights[di][static_cast<std::size_t>(g)] = quotas.get(g, d);
    }
  }
  return dist;
}

const std::vector<std::string>& TextCorpus::for_script(Script s) const {
  static const std::vector<std::string> kEmpty;
  auto it = sentences.find(s);
  return it == sentences.end() ? kEmpty : it->second;
}

TextCorpus load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("corpus directory not found: " + dir.string());
  TextCorpus corpus;
  for (Script s : kAllScripts) {
    auto& list = corpus.sentences[s];
    std::ifstream in(dir / (std::string(to_string(s)) + ".txt"));
    if (!in) continue;
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
        line.pop_back();
      }
      const auto start = line.find_first_not_of(" \t");
      if (start == std::string::npos || line[start] == '#') continue;
      list.push_back(line.substr(start));
    }
  }
  return corpus;
}

std::vector<PlanEntry> plan_samples(const GeneratorConfig& config) {
  std::vector<PlanEntry> plan;
  if (config.sampling) {
    const auto& dist = *config.sampling;
    if (dist.total < 0) throw ConfigError("sample count must be non-negative");
    plan.reserve(static_cast<std::size_t>(dist.total));
    for (int i = 0; i < dist.total; ++i) {
      SeededRng rng = SeededRng::for_stream(config.master_seed, "plan", static_cast<std::uint64_t>(i));
      const auto d = weighted_index(rng, dist.difficulty_weights);
      const auto g = weighted_index(rng, dist.group_weights[d]);
      plan.push_back({kAllScriptGroups[g], kAllDifficulties[d]});
    }
    return plan;
  }
  for (ScriptGroup g : kAllScriptGroups) {
    for (Difficulty d : kAllDifficulties) {
      plan.insert(plan.end(), static_cast<std::size_t>(config.quotas.get(g, d)), PlanEntry{g, d});
    }
  }
  SeededRng rng = SeededRng::for_stream(config.master_seed, "plan", 0);
  rng.shuffle(plan);
  return plan;
}

RenderSpec sample_parameters(SeededRng& rng, Difficulty /*difficulty*/, Script script,
                             const FontRegistry& registry) {
  const auto fonts = registry.by_script(script);
  if (fonts.empty()) {
    throw GenerationError("registry has no fonts for script " + std::string(to_string(script)));
  }
  RenderSpec spec;
  spec.font_id = rng.pick(fonts)->id;
  spec.size_pt = kPointSizes[rng.uniform_index(kPointSizes.size())];
  spec.style = kAllStyles[rng.uniform_index(kAllStyles.size())];
  spec.color = kTextPalette[rng.uniform_index(kTextPalette.size())].rgb;
  spec.background = select_background(spec.color, rng);
  return spec;
}

std::string pick_text(const TextCorpus& corpus, Script script, SeededRng& rng, bool stroop,
                      const FontRegistry& registry, const FontEntry& rendering_font) {
  if (stroop) {
    if (script != Script::Latin) {
      throw GenerationError("stroop samples require Latin script, got " +
                            std::string(to_string(script)));
    }
    std::vector<std::string> names;
    for (const FontEntry* e : registry.by_script(Script::Latin)) {
      if (e->display_name != rendering_font.display_name) names.push_back(e->display_name);
    }
    if (names.empty()) throw GenerationError("stroop needs at least two Latin fonts");
    return rng.pick(names);
  }
  const auto& list = corpus.for_script(script);
  if (list.empty()) {
    throw GenerationError("corpus has no sentences for script " + std::string(to_string(script)));
  }
  return rng.pick(list);
}

std::string sample_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04zu", index);
  return buf;
}

Sample describe_sample(const GeneratorConfig& config, const FontRegistry& registry,
                       const TextCorpus& corpus, const std::vector<PlanEntry>& plan,
                       std::size_t index) {
  if (index >= plan.size()) throw GenerationError("sample index out of range");
  const PlanEntry cell = plan[index];
  SeededRng rng = SeededRng::for_stream(config.master_seed, "sample", index);

  const auto scripts = usable_scripts(cell.group, registry, corpus);
  if (scripts.empty()) {
    throw GenerationError("quota cell " + cell_name(cell.group, cell.difficulty) +
                          " is unsatisfiable: no script in the group has both fonts and corpus text");
  }
  const Script script = scripts.size() == 1 ? scripts[0] : rng.pick(scripts);

  Sample s;
  s.id = sample_id_for(index);
  s.image_path = "images/" + s.id + ".png";
  s.spec = sample_parameters(rng, cell.difficulty, script, registry);
  const FontEntry& font = registry.at(s.spec.font_id);
  s.stroop = script == Script::Latin && rng.bernoulli(config.stroop_fraction);
  s.spec.text = pick_text(corpus, script, rng, s.stroop, registry, font);
  if (s.stroop) s.conflicting_name = s.spec.text;

  s.font_display_name = font.display_name;
  s.script = script;
  s.category = font.category;
  s.difficulty = cell.difficulty;
  const ResolvedFace face = resolve_face(font, s.spec.style);
  s.faux_bold = face.faux_bold;
  s.faux_italic = face.faux_italic;
  s.seed_index = index;
  return s;
}

RenderedSample regenerate_sample(const GeneratorConfig& config, const FontRegistry& registry,
                                 const TextCorpus& corpus, std::size_t index) {
  const auto plan = plan_samples(config);
  RenderedSample out;
  out.sample = describe_sample(config, registry, corpus, plan, index);
  out.png = encode_png(render_sample(out.sample.spec, registry));
  return out;
}

DatasetManifest generate_dataset(const GeneratorConfig& config, const FontRegistry& registry,
                                 const TextCorpus& corpus) {
  if (!(config.stroop_fraction >= 0.0 && config.stroop_fraction <= 1.0)) {
    throw ConfigError("stroop_fraction must lie in [0, 1]");
  }
  DatasetManifest manifest;
  manifest.master_seed = config.master_seed;
  const auto plan = plan_samples(config);
  if (plan.empty()) return manifest;

  // Describe everything first so configuration errors surface before any file is written.
  manifest.samples.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    manifest.samples.push_back(describe_sample(config, registry, corpus, plan, i));
  }

  const auto image_dir = config.output_dir / "images";
  std::filesystem::create_directories(image_dir);

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(plan.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.samples.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const Sample& s = manifest.samples[i];
        write_file_bytes(config.output_dir / s.image_path, encode_png(render_sample(s.spec, registry)));
      } catch (const std::exception& ex) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              GenerationError("sample " + manifest.samples[i].id + ": " + ex.what()));
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return manifest;
}

}  // namespace typeprobe
