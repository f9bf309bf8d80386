#include "typeprobe/mcq.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "typeprobe/color.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

constexpr std::array<std::string_view, 4> kFamilyTemplates{
    "What font family is used in this image?",
    "Identify the typeface shown in this text.",
    "Which font is used to render this text?",
    "What is the name of this font?",
};
constexpr std::array<std::string_view, 4> kSizeTemplates{
    "What is the approximate font size in this image?",
    "Estimate the point size of the displayed text.",
    "How large is the font in this image?",
    "What size is this text rendered at?",
};
constexpr std::array<std::string_view, 4> kStyleTemplates{
    "What style is the text rendered in?",
    "Is this text regular, bold, italic, or bold-italic?",
    "Identify the font style used here.",
    "What typographic style is applied to this text?",
};
constexpr std::array<std::string_view, 4> kColorTemplates{
    "What color is the text in this image?",
    "Identify the font color.",
    "What is the color of the displayed text?",
    "Which color is used for this text?",
};

OptionSet shuffled(std::string truth, std::vector<std::string> distractors, SeededRng& rng) {
  OptionSet set;
  set.options = std::move(distractors);
  set.options.push_back(truth);
  rng.shuffle(set.options);
  set.correct_index = static_cast<std::size_t>(
      std::find(set.options.begin(), set.options.end(), truth) - set.options.begin());
  return set;
}

int distance(std::size_t a, std::size_t b) {
  return std::abs(static_cast<int>(a) - static_cast<int>(b));
}

std::size_t take_random(std::vector<std::size_t>& pool, SeededRng& rng) {
  const std::size_t i = rng.uniform_index(pool.size());
  const std::size_t v = pool[i];
  pool.erase(pool.begin() + static_cast<long>(i));
  return v;
}

// Farthest first; the lower position wins ties.
std::size_t take_farthest(std::vector<std::size_t>& pool, std::size_t truth) {
  auto it = std::max_element(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    return distance(a, truth) < distance(b, truth) ||
           (distance(a, truth) == distance(b, truth) && a > b);
  });
  const std::size_t v = *it;
  pool.erase(it);
  return v;
}

std::vector<std::size_t> size_distractors(std::size_t t, Difficulty difficulty, SeededRng& rng) {
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < kPointSizes.size(); ++j) {
    if (j != t) others.push_back(j);
  }
  std::vector<std::size_t> out;
  switch (difficulty) {
    case Difficulty::Hard: {
      std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return distance(a, t) < distance(b, t);
      });
      out.assign(others.begin(), others.begin() + 3);
      break;
    }
    case Difficulty::Easy: {
      std::vector<std::size_t> far;
      std::copy_if(others.begin(), others.end(), std::back_inserter(far),
                   [&](std::size_t j) { return distance(j, t) >= 3; });
      while (out.size() < 3 && !far.empty()) out.push_back(take_random(far, rng));
      std::erase_if(others, [&](std::size_t j) { return std::ranges::count(out, j) > 0; });
      while (out.size() < 3) out.push_back(take_farthest(others, t));
      break;
    }
    case Difficulty::Medium: {
      std::vector<std::size_t> adjacent, far;
      for (std::size_t j : others) {
        if (distance(j, t) == 1) adjacent.push_back(j);
        if (distance(j, t) >= 3) far.push_back(j);
      }
      out.push_back(take_random(adjacent, rng));
      std::erase(others, out.back());
      if (!far.empty()) {
        out.push_back(take_random(far, rng));
        std::erase(others, out.back());
      } else {
        out.push_back(take_farthest(others, t));
      }
      out.push_back(take_random(others, rng));
      break;
    }
  }
  return out;
}

std::vector<std::string> color_distractors(const NamedColor& truth, Difficulty difficulty) {
  std::vector<const NamedColor*> others;
  for (const auto& c : kTextPalette) {
    if (c.name != truth.name) others.push_back(&c);
  }
  std::stable_sort(others.begin(), others.end(), [&](const NamedColor* a, const NamedColor* b) {
    return rgb_distance(a->rgb, truth.rgb) < rgb_distance(b->rgb, truth.rgb);
  });
  std::array<std::size_t, 3> ranks{};
  switch (difficulty) {
    case Difficulty::Hard: ranks = {0, 1, 2}; break;
    case Difficulty::Medium: ranks = {0, 2, 4}; break;
    case Difficulty::Easy: ranks = {4, 5, 6}; break;
  }
  std::vector<std::string> out;
  for (std::size_t r : ranks) out.emplace_back(others[r]->name);
  return out;
}

std::string canonical_truth(const Sample& sample, Property p) {
  switch (p) {
    case Property::Family: return sample.spec.font_id;
    case Property::Size: return std::to_string(sample.spec.size_pt);
    case Property::Style: return std::string(to_string(sample.spec.style));
    case Property::Color: return sample.color_name();
  }
  return {};
}

}  // namespace

const std::array<std::string_view, 4>& prompt_templates(Property p) {
  switch (p) {
    case Property::Family: return kFamilyTemplates;
    case Property::Size: return kSizeTemplates;
    case Property::Style: return kStyleTemplates;
    case Property::Color: return kColorTemplates;
  }
  return kFamilyTemplates;
}

std::string truth_display(const Sample& sample, Property p) {
  switch (p) {
    case Property::Family: return sample.font_display_name;
    case Property::Size: return size_display_name(sample.spec.size_pt);
    case Property::Style: return std::string(style_display_name(sample.spec.style));
    case Property::Color: return sample.color_name();
  }
  return {};
}

OptionSet build_options(Property property, std::string_view truth, Difficulty difficulty,
                        const FontRegistry& registry, SeededRng& rng) {
  switch (property) {
    case Property::Family: {
      const FontEntry* target = registry.find_id(truth);
      if (target == nullptr) throw Error("family truth is not a registry font id: " + std::string(truth));
      const std::size_t fonts = registry.by_script(target->script).size();
      if (fonts < 2) {
        throw GenerationError("script " + std::string(to_string(target->script)) +
                              " needs at least two fonts for a family question");
      }
      const std::size_t option_count = std::min<std::size_t>(4, fonts);
      std::vector<std::string> names;
      for (const FontEntry* e : distractor_fonts(registry, *target, difficulty, option_count - 1, rng)) {
        names.push_back(e->display_name);
      }
      return shuffled(target->display_name, std::move(names), rng);
    }
    case Property::Size: {
      int size = 0;
      const auto [ptr, ec] = std::from_chars(truth.data(), truth.data() + truth.size(), size);
      const int index = (ec == std::errc{} && ptr == truth.data() + truth.size()) ? point_size_index(size) : -1;
      if (index < 0) throw Error("size truth is not a benchmark size: " + std::string(truth));
      std::vector<std::string> names;
      for (std::size_t j : size_distractors(static_cast<std::size_t>(index), difficulty, rng)) {
        names.push_back(size_display_name(kPointSizes[j]));
      }
      return shuffled(size_display_name(size), std::move(names), rng);
    }
    case Property::Style: {
      const FontStyle style = parse_style(truth);
      std::vector<std::string> names;
      for (FontStyle s : kAllStyles) {
        if (s != style) names.emplace_back(style_display_name(s));
      }
      return shuffled(std::string(style_display_name(style)), std::move(names), rng);
    }
    case Property::Color: {
      const auto color = palette_color(truth);
      if (!color) throw Error("color truth is not a palette color: " + std::string(truth));
      return shuffled(std::string(color->name), color_distractors(*color, difficulty), rng);
    }
  }
  throw Error("unknown property");
}

std::vector<Question> questions_for_sample(const Sample& sample, const FontRegistry& registry,
                                           SeededRng& rng) {
  std::vector<Question> out;
  out.reserve(kAllProperties.size());
  for (Property p : kAllProperties) {
    Question q;
    q.id = sample.id + "-" + std::string(to_string(p));
    q.sample_id = sample.id;
    q.property = p;
    const auto& templates = prompt_templates(p);
    q.prompt = std::string(templates[rng.uniform_index(templates.size())]);
    OptionSet set = build_options(p, canonical_truth(sample, p), sample.difficulty, registry, rng);
    q.options = std::move(set.options);
    q.correct_index = set.correct_index;
    q.chance_baseline = 1.0 / static_cast<double>(q.options.size());
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Question> questions_for_manifest(const DatasetManifest& manifest,
                                             const FontRegistry& registry) {
  std::vector<Question> out;
  out.reserve(manifest.samples.size() * kAllProperties.size());
  for (const Sample& s : manifest.samples) {
    SeededRng rng = SeededRng::for_stream(manifest.master_seed, "questions", s.seed_index);
    auto qs = questions_for_sample(s, registry, rng);
    std::move(qs.begin(), qs.end(), std::back_inserter(out));
  }
  return out;
}

Question frb_style_family_question(const Sample& sample, const FontRegistry& registry,
                                   SeededRng& rng) {
  if (sample.script != Script::Latin) {
    throw GenerationError("15-way family questions need a Latin sample");
  }
  const auto latin = registry.by_script(Script::Latin);
  if (latin.size() < kFrbOptionCount) {
    throw GenerationError("15-way family questions need at least 15 Latin fonts, registry has " +
                          std::to_string(latin.size()));
  }
  const FontEntry& target = registry.at(sample.spec.font_id);

  // Round-robin over categories so every category is represented.
  std::vector<FontCategory> categories;
  std::vector<std::vector<const FontEntry*>> pools;
  for (const FontEntry* e : latin) {
    if (e->id == target.id) continue;
    auto it = std::find(categories.begin(), categories.end(), e->category);
    if (it == categories.end()) {
      categories.push_back(e->category);
      pools.emplace_back();
      it = categories.end() - 1;
    }
    pools[static_cast<std::size_t>(it - categories.begin())].push_back(e);
  }
  for (auto& pool : pools) rng.shuffle(pool);

  std::vector<std::string> names;
  for (std::size_t round = 0; names.size() + 1 < kFrbOptionCount; ++round) {
    for (auto& pool : pools) {
      if (round < pool.size() && names.size() + 1 < kFrbOptionCount) {
        names.push_back(pool[round]->display_name);
      }
    }
  }

  Question q;
  q.id = sample.id + "-family-frb";
  q.sample_id = sample.id;
  q.property = Property::Family;
  q.prompt = std::string(kFamilyTemplates[rng.uniform_index(kFamilyTemplates.size())]);
  OptionSet set = shuffled(target.display_name, std::move(names), rng);
  q.options = std::move(set.options);
  q.correct_index = set.correct_index;
  q.chance_baseline = 1.0 / static_cast<double>(q.options.size());
  return q;
}

}  // namespace typeprobe
