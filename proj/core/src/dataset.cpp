#include "typeprobe/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "json.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/hashing.hpp"
#include "typeprobe/kv_config.hpp"
#include "typeprobe/raster.hpp"

namespace typeprobe {

using nlohmann::ordered_json;

namespace {

ordered_json rgb_json(RgbColor c) { return ordered_json::array({c.r, c.g, c.b}); }

RgbColor rgb_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 3) throw LoadError("rgb value must be a 3-element array");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

template <class T, class F>
std::vector<T> parse_lines(std::string_view text, F parse_one, const char* what) {
  std::vector<T> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse_one(line));
    } catch (const Error& ex) {
      throw LoadError(std::string(what) + " line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace

std::string sample_to_json_line(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["image_path"] = s.image_path;
  j["text"] = s.spec.text;
  j["font_id"] = s.spec.font_id;
  j["font_display_name"] = s.font_display_name;
  j["script"] = to_string(s.script);
  j["category"] = to_string(s.category);
  j["size_pt"] = s.spec.size_pt;
  j["size_bucket"] = to_string(size_bucket(s.spec.size_pt));
  j["style"] = to_string(s.spec.style);
  j["color_name"] = s.color_name();
  j["color_rgb"] = rgb_json(s.spec.color);
  j["background_rgb"] = rgb_json(s.spec.background);
  j["difficulty"] = to_string(s.difficulty);
  j["stroop"] = s.stroop;
  j["conflicting_name"] = s.conflicting_name ? ordered_json(*s.conflicting_name) : ordered_json();
  j["faux_bold"] = s.faux_bold;
  j["faux_italic"] = s.faux_italic;
  j["seed_index"] = s.seed_index;
  if (s.perturbation) j["perturbation"] = *s.perturbation;
  return j.dump() + "\n";
}

Sample sample_from_json_line(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.image_path = j.at("image_path").get<std::string>();
    s.spec.text = j.at("text").get<std::string>();
    s.spec.font_id = j.at("font_id").get<std::string>();
    s.font_display_name = j.at("font_display_name").get<std::string>();
    s.script = parse_script(j.at("script").get<std::string>());
    s.category = parse_category(j.at("category").get<std::string>());
    s.spec.size_pt = j.at("size_pt").get<int>();
    s.spec.style = parse_style(j.at("style").get<std::string>());
    s.spec.color = rgb_from(j.at("color_rgb"));
    s.spec.background = rgb_from(j.at("background_rgb"));
    s.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    s.stroop = j.at("stroop").get<bool>();
    if (!j.at("conflicting_name").is_null()) s.conflicting_name = j["conflicting_name"].get<std::string>();
    s.faux_bold = j.at("faux_bold").get<bool>();
    s.faux_italic = j.at("faux_italic").get<bool>();
    s.seed_index = j.at("seed_index").get<std::uint64_t>();
    if (j.contains("perturbation")) s.perturbation = j["perturbation"].get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(std::string("bad sample record: ") + ex.what());
  }
}

std::string serialize_samples(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples) out += sample_to_json_line(s);
  return out;
}

std::vector<Sample> parse_samples(std::string_view text) {
  return parse_lines<Sample>(text, sample_from_json_line, "samples manifest");
}

std::string question_to_json_line(const Question& q) {
  ordered_json j;
  j["id"] = q.id;
  j["sample_id"] = q.sample_id;
  j["property"] = to_string(q.property);
  j["prompt"] = q.prompt;
  j["options"] = q.options;
  j["correct_index"] = q.correct_index;
  j["chance_baseline"] = q.chance_baseline;
  return j.dump() + "\n";
}

Question question_from_json_line(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    Question q;
    q.id = j.at("id").get<std::string>();
    q.sample_id = j.at("sample_id").get<std::string>();
    q.property = parse_property(j.at("property").get<std::string>());
    q.prompt = j.at("prompt").get<std::string>();
    q.options = j.at("options").get<std::vector<std::string>>();
    q.correct_index = j.at("correct_index").get<std::size_t>();
    q.chance_baseline = j.at("chance_baseline").get<double>();
    if (q.correct_index >= q.options.size()) throw LoadError("correct_index out of range in " + q.id);
    return q;
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(std::string("bad question record: ") + ex.what());
  }
}

std::string serialize_questions(const std::vector<Question>& questions) {
  std::string out;
  for (const auto& q : questions) out += question_to_json_line(q);
  return out;
}

std::vector<Question> parse_questions(std::string_view text) {
  return parse_lines<Question>(text, question_from_json_line, "questions manifest");
}

const Sample& Dataset::sample(std::string_view id) const {
  for (const auto& s : manifest.samples) {
    if (s.id == id) return s;
  }
  throw Error("dataset has no sample " + std::string(id));
}

std::string compute_dataset_hash(const std::filesystem::path& root, const std::vector<Sample>& samples) {
  Sha256 h;
  for (auto name : {kSamplesManifest, kQuestionsManifest}) {
    const auto bytes = read_file_bytes(root / name);
    h.update(std::string(name) + "\n" + std::to_string(bytes.size()) + "\n");
    h.update(bytes);
  }
  for (const auto& s : samples) {
    const auto bytes = read_file_bytes(root / s.image_path);
    h.update(s.image_path + "\n" + std::to_string(bytes.size()) + "\n");
    h.update(bytes);
  }
  return h.hex_digest();
}

std::string write_dataset_files(const std::filesystem::path& root, const DatasetManifest& manifest,
                                const std::vector<Question>& questions) {
  std::filesystem::create_directories(root);
  write_text(root / kSamplesManifest, serialize_samples(manifest.samples));
  write_text(root / kQuestionsManifest, serialize_questions(questions));
  const std::string hash = compute_dataset_hash(root, manifest.samples);
  write_text(root / kDatasetHashFile, hash + "\n");
  return hash;
}

Dataset load_dataset(const std::filesystem::path& root, bool verify) {
  if (!std::filesystem::is_regular_file(root / kSamplesManifest)) {
    throw LoadError("not a dataset directory (no " + std::string(kSamplesManifest) + "): " + root.string());
  }
  Dataset d;
  d.root = root;
  d.manifest.samples = parse_samples(read_text(root / kSamplesManifest));
  d.questions = parse_questions(read_text(root / kQuestionsManifest));
  std::set<std::string_view> ids;
  for (const auto& s : d.manifest.samples) {
    if (!ids.insert(s.id).second) throw LoadError("duplicate sample id " + s.id + " in " + root.string());
  }
  for (const auto& q : d.questions) {
    if (!ids.contains(q.sample_id)) {
      throw LoadError("question " + q.id + " references unknown sample " + q.sample_id);
    }
  }
  if (std::filesystem::is_regular_file(root / kGeneratorConfigFile)) {
    const auto cfg = KeyValueConfig::load(root / kGeneratorConfigFile);
    if (auto seed = cfg.get_int("master_seed")) d.manifest.master_seed = static_cast<std::uint64_t>(*seed);
  }
  std::string hash = read_text(root / kDatasetHashFile);
  hash.erase(std::remove_if(hash.begin(), hash.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             hash.end());
  d.hash = hash;
  if (verify) {
    const std::string actual = compute_dataset_hash(root, d.manifest.samples);
    if (actual != d.hash) {
      throw LoadError("dataset hash mismatch in " + root.string() + ": recorded " + d.hash + ", actual " + actual);
    }
  }
  return d;
}

void ensure_output_dir(const std::filesystem::path& dir, bool force) {
  if (!std::filesystem::exists(dir)) return;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("output path is not a directory: " + dir.string());
  if (std::filesystem::is_empty(dir)) return;
  if (!force) throw ConfigError("output directory " + dir.string() + " is not empty (pass --force to overwrite)");
  // Only remove what a generation writes, never unrelated user files.
  std::filesystem::remove_all(dir / kImagesDir);
  for (auto name : {kSamplesManifest, kQuestionsManifest, kDatasetHashFile, kGeneratorConfigFile}) {
    std::filesystem::remove(dir / name);
  }
}

}  // namespace typeprobe
