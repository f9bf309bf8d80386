#include "typeprobe/font_registry.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/render.hpp"
#include "typeprobe/rng.hpp"

namespace typeprobe {

namespace {

using nlohmann::ordered_json;

constexpr std::array<std::pair<FontStyle, std::string_view>, 4> kFaceKeys{{
    {FontStyle::Regular, "regular"},
    {FontStyle::Bold, "bold"},
    {FontStyle::Italic, "italic"},
    {FontStyle::BoldItalic, "bold_italic"},
}};

std::string require_string(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw LoadError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

// Uniform draw without replacement; preserves the remaining pool order.
const FontEntry* take(std::vector<const FontEntry*>& pool, SeededRng& rng) {
  const std::size_t i = rng.uniform_index(pool.size());
  const FontEntry* e = pool[i];
  pool.erase(pool.begin() + static_cast<long>(i));
  return e;
}


}  // namespace

FontRegistry::FontRegistry(std::vector<FontEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> ids, names;
  for (const auto& e : entries_) {
    if (e.id.empty()) throw LoadError("font entry with empty id");
    if (!ids.insert(e.id).second) throw LoadError("duplicate font id: " + e.id);
    if (!names.insert(e.display_name).second) {
      throw LoadError("duplicate display_name: " + e.display_name);
    }
    if (!script_matches_category(e.script, e.category)) {
      throw LoadError("font " + e.id + ": category " + std::string(to_string(e.category)) +
                      " does not match script " + std::string(to_string(e.script)));
    }
    if (!e.has_face(FontStyle::Regular)) throw LoadError("font " + e.id + ": regular face is required");
  }
}

const FontEntry* FontRegistry::find_id(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const FontEntry* FontRegistry::find_display_name(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.display_name == name) return &e;
  }
  return nullptr;
}

const FontEntry& FontRegistry::at(std::string_view id) const {
  if (const FontEntry* e = find_id(id)) return *e;
  throw LoadError("unknown font id: " + std::string(id));
}

std::vector<const FontEntry*> FontRegistry::by_script(Script s) const {
  std::vector<const FontEntry*> out;
  for (const auto& e : entries_) {
    if (e.script == s) out.push_back(&e);
  }
  return out;
}

std::vector<const FontEntry*> FontRegistry::by_category(FontCategory c) const {
  std::vector<const FontEntry*> out;
  for (const auto& e : entries_) {
    if (e.category == c) out.push_back(&e);
  }
  return out;
}

FontRegistry load_registry(std::string_view document, const std::filesystem::path& base_dir) {
  if (std::all_of(document.begin(), document.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); })) {
    return FontRegistry{};
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(std::string("registry is not valid JSON: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("fonts") || !doc["fonts"].is_array()) {
    throw LoadError("registry must be an object with a 'fonts' array");
  }

  std::vector<FontEntry> entries;
  for (std::size_t i = 0; i < doc["fonts"].size(); ++i) {
    const auto& item = doc["fonts"][i];
    std::string where = "fonts[" + std::to_string(i) + "]";
    if (!item.is_object()) throw LoadError(where + " is not an object");
    FontEntry e;
    e.id = require_string(item, "id", where);
    where += " (" + e.id + ")";
    e.display_name = require_string(item, "display_name", where);
    try {
      e.script = parse_script(require_string(item, "script", where));
      e.category = parse_category(require_string(item, "category", where));
    } catch (const LoadError&) {
      throw;
    } catch (const Error& ex) {
      throw LoadError(where + ": " + ex.what());
    }
    if (auto it = item.find("similarity_group"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) throw LoadError(where + ": similarity_group must be a string");
      e.similarity_group = it->get<std::string>();
    }
    auto faces = item.find("face_paths");
    if (faces == item.end() || !faces->is_object()) {
      throw LoadError(where + ": missing object field 'face_paths'");
    }
    for (auto f = faces->begin(); f != faces->end(); ++f) {
      auto key = std::find_if(kFaceKeys.begin(), kFaceKeys.end(),
                              [&](const auto& kv) { return kv.second == f.key(); });
      if (key == kFaceKeys.end()) throw LoadError(where + ": unknown face style '" + f.key() + "'");
      if (!f.value().is_string()) throw LoadError(where + ": face path must be a string");
      const std::filesystem::path path = base_dir / f.value().get<std::string>();
      if (!std::filesystem::is_regular_file(path)) {
        throw LoadError(where + ": face file not found: " + path.string());
      }
      if (!is_scalable_font(path)) {
        throw LoadError(where + ": not a scalable font: " + path.string());
      }
      e.face_paths[key->first] = path.lexically_normal();
    }
    entries.push_back(std::move(e));
  }
  return FontRegistry(std::move(entries));
}

FontRegistry load_registry_file(const std::filesystem::path& manifest_path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(manifest_path);
  } catch (const Error&) {
    throw LoadError("cannot read registry manifest " + manifest_path.string());
  }
  const std::string text(bytes.begin(), bytes.end());
  return load_registry(text, manifest_path.parent_path());
}

std::string serialize_registry(const FontRegistry& registry, const std::filesystem::path& base_dir) {
  ordered_json fonts = ordered_json::array();
  for (const auto& e : registry.entries()) {
    ordered_json item;
    item["id"] = e.id;
    item["display_name"] = e.display_name;
    item["script"] = to_string(e.script);
    item["category"] = to_string(e.category);
    item["similarity_group"] = e.similarity_group ? ordered_json(*e.similarity_group) : ordered_json();
    ordered_json faces = ordered_json::object();
    for (const auto& [style, key] : kFaceKeys) {
      if (auto it = e.face_paths.find(style); it != e.face_paths.end()) {
        faces[std::string(key)] = it->second.lexically_relative(base_dir).generic_string();
      }
    }
    item["face_paths"] = std::move(faces);
    fonts.push_back(std::move(item));
  }
  ordered_json doc;
  doc["fonts"] = std::move(fonts);
  return doc.dump(2) + "\n";
}

std::vector<const FontEntry*> distractor_fonts(const FontRegistry& registry, const FontEntry& target,
                                               Difficulty difficulty, std::size_t count,
                                               SeededRng& rng) {
  if (count == 0) throw GenerationError("distractor count must be positive");
  std::vector<const FontEntry*> same_group, same_cat, cross_cat;
  for (const FontEntry* e : registry.by_script(target.script)) {
    if (e->id == target.id) continue;
    if (e->category == target.category) {
      if (target.similarity_group && e->similarity_group == target.similarity_group) {
        same_group.push_back(e);
      } else {
        same_cat.push_back(e);
      }
    } else {
      cross_cat.push_back(e);
    }
  }
  const std::size_t available = same_group.size() + same_cat.size() + cross_cat.size();
  if (available < count) {
    throw GenerationError("font " + target.display_name + ": need " + std::to_string(count) +
                          " distractors but script " + std::string(to_string(target.script)) +
                          " has only " + std::to_string(available) + " other fonts");
  }

  std::vector<const FontEntry*> out;
  auto fill_from = [&](std::vector<const FontEntry*>& pool) {
    while (out.size() < count && !pool.empty()) out.push_back(take(pool, rng));
  };

  switch (difficulty) {
    case Difficulty::Easy: {
      fill_from(cross_cat);
      // Scripts whose fonts all share one category have nothing else to offer.
      std::vector<const FontEntry*> rest = same_group;
      rest.insert(rest.end(), same_cat.begin(), same_cat.end());
      fill_from(rest);
      break;
    }
    case Difficulty::Hard: {
      fill_from(same_group);
      fill_from(same_cat);
      fill_from(cross_cat);
      break;
    }
    case Difficulty::Medium: {
      std::vector<const FontEntry*> same = same_group;
      same.insert(same.end(), same_cat.begin(), same_cat.end());
      if (!same.empty() && out.size() < count) out.push_back(take(same, rng));
      if (!cross_cat.empty() && out.size() < count) out.push_back(take(cross_cat, rng));
      std::vector<const FontEntry*> rest = same;
      rest.insert(rest.end(), cross_cat.begin(), cross_cat.end());
      fill_from(rest);
      break;
    }
  }
  return out;
}

ResolvedFace resolve_face(const FontEntry& entry, FontStyle style) {
  auto face = [&](FontStyle s) { return entry.face_paths.at(s); };
  const bool want_bold = style == FontStyle::Bold || style == FontStyle::BoldItalic;
  const bool want_italic = style == FontStyle::Italic || style == FontStyle::BoldItalic;
  if (entry.has_face(style)) return {face(style), false, false};
  if (style == FontStyle::BoldItalic) {
    if (entry.has_face(FontStyle::Bold)) return {face(FontStyle::Bold), false, true};
    if (entry.has_face(FontStyle::Italic)) return {face(FontStyle::Italic), true, false};
  }
  return {face(FontStyle::Regular), want_bold, want_italic};
}

}  // namespace typeprobe
