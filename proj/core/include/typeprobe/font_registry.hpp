#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/types.hpp"

namespace typeprobe {

class SeededRng;

/// One logical typeface. Face paths are absolute after loading; a missing
/// style is synthesized by the renderer.
struct FontEntry {
  std::string id;
  std::string display_name;
  Script script = Script::Latin;
  FontCategory category = FontCategory::SansSerif;
  std::optional<std::string> similarity_group;
  std::map<FontStyle, std::filesystem::path> face_paths;

  bool has_face(FontStyle s) const { return face_paths.contains(s); }
  friend bool operator==(const FontEntry&, const FontEntry&) = default;
};

/// Immutable after load; safe for concurrent reads.
class FontRegistry {
 public:
  FontRegistry() = default;
  /// Validates uniqueness and script/category consistency; does not touch
  /// the filesystem (load_registry does).
  explicit FontRegistry(std::vector<FontEntry> entries);

  const std::vector<FontEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const FontEntry* find_id(std::string_view id) const;
  const FontEntry* find_display_name(std::string_view name) const;
  /// Throws LoadError when the id is unknown.
  const FontEntry& at(std::string_view id) const;

  /// Entries of one script / category, in registry order.
  std::vector<const FontEntry*> by_script(Script s) const;
  std::vector<const FontEntry*> by_category(FontCategory c) const;

  friend bool operator==(const FontRegistry& a, const FontRegistry& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<FontEntry> entries_;
};

/// Parses a registry manifest (JSON). Face paths resolve relative to
/// base_dir. Every face file must exist and parse as a scalable font.
FontRegistry load_registry(std::string_view document, const std::filesystem::path& base_dir);
FontRegistry load_registry_file(const std::filesystem::path& manifest_path);

/// Inverse of load_registry; paths are written relative to base_dir.
std::string serialize_registry(const FontRegistry& registry, const std::filesystem::path& base_dir);

/// Wrong-answer fonts for a family question, drawn from the target's script.
///
///   Easy    every distractor from a different category (falls back to
///           same-category fonts only when the script has no others).
///   Medium  at least one same-category and one cross-category font when both
///           exist; the rest uniform.
///   Hard    similarity group first, then same category, then any same-script.
///
/// Throws GenerationError when the script holds fewer than count other fonts.
std::vector<const FontEntry*> distractor_fonts(const FontRegistry& registry, const FontEntry& target,
                                               Difficulty difficulty, std::size_t count,
                                               SeededRng& rng);

struct ResolvedFace {
  std::filesystem::path path;
  bool faux_bold = false;
  bool faux_italic = false;
  friend bool operator==(const ResolvedFace&, const ResolvedFace&) = default;
};

/// Picks the face file for a style; the nearest available face is returned
/// with the missing axes flagged for emulation.
ResolvedFace resolve_face(const FontEntry& entry, FontStyle style);

}  // namespace typeprobe
