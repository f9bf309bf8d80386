#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/mcq.hpp"
#include "typeprobe/sample_generator.hpp"

namespace typeprobe {

// Dataset directory layout.
inline constexpr std::string_view kSamplesManifest = "samples.manifest";
inline constexpr std::string_view kQuestionsManifest = "questions.manifest";
inline constexpr std::string_view kDatasetHashFile = "dataset.hash";
inline constexpr std::string_view kGeneratorConfigFile = "generator.cfg";
inline constexpr std::string_view kImagesDir = "images";

/// One JSON object per line with the fields id, image_path, text, font_id,
/// font_display_name, script, category, size_pt, size_bucket, style,
/// color_name, color_rgb, background_rgb, difficulty, stroop,
/// conflicting_name, faux_bold, faux_italic, seed_index (+ perturbation on
/// derived datasets), in that order.
std::string sample_to_json_line(const Sample& sample);
Sample sample_from_json_line(std::string_view line);
std::string serialize_samples(const std::vector<Sample>& samples);
std::vector<Sample> parse_samples(std::string_view text);

/// Fields id, sample_id, property, prompt, options, correct_index,
/// chance_baseline.
std::string question_to_json_line(const Question& question);
Question question_from_json_line(std::string_view line);
std::string serialize_questions(const std::vector<Question>& questions);
std::vector<Question> parse_questions(std::string_view text);

/// A dataset directory on disk.
struct Dataset {
  std::filesystem::path root;
  DatasetManifest manifest;
  std::vector<Question> questions;
  std::string hash;

  const Sample& sample(std::string_view id) const;
  std::filesystem::path image_path(const Sample& sample) const { return root / sample.image_path; }
};

/// SHA-256 over the two manifest files and every image, in manifest order.
std::string compute_dataset_hash(const std::filesystem::path& root, const std::vector<Sample>& samples);

/// Writes both manifests and the hash file; images must already exist.
/// Returns the hash.
std::string write_dataset_files(const std::filesystem::path& root, const DatasetManifest& manifest,
                                const std::vector<Question>& questions);

/// Loads manifests and the recorded hash (verify recomputes and compares).
Dataset load_dataset(const std::filesystem::path& root, bool verify = false);

/// Error unless `dir` is absent or empty (or force is set).
void ensure_output_dir(const std::filesystem::path& dir, bool force);

}  // namespace typeprobe
