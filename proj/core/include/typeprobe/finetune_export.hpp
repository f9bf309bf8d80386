#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace typeprobe {

enum class BalancePolicy {
  /// Equal shares across difficulties and script groups.
  Balanced,
  /// Evaluation-set proportions.
  Proportional,
};

enum class ConversationFormat {
  /// {"messages": [user(image, text), assistant(letter)]}
  Messages,
  /// {"image": ..., "conversations": [{"from": "human"}, {"from": "gpt"}]}
  ShareGpt,
};

std::string_view to_string(BalancePolicy p);
BalancePolicy parse_balance_policy(std::string_view text);
std::string_view to_string(ConversationFormat f);
ConversationFormat parse_conversation_format(std::string_view text);

/// What the leakage guard compares against.
struct EvaluationFingerprint {
  std::uint64_t seed = 42;
  std::set<std::string> texts;
};

/// From a generated dataset directory (generator.cfg + samples.manifest).
EvaluationFingerprint fingerprint_dataset(const std::filesystem::path& dataset_root);
/// From a seed and the evaluation corpus files.
EvaluationFingerprint fingerprint_corpus(std::uint64_t seed, const std::filesystem::path& corpus_dir);

struct FinetuneExportConfig {
  std::size_t count = 3000;
  std::uint64_t seed = 7;
  BalancePolicy balance = BalancePolicy::Balanced;
  ConversationFormat format = ConversationFormat::Messages;
  std::filesystem::path registry_path;
  std::filesystem::path corpus_dir;  // training corpus, disjoint from evaluation
  std::filesystem::path output_dir;
  EvaluationFingerprint evaluation;
  bool force = false;
  unsigned threads = 0;
};

struct FinetuneExportResult {
  std::filesystem::path records_path;
  std::filesystem::path metadata_path;
  std::size_t records = 0;
  std::size_t per_property[4] = {0, 0, 0, 0};
};

/// Throws ConfigError (leakage) when the seed equals the evaluation seed or a
/// generated text appears in the evaluation set; nothing is written then.
void check_leakage(const FinetuneExportConfig& config, const std::set<std::string>& export_texts);

/// Generates ceil(count / 4) samples, emits their questions round-robin by
/// property (count records, balanced across the four properties) in the
/// chosen conversation format, plus an adapter-hyperparameter sidecar.
FinetuneExportResult export_finetune(const FinetuneExportConfig& config);

}  // namespace typeprobe
