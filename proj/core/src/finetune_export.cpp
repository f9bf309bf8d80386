#include "typeprobe/finetune_export.hpp"

#include <fstream>

#include "json.hpp"
#include "typeprobe/answer_parser.hpp"
#include "typeprobe/dataset.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/kv_config.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/vlm_client.hpp"

namespace typeprobe {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kRecordsFile = "train.jsonl";
constexpr std::string_view kMetadataFile = "finetune_meta.json";

QuotaTable export_quotas(BalancePolicy policy, int total) {
  QuotaTable q;
  if (policy == BalancePolicy::Balanced) {
    const int cells = static_cast<int>(kAllScriptGroups.size() * kAllDifficulties.size());
    int i = 0;
    for (ScriptGroup g : kAllScriptGroups) {
      for (Difficulty d : kAllDifficulties) {
        q.set(g, d, total / cells + (i < total % cells ? 1 : 0));
        ++i;
      }
    }
    return q;
  }
  // Largest-remainder scaling of the evaluation composition.
  const QuotaTable ref = QuotaTable::standard();
  struct Cell {
    ScriptGroup g;
    Difficulty d;
    double remainder;
  };
  std::vector<Cell> cells;
  int assigned = 0;
  for (ScriptGroup g : kAllScriptGroups) {
    for (Difficulty d : kAllDifficulties) {
      const double exact = static_cast<double>(total) * ref.get(g, d) / ref.total();
      const int base = static_cast<int>(exact);
      q.set(g, d, base);
      assigned += base;
      cells.push_back({g, d, exact - base});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.remainder > b.remainder; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
    q.set(cells[i].g, cells[i].d, q.get(cells[i].g, cells[i].d) + 1);
  }
  return q;
}

ordered_json record_json(const Question& q, const Sample& s, ConversationFormat format) {
  const std::string prompt = build_prompt(q);
  const std::string answer(1, option_letter(q.correct_index));
  ordered_json j;
  j["id"] = q.id;
  j["image"] = s.image_path;
  if (format == ConversationFormat::Messages) {
    ordered_json user;
    user["role"] = "user";
    user["content"] = ordered_json::array({ordered_json{{"type", "image"}, {"image", s.image_path}},
                                           ordered_json{{"type", "text"}, {"text", prompt}}});
    ordered_json assistant;
    assistant["role"] = "assistant";
    assistant["content"] = answer;
    j["messages"] = ordered_json::array({user, assistant});
  } else {
    j["conversations"] = ordered_json::array({ordered_json{{"from", "human"}, {"value", "<image>\n" + prompt}},
                                              ordered_json{{"from", "gpt"}, {"value", answer}}});
  }
  return j;
}

}  // namespace

std::string_view to_string(BalancePolicy p) { return p == BalancePolicy::Balanced ? "balanced" : "proportional"; }

BalancePolicy parse_balance_policy(std::string_view text) {
  if (text == "balanced") return BalancePolicy::Balanced;
  if (text == "proportional") return BalancePolicy::Proportional;
  throw ConfigError("unknown balance policy '" + std::string(text) + "' (balanced, proportional)");
}

std::string_view to_string(ConversationFormat f) { return f == ConversationFormat::Messages ? "messages" : "sharegpt"; }

ConversationFormat parse_conversation_format(std::string_view text) {
  if (text == "messages") return ConversationFormat::Messages;
  if (text == "sharegpt") return ConversationFormat::ShareGpt;
  throw ConfigError("unknown conversation format '" + std::string(text) + "' (messages, sharegpt)");
}

EvaluationFingerprint fingerprint_dataset(const std::filesystem::path& dataset_root) {
  const Dataset d = load_dataset(dataset_root);
  EvaluationFingerprint fp;
  fp.seed = d.manifest.master_seed;
  for (const auto& s : d.manifest.samples) fp.texts.insert(s.spec.text);
  return fp;
}

EvaluationFingerprint fingerprint_corpus(std::uint64_t seed, const std::filesystem::path& corpus_dir) {
  EvaluationFingerprint fp;
  fp.seed = seed;
  for (const auto& [script, list] : load_corpus(corpus_dir).sentences) fp.texts.insert(list.begin(), list.end());
  return fp;
}

void check_leakage(const FinetuneExportConfig& config, const std::set<std::string>& export_texts) {
  if (config.seed == config.evaluation.seed) {
    throw ConfigError("data leakage: export seed " + std::to_string(config.seed) +
                      " equals the evaluation seed; choose a different --seed");
  }
  std::vector<std::string> shared;
  for (const auto& t : export_texts) {
    if (config.evaluation.texts.contains(t)) shared.push_back(t);
  }
  if (!shared.empty()) {
    std::string message = "data leakage: " + std::to_string(shared.size()) +
                          " export text(s) also appear in the evaluation set, e.g. \"" + shared.front() + "\"";
    throw ConfigError(message);
  }
}

FinetuneExportResult export_finetune(const FinetuneExportConfig& config) {
  if (config.count == 0) throw ConfigError("export count must be positive");
  if (config.output_dir.empty()) throw ConfigError("export needs an output directory");
  const FontRegistry registry = load_registry_file(config.registry_path);
  const TextCorpus corpus = load_corpus(config.corpus_dir);

  const int sample_count = static_cast<int>((config.count + 3) / 4);
  GeneratorConfig gen;
  gen.master_seed = config.seed;
  gen.quotas = export_quotas(config.balance, sample_count);
  gen.output_dir = config.output_dir;
  gen.threads = config.threads;

  // Leakage is checked on the planned texts before anything touches disk.
  const auto plan = plan_samples(gen);
  std::set<std::string> texts;
  for (std::size_t i = 0; i < plan.size(); ++i) texts.insert(describe_sample(gen, registry, corpus, plan, i).spec.text);
  check_leakage(config, texts);

  ensure_output_dir(config.output_dir, config.force);
  std::filesystem::remove(config.output_dir / kRecordsFile);
  std::filesystem::remove(config.output_dir / kMetadataFile);
  const DatasetManifest manifest = generate_dataset(gen, registry, corpus);
  const std::vector<Question> questions = questions_for_manifest(manifest, registry);
  const std::string hash = write_dataset_files(config.output_dir, manifest, questions);
  KeyValueConfig cfg;
  cfg.set("master_seed", std::to_string(config.seed));
  cfg.set("purpose", "finetune");
  const std::string cfg_text = cfg.serialize();
  write_file_bytes(config.output_dir / kGeneratorConfigFile,
                   std::span(reinterpret_cast<const std::uint8_t*>(cfg_text.data()), cfg_text.size()));

  FinetuneExportResult result;
  result.records_path = config.output_dir / kRecordsFile;
  result.metadata_path = config.output_dir / kMetadataFile;
  std::ofstream out(result.records_path, std::ios::binary);
  if (!out) throw Error("cannot write " + result.records_path.string());
  // questions_for_manifest emits the four properties of each sample in
  // order, so taking them in sequence is round-robin by property.
  for (std::size_t i = 0; i < config.count; ++i) {
    const Question& q = questions.at(i);
    const Sample& s = manifest.samples.at(i / kAllProperties.size());
    out << record_json(q, s, config.format).dump() << "\n";
    ++result.per_property[static_cast<std::size_t>(q.property)];
    ++result.records;
  }
  out.close();

  ordered_json meta;
  meta["records"] = result.records;
  ordered_json per = ordered_json::object();
  for (Property p : kAllProperties) per[std::string(to_string(p))] = result.per_property[static_cast<std::size_t>(p)];
  meta["per_property"] = per;
  meta["samples"] = manifest.samples.size();
  meta["seed"] = config.seed;
  meta["evaluation_seed"] = config.evaluation.seed;
  meta["balance"] = to_string(config.balance);
  meta["format"] = to_string(config.format);
  meta["dataset_hash"] = hash;
  meta["lora_config"] = ordered_json{{"r", 16},
                                     {"lora_alpha", 32},
                                     {"lora_dropout", 0.05},
                                     {"target_modules", {"q_proj", "k_proj", "v_proj", "o_proj"}},
                                     {"task_type", "CAUSAL_LM"}};
  meta["training_args"] = ordered_json{{"learning_rate", 2e-4},
                                       {"num_epochs", 3},
                                       {"batch_size", 1},
                                       {"gradient_accumulation_steps", 16},
                                       {"warmup_ratio", 0.05},
                                       {"bf16", true},
                                       {"gradient_checkpointing", true}};
  const std::string meta_text = meta.dump(2) + "\n";
  write_file_bytes(result.metadata_path,
                   std::span(reinterpret_cast<const std::uint8_t*>(meta_text.data()), meta_text.size()));
  return result;
}

}  // namespace typeprobe
