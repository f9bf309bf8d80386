#include "typeprobe/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>

#include "json.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/kv_config.hpp"
#include "typeprobe/perturb.hpp"
#include "typeprobe/raster.hpp"
#include "typeprobe/rng.hpp"
#include "typeprobe/vlm_client.hpp"

#ifndef TYPEPROBE_DEFAULT_DATA_DIR
#define TYPEPROBE_DEFAULT_DATA_DIR "data"
#endif

namespace typeprobe {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string render_cells(const std::vector<ModelSummary>& models, Grouping grouping, ReportFormat format) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : models) {
    for (const auto& c : aggregate(m.records, grouping)) {
      rows.push_back({m.model, c.key, std::to_string(c.k), std::to_string(c.n),
                      c.accuracy ? fmt("%.1f", *c.accuracy * 100) : "-",
                      c.wilson ? fmt("%.1f", c.wilson->low * 100) : "-",
                      c.wilson ? fmt("%.1f", c.wilson->high * 100) : "-"});
    }
  }
  const std::vector<std::string> header{"Model", "Cell", "k", "n", "Acc", "Low95", "High95"};
  std::string out;
  if (format == ReportFormat::Csv) {
    auto emit = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
      out += "\n";
    };
    emit(header);
    for (const auto& r : rows) emit(r);
    return out;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto emit = [&](const std::vector<std::string>& r) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - r[i].size(), ' ');
      line += (i ? "  " : "") + (i < 2 ? r[i] + pad : pad + r[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out;
}

std::string generator_cfg_text(const GenerateCommand& cmd, const GeneratorConfig& gen) {
  KeyValueConfig cfg;
  cfg.set("master_seed", std::to_string(gen.master_seed));
  cfg.set("stroop_fraction", fmt("%g", gen.stroop_fraction));
  cfg.set("mode", gen.sampling ? "sampling" : "quota");
  cfg.set("samples", std::to_string(gen.target_count()));
  cfg.set("registry", cmd.registry_path.filename().string());
  cfg.set("corpus", cmd.corpus_dir.filename().string());
  if (cmd.only_script) cfg.set("script", std::string(to_string(*cmd.only_script)));
  for (ScriptGroup g : kAllScriptGroups) {
    for (Difficulty d : kAllDifficulties) {
      cfg.set("quota." + std::string(to_string(g)) + "." + std::string(to_string(d)),
              std::to_string(gen.quotas.get(g, d)));
    }
  }
  return cfg.serialize();
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("TYPEPROBE_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return TYPEPROBE_DEFAULT_DATA_DIR;
}
std::filesystem::path default_registry_path() { return default_data_dir() / "registry.json"; }
std::filesystem::path default_eval_corpus_dir() { return default_data_dir() / "corpus" / "eval"; }
std::filesystem::path default_train_corpus_dir() { return default_data_dir() / "corpus" / "train"; }

GenerateSummary cmd_generate(const GenerateCommand& cmd) {
  if (cmd.out.empty()) throw ConfigError("generate needs an output directory (--out)");
  if (!(cmd.stroop_fraction >= 0 && cmd.stroop_fraction <= 1)) {
    throw ConfigError("--stroop-fraction must lie in [0, 1]");
  }
  const FontRegistry registry = load_registry_file(cmd.registry_path);
  const TextCorpus corpus = load_corpus(cmd.corpus_dir);

  GeneratorConfig gen;
  gen.master_seed = cmd.seed;
  gen.stroop_fraction = cmd.stroop_fraction;
  gen.output_dir = cmd.out;
  gen.threads = cmd.threads;
  if (cmd.only_script) gen.quotas = gen.quotas.only(*cmd.only_script);
  if (cmd.sample_count) {
    if (*cmd.sample_count < 0) throw ConfigError("--samples must be non-negative");
    gen.sampling = SamplingDistribution::from_quotas(gen.quotas, *cmd.sample_count);
  }
  if (cmd.frb_questions && registry.by_script(Script::Latin).size() < kFrbOptionCount) {
    throw ConfigError("--frb needs at least 15 Latin fonts in the registry");
  }

  // Dry run: every sample must be describable before anything is written.
  const auto plan = plan_samples(gen);
  for (std::size_t i = 0; i < plan.size(); ++i) describe_sample(gen, registry, corpus, plan, i);
  ensure_output_dir(cmd.out, cmd.force);

  GenerateSummary summary;
  const DatasetManifest manifest = generate_dataset(gen, registry, corpus);
  std::vector<Question> questions = questions_for_manifest(manifest, registry);
  if (cmd.frb_questions) {
    for (const auto& s : manifest.samples) {
      if (s.script != Script::Latin) continue;
      SeededRng rng = SeededRng::for_stream(manifest.master_seed, "frb", s.seed_index);
      questions.push_back(frb_style_family_question(s, registry, rng));
    }
  }
  std::filesystem::create_directories(cmd.out);
  write_text(cmd.out / kGeneratorConfigFile, generator_cfg_text(cmd, gen));
  summary.hash = write_dataset_files(cmd.out, manifest, questions);
  summary.samples = manifest.samples.size();
  summary.questions = questions.size();
  return summary;
}

PerturbSummary cmd_perturb(const PerturbCommand& cmd) {
  const PerturbationSpec spec = preset(cmd.preset, cmd.seed);
  const Dataset source = load_dataset(cmd.dataset);
  PerturbSummary summary;
  summary.out = cmd.out ? *cmd.out : std::filesystem::path(cmd.dataset.lexically_normal().string() + "-" + cmd.preset);
  if (std::filesystem::path(summary.out).lexically_normal() == cmd.dataset.lexically_normal()) {
    throw ConfigError("perturb output must differ from the source dataset");
  }
  ensure_output_dir(summary.out, cmd.force);
  DeriveResult derived = derive_dataset(source.manifest, source.root, spec, summary.out);

  std::set<std::string> kept;
  for (const auto& s : derived.manifest.samples) kept.insert(s.id);
  std::vector<Question> questions;
  for (const auto& q : source.questions) {
    if (kept.contains(q.sample_id)) questions.push_back(q);
  }
  KeyValueConfig cfg;
  if (std::filesystem::is_regular_file(source.root / kGeneratorConfigFile)) {
    cfg = KeyValueConfig::load(source.root / kGeneratorConfigFile);
  }
  cfg.set("master_seed", std::to_string(source.manifest.master_seed));
  cfg.set("perturbation", spec.describe());
  cfg.set("source_hash", source.hash);
  std::filesystem::create_directories(summary.out);
  write_text(summary.out / kGeneratorConfigFile, cfg.serialize());
  summary.hash = write_dataset_files(summary.out, derived.manifest, questions);
  summary.samples = derived.manifest.samples.size();
  summary.failures = std::move(derived.failures);
  return summary;
}

EvaluateSummary cmd_evaluate(const EvaluateCommand& cmd) {
  const Dataset dataset = load_dataset(cmd.dataset);
  EvaluateSummary summary;

  if (cmd.oracle) {
    const FontRegistry registry = load_registry_file(cmd.registry_path.value_or(default_registry_path()));
    const std::string run_id = cmd.run_id.value_or("pixel-oracle-" + std::string(to_string(*cmd.oracle)) + "-" +
                                                   dataset.hash.substr(0, 12));
    auto load = [&](const Sample& s) { return decode_png(read_file_bytes(dataset.image_path(s))); };
    summary.log = answer_manifest(dataset.questions, dataset.manifest.samples, load, registry, *cmd.oracle,
                                  dataset.hash, cmd.seed);
    summary.log.run_id = run_id;
    std::filesystem::create_directories(cmd.runs_dir);
    summary.log_path = cmd.runs_dir / (run_id + ".log");
    write_run_log(summary.log_path, summary.log);
  } else {
    if (!cmd.endpoints_file) throw ConfigError("evaluate needs --endpoints <file> or --oracle <mode>");
    const auto endpoints = load_endpoints(*cmd.endpoints_file);
    const ModelEndpoint* endpoint = nullptr;
    for (const auto& e : endpoints) {
      if (e.name == cmd.endpoint_name) endpoint = &e;
    }
    if (endpoint == nullptr) {
      std::string names;
      for (const auto& e : endpoints) names += " " + e.name;
      throw ConfigError("endpoint '" + cmd.endpoint_name + "' not found; configured:" + (names.empty() ? " none" : names));
    }
    EvaluateOptions options;
    options.api_key = resolve_api_key(*endpoint);
    options.run_id = cmd.run_id.value_or(endpoint->name + "-" + dataset.hash.substr(0, 12));
    summary.log_path = cmd.runs_dir / (options.run_id + ".log");
    if (std::filesystem::exists(summary.log_path)) {
      if (!cmd.resume) {
        throw ConfigError("run log " + summary.log_path.string() + " exists; pass --resume or a new --run-id");
      }
      options.resume = read_run_log(summary.log_path);
    } else if (cmd.resume) {
      throw ConfigError("nothing to resume: " + summary.log_path.string() + " does not exist");
    }
    options.log_path = summary.log_path;
    options.max_requests = cmd.max_requests;
    if (!cmd.quiet) {
      options.progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 25 == 0) std::fprintf(stderr, "\r%zu/%zu answered", done, total);
        if (done == total) std::fprintf(stderr, "\n");
      };
    }
    EvaluationJob job;
    job.questions = dataset.questions;
    job.manifest_hash = dataset.hash;
    job.load_image = [&](const Question& q) { return read_file_bytes(dataset.image_path(dataset.sample(q.sample_id))); };
    std::filesystem::create_directories(cmd.runs_dir);
    summary.log = evaluate_manifest(job, *endpoint, options);
  }
  std::set<std::string> answered;
  for (const auto& r : summary.log.records) {
    if (r.status == TransportStatus::Failed) ++summary.failed;
    answered.insert(r.question_id);
  }
  summary.failed += dataset.questions.size() - answered.size();
  return summary;
}

std::string cmd_report(const ReportCommand& cmd) {
  if (cmd.logs.empty()) throw ConfigError("report needs at least one run log");
  if (cmd.datasets.empty()) throw ConfigError("report needs --dataset");
  if (cmd.datasets.size() != 1 && cmd.datasets.size() != cmd.logs.size()) {
    throw ConfigError("give one --dataset for all logs or one per log");
  }
  std::vector<ModelSummary> models;
  std::set<std::string> hashes;
  std::map<std::string, Dataset> loaded;
  std::set<std::string> names;
  for (std::size_t i = 0; i < cmd.logs.size(); ++i) {
    const RunLog log = read_run_log(cmd.logs[i]);
    const auto& root = cmd.datasets.size() == 1 ? cmd.datasets[0] : cmd.datasets[i];
    auto it = loaded.find(root.string());
    if (it == loaded.end()) it = loaded.emplace(root.string(), load_dataset(root)).first;
    const Dataset& d = it->second;
    if (log.manifest_hash != d.hash) {
      throw ConfigError("run log " + cmd.logs[i].string() + " was made on dataset " + log.manifest_hash +
                        ", not " + d.hash + " (" + root.string() + ")");
    }
    hashes.insert(log.manifest_hash);
    ModelSummary m;
    m.model = names.contains(log.endpoint) ? log.run_id : log.endpoint;
    names.insert(m.model);
    m.records = score(log, d.questions, d.manifest.samples);
    models.push_back(std::move(m));
  }
  if (hashes.size() > 1 && !cmd.allow_mixed) {
    throw ConfigError("run logs come from different datasets; pass --allow-mixed to report them together");
  }

  std::string out = render_report(models, cmd.format);
  for (Grouping g : cmd.groupings) {
    out += "\n# " + std::string(to_string(g)) + "\n" + render_cells(models, g, cmd.format);
  }
  if (cmd.size_buckets) out += "\n# size buckets\n" + render_size_bucket_report(models);
  for (Property p : cmd.confusion) {
    for (const auto& m : models) {
      out += "\n# confusion " + std::string(to_string(p)) + " " + m.model + "\n" +
             render_confusion(confusion_matrix(m.records, p));
    }
  }
  if (cmd.compare) {
    const auto [a, b] = *cmd.compare;
    if (a >= models.size() || b >= models.size()) throw ConfigError("--compare index out of range");
    const McNemarResult r = mcnemar(models[a].records, models[b].records);
    out += "\n# mcnemar " + models[a].model + " vs " + models[b].model + "\n";
    out += "b=" + std::to_string(r.b) + " c=" + std::to_string(r.c) +
           " statistic=" + (r.statistic ? fmt("%.4f", *r.statistic) : std::string("-")) +
           " p=" + fmt("%.6g", r.p_value) + " method=" + r.method + "\n";
  }
  return out;
}

std::string cmd_parse(const std::filesystem::path& log_path, const std::filesystem::path& dataset_root) {
  const RunLog log = read_run_log(log_path);
  const Dataset d = load_dataset(dataset_root);
  if (log.manifest_hash != d.hash) throw ConfigError("run log does not belong to dataset " + dataset_root.string());
  std::string out;
  for (const auto& r : score(log, d.questions, d.manifest.samples)) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["property"] = to_string(r.property);
    j["choice"] = r.choice ? nlohmann::ordered_json(std::string(1, option_letter(*r.choice))) : nlohmann::ordered_json();
    j["step"] = to_string(r.step);
    j["correct"] = r.correct;
    j["truth"] = std::string(1, option_letter(r.truth_index));
    j["parser_version"] = kParserVersion;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace typeprobe
