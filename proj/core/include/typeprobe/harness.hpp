#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "typeprobe/dataset.hpp"
#include "typeprobe/metrics.hpp"
#include "typeprobe/oracle.hpp"
#include "typeprobe/run_log.hpp"

namespace typeprobe {

/// Defaults for data files shipped with the project; the TYPEPROBE_DATA_DIR
/// environment variable overrides the compiled-in location.
std::filesystem::path default_data_dir();
std::filesystem::path default_registry_path();
std::filesystem::path default_eval_corpus_dir();
std::filesystem::path default_train_corpus_dir();

struct GenerateCommand {
  std::filesystem::path registry_path = default_registry_path();
  std::filesystem::path corpus_dir = default_eval_corpus_dir();
  std::filesystem::path out;
  std::uint64_t seed = 42;
  double stroop_fraction = 0;
  std::optional<ScriptGroup> only_script;
  std::optional<int> sample_count;  // switches to sampling mode
  bool frb_questions = false;
  bool force = false;
  unsigned threads = 0;
};

struct GenerateSummary {
  std::size_t samples = 0;
  std::size_t questions = 0;
  std::string hash;
};

/// Generates images, both manifests, generator.cfg and dataset.hash. All
/// configuration is validated before anything is written.
GenerateSummary cmd_generate(const GenerateCommand& cmd);

struct PerturbCommand {
  std::filesystem::path dataset;
  std::string preset;
  std::optional<std::filesystem::path> out;  // default <dataset>-<preset>
  std::uint64_t seed = 0;
  bool force = false;
};

struct PerturbSummary {
  std::filesystem::path out;
  std::size_t samples = 0;
  std::vector<std::string> failures;
  std::string hash;
};

PerturbSummary cmd_perturb(const PerturbCommand& cmd);

struct EvaluateCommand {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> endpoints_file;
  std::string endpoint_name;
  std::optional<OracleMode> oracle;
  std::filesystem::path runs_dir = "runs";
  std::optional<std::string> run_id;
  bool resume = false;
  std::optional<std::size_t> max_requests;
  std::optional<std::filesystem::path> registry_path;
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct EvaluateSummary {
  std::filesystem::path log_path;
  RunLog log;
  std::size_t failed = 0;
};

EvaluateSummary cmd_evaluate(const EvaluateCommand& cmd);

struct ReportCommand {
  std::vector<std::filesystem::path> logs;
  std::vector<std::filesystem::path> datasets;
  ReportFormat format = ReportFormat::PlainTable;
  std::vector<Grouping> groupings;
  bool size_buckets = false;
  std::vector<Property> confusion;
  std::optional<std::pair<std::size_t, std::size_t>> compare;  // indices into logs
  bool allow_mixed = false;
};

std::string cmd_report(const ReportCommand& cmd);

/// Re-parses a raw log against its dataset; JSON lines of scored records,
/// each stamped with the parser version.
std::string cmd_parse(const std::filesystem::path& log_path, const std::filesystem::path& dataset);

}  // namespace typeprobe
