#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/answer_parser.hpp"
#include "typeprobe/mcq.hpp"
#include "typeprobe/run_log.hpp"
#include "typeprobe/sample_generator.hpp"
#include "typeprobe/types.hpp"

namespace typeprobe {

/// One answer joined to ground truth.
struct EvalRecord {
  std::string question_id;
  Property property = Property::Family;
  Difficulty difficulty = Difficulty::Easy;
  Script script = Script::Latin;
  std::optional<SizeBucket> size_bucket;  // size questions only
  std::size_t truth_index = 0;
  std::optional<std::size_t> choice;
  ParseStep step = ParseStep::Failed;
  bool correct = false;
  std::string truth_label;
  std::optional<std::string> predicted_label;
  double chance_baseline = 0.25;
};

/// Joins a run log to the question and sample manifests and parses every raw
/// response. Questions absent from the log score as Failed; a log record
/// naming an unknown question throws Error.
std::vector<EvalRecord> score(const RunLog& log, const std::vector<Question>& questions,
                              const std::vector<Sample>& samples);

struct Interval {
  double low = 0;
  double high = 0;
};

/// Wilson score interval. z = 1.959964 at 95%; other levels use the normal
/// quantile. Throws Error when n == 0 or k > n.
Interval wilson_interval(std::size_t k, std::size_t n, double confidence = 0.95);

struct AccuracyCell {
  std::string key;
  std::size_t k = 0;
  std::size_t n = 0;
  std::optional<double> accuracy;  // absent when n == 0
  std::optional<Interval> wilson;
  std::size_t parse_failures = 0;
};

enum class Grouping {
  Overall,
  Property,
  Difficulty,
  ScriptGroup,
  Script,
  SizeBucket,
  PropertyByDifficulty,
  PropertyByScriptGroup,
};

std::string_view to_string(Grouping g);
Grouping parse_grouping(std::string_view text);

/// Cells in a fixed key order; every key of the grouping is present, with
/// n == 0 for empty ones. Cell populations partition the records (SizeBucket
/// covers size questions only).
std::vector<AccuracyCell> aggregate(const std::vector<EvalRecord>& records, Grouping grouping);

struct McNemarResult {
  std::size_t b = 0;  // only the first run correct
  std::size_t c = 0;  // only the second run correct
  std::optional<double> statistic;  // continuity-corrected chi-square, large-sample branch
  double p_value = 1.0;
  std::string method;  // "chi2-cc", "exact-binomial" or "none"
};

inline constexpr std::size_t kMcNemarExactBelow = 25;

/// Paired comparison over identical question sets; throws Error otherwise.
/// b + c >= 25: (|b-c|-1)^2/(b+c) against chi-square(1); 0 < b + c < 25:
/// two-sided exact binomial on (b, b+c, 1/2); b + c == 0: p = 1.
McNemarResult mcnemar(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b);

/// Two-sided exact binomial p-value for k successes out of n at p = 1/2.
double binomial_two_sided_half(std::size_t k, std::size_t n);
/// Upper tail of chi-square with one degree of freedom.
double chi_square1_survival(double x);

struct ConfusionMatrix {
  std::vector<std::string> labels;  // rows (truth) and the first columns
  /// counts[i][j]: truth labels[i], predicted labels[j]; last column Failed.
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> proportions;  // row-normalized; empty rows stay 0
};

ConfusionMatrix confusion_matrix(const std::vector<EvalRecord>& records, Property property);

/// One row of the main results table.
struct ModelSummary {
  std::string model;
  std::vector<EvalRecord> records;
};

enum class ReportFormat { PlainTable, Csv, Json };
ReportFormat parse_report_format(std::string_view text);

/// Columns: Model, Family, Size, Style, Color, Overall, Easy, Med, Hard,
/// Latin, CJK, Other, ParseFail. Plain and CSV accuracies use one decimal;
/// JSON carries full precision, Wilson bounds and counts.
std::string render_report(const std::vector<ModelSummary>& models, ReportFormat format);

/// Size-bucket accuracy (S/M/L/XL) per model, plain table.
std::string render_size_bucket_report(const std::vector<ModelSummary>& models);

std::string render_confusion(const ConfusionMatrix& matrix);

}  // namespace typeprobe
