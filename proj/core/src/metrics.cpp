#include "typeprobe/metrics.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "typeprobe/color.hpp"
#include "typeprobe/error.hpp"

namespace typeprobe {

namespace {

constexpr double kZ95 = 1.959964;

struct Column {
  std::string_view header;
  Grouping grouping;
  std::string_view key;
};

constexpr std::array<Column, 11> kReportColumns{{
    {"Family", Grouping::Property, "family"},
    {"Size", Grouping::Property, "size"},
    {"Style", Grouping::Property, "style"},
    {"Color", Grouping::Property, "color"},
    {"Overall", Grouping::Overall, "overall"},
    {"Easy", Grouping::Difficulty, "easy"},
    {"Med", Grouping::Difficulty, "medium"},
    {"Hard", Grouping::Difficulty, "hard"},
    {"Latin", Grouping::ScriptGroup, "latin"},
    {"CJK", Grouping::ScriptGroup, "cjk"},
    {"Other", Grouping::ScriptGroup, "other"},
}};

std::vector<std::string> grouping_keys(Grouping g) {
  std::vector<std::string> keys;
  switch (g) {
    case Grouping::Overall: keys.emplace_back("overall"); break;
    case Grouping::Property:
      for (auto p : kAllProperties) keys.emplace_back(to_string(p));
      break;
    case Grouping::Difficulty:
      for (auto d : kAllDifficulties) keys.emplace_back(to_string(d));
      break;
    case Grouping::ScriptGroup:
      for (auto s : kAllScriptGroups) keys.emplace_back(to_string(s));
      break;
    case Grouping::Script:
      for (auto s : kAllScripts) keys.emplace_back(to_string(s));
      break;
    case Grouping::SizeBucket:
      for (auto b : kAllSizeBuckets) keys.emplace_back(to_string(b));
      break;
    case Grouping::PropertyByDifficulty:
      for (auto p : kAllProperties) {
        for (auto d : kAllDifficulties) keys.push_back(std::string(to_string(p)) + "/" + std::string(to_string(d)));
      }
      break;
    case Grouping::PropertyByScriptGroup:
      for (auto p : kAllProperties) {
        for (auto s : kAllScriptGroups) keys.push_back(std::string(to_string(p)) + "/" + std::string(to_string(s)));
      }
      break;
  }
  return keys;
}

std::optional<std::string> key_of(const EvalRecord& r, Grouping g) {
  const std::string p(to_string(r.property));
  switch (g) {
    case Grouping::Overall: return "overall";
    case Grouping::Property: return p;
    case Grouping::Difficulty: return std::string(to_string(r.difficulty));
    case Grouping::ScriptGroup: return std::string(to_string(script_group(r.script)));
    case Grouping::Script: return std::string(to_string(r.script));
    case Grouping::SizeBucket:
      if (r.property != Property::Size || !r.size_bucket) return std::nullopt;
      return std::string(to_string(*r.size_bucket));
    case Grouping::PropertyByDifficulty: return p + "/" + std::string(to_string(r.difficulty));
    case Grouping::PropertyByScriptGroup: return p + "/" + std::string(to_string(script_group(r.script)));
  }
  return std::nullopt;
}

std::string pct1(const AccuracyCell& c) {
  if (!c.accuracy) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", *c.accuracy * 100.0);
  return buf;
}

std::string parse_fail_pct(const std::vector<EvalRecord>& records) {
  if (records.empty()) return "-";
  const auto failed = std::count_if(records.begin(), records.end(),
                                    [](const EvalRecord& r) { return r.step == ParseStep::Failed; });
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * static_cast<double>(failed) / static_cast<double>(records.size()));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_plain(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string pad(width[i] - cells[i].size(), ' ');
      if (i > 0) out += "  ";
      out += i == 0 ? cells[i] + pad : pad + cells[i];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

}  // namespace

std::vector<EvalRecord> score(const RunLog& log, const std::vector<Question>& questions,
                              const std::vector<Sample>& samples) {
  std::map<std::string, const Sample*, std::less<>> by_sample;
  for (const auto& s : samples) by_sample.emplace(s.id, &s);
  std::map<std::string, const AnswerRecord*, std::less<>> answers;
  std::set<std::string, std::less<>> known;
  for (const auto& q : questions) known.insert(q.id);
  for (const auto& r : log.records) {
    if (!known.contains(r.question_id)) {
      throw Error("run log answers unknown question " + r.question_id);
    }
    answers[r.question_id] = &r;
  }

  std::vector<EvalRecord> out;
  out.reserve(questions.size());
  for (const auto& q : questions) {
    auto s = by_sample.find(q.sample_id);
    if (s == by_sample.end()) throw Error("question " + q.id + " references unknown sample " + q.sample_id);
    const Sample& sample = *s->second;
    EvalRecord r;
    r.question_id = q.id;
    r.property = q.property;
    r.difficulty = sample.difficulty;
    r.script = sample.script;
    if (q.property == Property::Size) r.size_bucket = size_bucket(sample.spec.size_pt);
    r.truth_index = q.correct_index;
    r.truth_label = q.options.at(q.correct_index);
    r.chance_baseline = q.chance_baseline;
    if (auto a = answers.find(q.id); a != answers.end() && a->second->status == TransportStatus::Ok) {
      const ParseResult parsed = parse_answer(a->second->raw_response, q.options);
      r.choice = parsed.choice;
      r.step = parsed.step;
    }
    if (r.choice) r.predicted_label = q.options.at(*r.choice);
    r.correct = r.choice && *r.choice == r.truth_index;
    out.push_back(std::move(r));
  }
  return out;
}

Interval wilson_interval(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) throw Error("wilson interval needs n >= 1");
  if (k > n) throw Error("wilson interval needs k <= n");
  if (!(confidence > 0 && confidence < 1)) throw Error("confidence must lie in (0, 1)");
  const double z = std::abs(confidence - 0.95) < 1e-12
                       ? kZ95
                       : boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::Overall: return "overall";
    case Grouping::Property: return "property";
    case Grouping::Difficulty: return "difficulty";
    case Grouping::ScriptGroup: return "script_group";
    case Grouping::Script: return "script";
    case Grouping::SizeBucket: return "size_bucket";
    case Grouping::PropertyByDifficulty: return "property_by_difficulty";
    case Grouping::PropertyByScriptGroup: return "property_by_script_group";
  }
  return "overall";
}

Grouping parse_grouping(std::string_view text) {
  std::string valid;
  for (Grouping g : {Grouping::Overall, Grouping::Property, Grouping::Difficulty, Grouping::ScriptGroup,
                     Grouping::Script, Grouping::SizeBucket, Grouping::PropertyByDifficulty,
                     Grouping::PropertyByScriptGroup}) {
    if (to_string(g) == text) return g;
    valid += (valid.empty() ? "" : ", ") + std::string(to_string(g));
  }
  throw ConfigError("unknown grouping: " + std::string(text) + " (valid: " + valid + ")");
}

std::vector<AccuracyCell> aggregate(const std::vector<EvalRecord>& records, Grouping grouping) {
  std::vector<AccuracyCell> cells;
  std::map<std::string, std::size_t, std::less<>> index;
  for (auto& key : grouping_keys(grouping)) {
    index.emplace(key, cells.size());
    AccuracyCell cell;
    cell.key = key;
    cells.push_back(std::move(cell));
  }
  for (const auto& r : records) {
    const auto key = key_of(r, grouping);
    if (!key) continue;
    AccuracyCell& c = cells[index.at(*key)];
    ++c.n;
    if (r.correct) ++c.k;
    if (r.step == ParseStep::Failed) ++c.parse_failures;
  }
  for (auto& c : cells) {
    if (c.n == 0) continue;
    c.accuracy = static_cast<double>(c.k) / static_cast<double>(c.n);
    c.wilson = wilson_interval(c.k, c.n);
  }
  return cells;
}

double binomial_two_sided_half(std::size_t k, std::size_t n) {
  if (k > n) throw Error("binomial test needs k <= n");
  if (n == 0) return 1.0;
  const std::size_t tail = std::min(k, n - k);
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  double sum = 0;
  for (std::size_t i = 0; i <= tail; ++i) {
    const double log_choose = std::lgamma(double(n) + 1) - std::lgamma(double(i) + 1) - std::lgamma(double(n - i) + 1);
    sum += std::exp(log_choose + log_half_n);
  }
  return std::min(1.0, 2.0 * sum);
}

double chi_square1_survival(double x) {
  if (x <= 0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b) {
  std::map<std::string_view, bool> first;
  for (const auto& r : a) first[r.question_id] = r.correct;
  if (first.size() != a.size() || a.size() != b.size()) {
    throw Error("McNemar needs both runs over the same question set");
  }
  McNemarResult out;
  for (const auto& r : b) {
    auto it = first.find(r.question_id);
    if (it == first.end()) throw Error("McNemar: question " + r.question_id + " missing from the first run");
    if (it->second && !r.correct) ++out.b;
    if (!it->second && r.correct) ++out.c;
  }
  const std::size_t discordant = out.b + out.c;
  if (discordant == 0) {
    out.method = "none";
    out.p_value = 1.0;
  } else if (discordant < kMcNemarExactBelow) {
    out.method = "exact-binomial";
    out.p_value = binomial_two_sided_half(out.b, discordant);
  } else {
    out.method = "chi2-cc";
    const double diff = std::abs(static_cast<double>(out.b) - static_cast<double>(out.c)) - 1.0;
    out.statistic = diff * diff / static_cast<double>(discordant);
    out.p_value = chi_square1_survival(*out.statistic);
  }
  return out;
}

ConfusionMatrix confusion_matrix(const std::vector<EvalRecord>& records, Property property) {
  ConfusionMatrix m;
  switch (property) {
    case Property::Style:
      for (auto s : kAllStyles) m.labels.emplace_back(style_display_name(s));
      break;
    case Property::Size:
      for (int z : kPointSizes) m.labels.push_back(size_display_name(z));
      break;
    case Property::Color:
      for (const auto& c : kTextPalette) m.labels.emplace_back(c.name);
      break;
    case Property::Family: {
      std::set<std::string> names;
      for (const auto& r : records) {
        if (r.property != property) continue;
        names.insert(r.truth_label);
        if (r.predicted_label) names.insert(*r.predicted_label);
      }
      m.labels.assign(names.begin(), names.end());
      break;
    }
  }
  const std::size_t n = m.labels.size();
  m.counts.assign(n, std::vector<std::size_t>(n + 1, 0));
  auto idx = [&](const std::string& label) -> std::optional<std::size_t> {
    auto it = std::find(m.labels.begin(), m.labels.end(), label);
    if (it == m.labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - m.labels.begin());
  };
  for (const auto& r : records) {
    if (r.property != property) continue;
    const auto row = idx(r.truth_label);
    if (!row) continue;
    const auto col = r.predicted_label ? idx(*r.predicted_label) : std::nullopt;
    ++m.counts[*row][col ? *col : n];
  }
  m.proportions.assign(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t total = 0;
    for (auto c : m.counts[i]) total += c;
    if (total == 0) continue;
    for (std::size_t j = 0; j <= n; ++j) {
      m.proportions[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(total);
    }
  }
  return m;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "table" || text == "plain") return ReportFormat::PlainTable;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(text) + "' (table, csv, json)");
}

std::string render_report(const std::vector<ModelSummary>& models, ReportFormat format) {
  std::vector<std::string> header{"Model"};
  for (const auto& c : kReportColumns) header.emplace_back(c.header);
  header.emplace_back("ParseFail");

  if (format == ReportFormat::Json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& m : models) {
      nlohmann::ordered_json row;
      row["model"] = m.model;
      row["n"] = m.records.size();
      nlohmann::ordered_json cells = nlohmann::ordered_json::object();
      for (const auto& col : kReportColumns) {
        for (const auto& cell : aggregate(m.records, col.grouping)) {
          if (cell.key != col.key) continue;
          nlohmann::ordered_json j;
          j["k"] = cell.k;
          j["n"] = cell.n;
          j["accuracy"] = cell.accuracy ? nlohmann::ordered_json(*cell.accuracy) : nlohmann::ordered_json();
          j["wilson_low"] = cell.wilson ? nlohmann::ordered_json(cell.wilson->low) : nlohmann::ordered_json();
          j["wilson_high"] = cell.wilson ? nlohmann::ordered_json(cell.wilson->high) : nlohmann::ordered_json();
          j["parse_failures"] = cell.parse_failures;
          cells[std::string(col.header)] = std::move(j);
        }
      }
      row["cells"] = std::move(cells);
      const auto failed = std::count_if(m.records.begin(), m.records.end(),
                                        [](const EvalRecord& r) { return r.step == ParseStep::Failed; });
      row["parse_failure_rate"] = m.records.empty() ? nlohmann::ordered_json()
                                                    : nlohmann::ordered_json(double(failed) / double(m.records.size()));
      row["parser_version"] = kParserVersion;
      doc.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& m : models) {
    std::vector<std::string> row{m.model};
    for (const auto& col : kReportColumns) {
      for (const auto& cell : aggregate(m.records, col.grouping)) {
        if (cell.key == col.key) row.push_back(pct1(cell));
      }
    }
    row.push_back(parse_fail_pct(m.records));
    rows.push_back(std::move(row));
  }
  if (format == ReportFormat::PlainTable) return render_plain(header, rows);

  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ",";
      out += csv_field(cells[i]);
    }
    out += "\n";
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out;
}

std::string render_size_bucket_report(const std::vector<ModelSummary>& models) {
  std::vector<std::string> header{"Model", "S", "M", "L", "XL"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : models) {
    std::vector<std::string> row{m.model};
    for (const auto& cell : aggregate(m.records, Grouping::SizeBucket)) row.push_back(pct1(cell));
    rows.push_back(std::move(row));
  }
  return render_plain(header, rows);
}

std::string render_confusion(const ConfusionMatrix& matrix) {
  std::vector<std::string> header{"Truth \\ Pred"};
  for (const auto& l : matrix.labels) header.push_back(l);
  header.emplace_back("Failed");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
    std::vector<std::string> row{matrix.labels[i]};
    for (double p : matrix.proportions[i]) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.3f", p);
      row.emplace_back(buf);
    }
    rows.push_back(std::move(row));
  }
  return render_plain(header, rows);
}

}  // namespace typeprobe
