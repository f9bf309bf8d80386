#include "typeprobe/run_log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>

#include "json.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/raster.hpp"

namespace typeprobe {

using nlohmann::ordered_json;

namespace {

std::string_view status_name(TransportStatus s) { return s == TransportStatus::Ok ? "ok" : "failed"; }

TransportStatus parse_status(const std::string& s) {
  if (s == "ok") return TransportStatus::Ok;
  if (s == "failed") return TransportStatus::Failed;
  throw LoadError("unknown transport status: " + s);
}

}  // namespace

const AnswerRecord* RunLog::find(std::string_view question_id) const {
  for (const auto& r : records) {
    if (r.question_id == question_id) return &r;
  }
  return nullptr;
}

std::string run_log_header_line(const RunLog& log) {
  ordered_json j;
  j["type"] = "run";
  j["run_id"] = log.run_id;
  j["endpoint"] = log.endpoint;
  j["manifest_hash"] = log.manifest_hash;
  j["started"] = log.started;
  return j.dump() + "\n";
}

std::string answer_record_line(const AnswerRecord& r) {
  ordered_json j;
  j["type"] = "answer";
  j["question_id"] = r.question_id;
  j["raw_response"] = r.raw_response;
  j["latency_ms"] = r.latency_ms;
  j["status"] = status_name(r.status);
  j["http_status"] = r.http_status;
  j["attempts"] = r.attempts;
  j["error"] = r.error;
  // Model output is arbitrary text; never let invalid UTF-8 abort the log.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string run_log_finish_line(const RunLog& log) {
  ordered_json j;
  j["type"] = "finish";
  j["finished"] = log.finished;
  j["records"] = log.records.size();
  return j.dump() + "\n";
}

std::string serialize_run_log(const RunLog& log) {
  std::string out = run_log_header_line(log);
  for (const auto& r : log.records) out += answer_record_line(r);
  if (!log.finished.empty()) out += run_log_finish_line(log);
  return out;
}

RunLog parse_run_log(std::string_view text) {
  RunLog log;
  bool have_header = false;
  std::map<std::string, std::size_t, std::less<>> index;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool last = end == std::string_view::npos;
    if (last) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception&) {
      // A torn final line is what an interrupted writer leaves behind.
      if (last) break;
      throw LoadError("run log line " + std::to_string(line_no) + " is not valid JSON");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "run") {
        if (!have_header) {
          log.run_id = j.at("run_id").get<std::string>();
          log.endpoint = j.at("endpoint").get<std::string>();
          log.manifest_hash = j.at("manifest_hash").get<std::string>();
          log.started = j.value("started", "");
          have_header = true;
        }
      } else if (type == "answer") {
        AnswerRecord r;
        r.question_id = j.at("question_id").get<std::string>();
        r.raw_response = j.at("raw_response").get<std::string>();
        r.latency_ms = j.value("latency_ms", 0.0);
        r.status = parse_status(j.value("status", "ok"));
        r.http_status = j.value("http_status", 0);
        r.attempts = j.value("attempts", 0);
        r.error = j.value("error", "");
        if (auto it = index.find(r.question_id); it != index.end()) {
          log.records[it->second] = std::move(r);
        } else {
          index.emplace(r.question_id, log.records.size());
          log.records.push_back(std::move(r));
        }
        log.finished.clear();
      } else if (type == "finish") {
        log.finished = j.value("finished", "");
      } else {
        throw LoadError("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& ex) {
      throw LoadError("run log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  if (!have_header) throw LoadError("run log has no run header");
  return log;
}

RunLog read_run_log(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const Error&) {
    throw LoadError("cannot read run log " + path.string());
  }
  try {
    return parse_run_log(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const LoadError& ex) {
    throw LoadError(path.string() + ": " + ex.what());
  }
}

void write_run_log(const std::filesystem::path& path, const RunLog& log) {
  const std::string text = serialize_run_log(log);
  auto tmp = path;
  tmp += ".tmp";
  write_file_bytes(tmp, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  std::filesystem::rename(tmp, path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

}  // namespace typeprobe
