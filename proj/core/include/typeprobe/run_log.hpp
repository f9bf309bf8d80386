#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace typeprobe {

enum class TransportStatus { Ok, Failed };

/// One model answer, stored verbatim. Parsing happens later.
struct AnswerRecord {
  std::string question_id;
  std::string raw_response;
  double latency_ms = 0;
  TransportStatus status = TransportStatus::Ok;
  int http_status = 0;
  int attempts = 0;
  std::string error;

  friend bool operator==(const AnswerRecord&, const AnswerRecord&) = default;
};

/// JSON-lines file: a "run" header, "answer" records in question order, and a
/// "finish" trailer once the run completes.
struct RunLog {
  std::string run_id;
  std::string endpoint;
  std::string manifest_hash;
  std::string started;
  std::string finished;  // empty while incomplete
  std::vector<AnswerRecord> records;

  const AnswerRecord* find(std::string_view question_id) const;
};

std::string run_log_header_line(const RunLog& log);
std::string answer_record_line(const AnswerRecord& record);
std::string run_log_finish_line(const RunLog& log);
std::string serialize_run_log(const RunLog& log);

/// Later records for the same question replace earlier ones, so an appended
/// resume segment supersedes failed attempts.
RunLog parse_run_log(std::string_view text);
RunLog read_run_log(const std::filesystem::path& path);
void write_run_log(const std::filesystem::path& path, const RunLog& log);

/// ISO-8601 UTC timestamp with milliseconds.
std::string utc_timestamp();

}  // namespace typeprobe
