#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typeprobe/mcq.hpp"
#include "typeprobe/run_log.hpp"

namespace typeprobe {

/// A chat-completions style multimodal endpoint. The API key is never stored;
/// only the name of the environment variable holding it.
struct ModelEndpoint {
  std::string name;
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;     // request "model" field; defaults to name
  std::string api_key_env;
  double timeout_s = 60;
  int max_retries = 3;
  int max_in_flight = 4;
  int backoff_initial_ms = 500;

  /// Throws ConfigError on an empty name, bad URL or max_in_flight < 1.
  void validate() const;
};

/// Parses an INI-style endpoint file: one [name] section per endpoint with
/// keys base_url, model, key_env, timeout, retries, concurrency, backoff_ms.
std::vector<ModelEndpoint> parse_endpoints(std::string_view text);
std::vector<ModelEndpoint> load_endpoints(const std::filesystem::path& path);

/// Reads the endpoint's key variable. Throws ConfigError
/// "environment variable <NAME> not set". Endpoints without key_env get "".
std::string resolve_api_key(const ModelEndpoint& endpoint);

/// The evaluation prompt. For four options this is the reference template
/// verbatim; other counts enumerate letters A.. and adapt the final
/// instruction ("(A or B)", "(A, B, or C)", ...).
std::string build_prompt(const Question& question);

/// Serialized request body: temperature 0, max_tokens 100, top_p 1, zero
/// penalties, image as a base64 PNG data URL followed by the prompt text.
std::string build_request_body(const ModelEndpoint& endpoint, std::span<const std::uint8_t> png,
                               std::string_view prompt);

/// Text content of the first choice of a chat-completions response.
std::string extract_response_text(std::string_view response_body);

struct AskResult {
  std::string raw_response;
  TransportStatus status = TransportStatus::Ok;
  int http_status = 0;
  int attempts = 0;
  double latency_ms = 0;
  std::string error;
};

/// One request with retries: transport errors, 429 and 5xx back off
/// exponentially up to max_retries; other 4xx fail immediately.
AskResult ask(const ModelEndpoint& endpoint, const std::string& api_key,
              std::span<const std::uint8_t> png, std::string_view prompt);

struct EvaluationJob {
  std::vector<Question> questions;
  std::string manifest_hash;
  /// PNG bytes for a question's sample.
  std::function<std::vector<std::uint8_t>(const Question&)> load_image;
};

struct EvaluateOptions {
  std::optional<RunLog> resume;
  /// When set, records are appended here as they complete (in question order)
  /// and the file is compacted at the end.
  std::optional<std::filesystem::path> log_path;
  std::string api_key;
  std::string run_id;
  /// Stop issuing new requests after this many (simulates an interruption).
  std::optional<std::size_t> max_requests;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Answers every question not already answered in options.resume, with at
/// most endpoint.max_in_flight concurrent requests. A resume log whose
/// manifest hash differs throws ConfigError before any request is sent.
RunLog evaluate_manifest(const EvaluationJob& job, const ModelEndpoint& endpoint,
                         const EvaluateOptions& options);

}  // namespace typeprobe
