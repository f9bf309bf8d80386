#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "typeprobe/vlm_client.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "typeprobe/answer_parser.hpp"
#include "typeprobe/error.hpp"
#include "typeprobe/hashing.hpp"
#include "typeprobe/kv_config.hpp"

namespace typeprobe {

using nlohmann::ordered_json;

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string prefix;  // no trailing slash
};

ParsedUrl parse_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url lacks a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("base_url must be http or https: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  if (out.scheme_host_port.size() <= scheme_end + 3) throw ConfigError("base_url lacks a host: " + url);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

std::string letter_list(std::size_t n) {
  if (n == 2) return "A or B";
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += ", ";
    if (i + 1 == n) out += "or ";
    out += option_letter(i);
  }
  return out;
}

bool retryable(int status) { return status == 429 || status >= 500; }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

void ModelEndpoint::validate() const {
  if (name.empty()) throw ConfigError("endpoint name must not be empty");
  if (max_in_flight < 1) throw ConfigError("endpoint " + name + ": concurrency must be >= 1");
  if (max_retries < 0) throw ConfigError("endpoint " + name + ": retries must be >= 0");
  if (!(timeout_s > 0)) throw ConfigError("endpoint " + name + ": timeout must be positive");
  if (backoff_initial_ms < 0) throw ConfigError("endpoint " + name + ": backoff_ms must be >= 0");
  parse_base_url(base_url);
}

std::vector<ModelEndpoint> parse_endpoints(std::string_view text) {
  const auto cfg = KeyValueConfig::parse(text);
  std::vector<ModelEndpoint> out;
  for (const auto& section : cfg.sections()) {
    ModelEndpoint e;
    e.name = section;
    const auto key = [&](const char* k) { return section + "." + k; };
    e.base_url = cfg.get_or(key("base_url"), "");
    e.model = cfg.get_or(key("model"), section);
    e.api_key_env = cfg.get_or(key("key_env"), "");
    if (auto v = cfg.get_double(key("timeout"))) e.timeout_s = *v;
    if (auto v = cfg.get_int(key("retries"))) e.max_retries = static_cast<int>(*v);
    if (auto v = cfg.get_int(key("concurrency"))) e.max_in_flight = static_cast<int>(*v);
    if (auto v = cfg.get_int(key("backoff_ms"))) e.backoff_initial_ms = static_cast<int>(*v);
    e.validate();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ModelEndpoint> load_endpoints(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read endpoint file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_endpoints(text);
}

std::string resolve_api_key(const ModelEndpoint& endpoint) {
  if (endpoint.api_key_env.empty()) return {};
  const char* value = std::getenv(endpoint.api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("environment variable " + endpoint.api_key_env + " not set");
  }
  return value;
}

std::string build_prompt(const Question& question) {
  const std::size_t n = question.options.size();
  if (n < 2 || n > 26) throw Error("questions need 2-26 options, got " + std::to_string(n));
  std::string out = "Look at this image and answer the following\nquestion.\n\n";
  out += "Question: " + question.prompt + "\n\n";
  out += "Options:\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += option_letter(i);
    out += ". " + question.options[i] + "\n";
  }
  out += "\nRespond with only the letter (" + letter_list(n) + ")\nof your answer.";
  return out;
}

std::string build_request_body(const ModelEndpoint& endpoint, std::span<const std::uint8_t> png,
                               std::string_view prompt) {
  ordered_json image;
  image["type"] = "image_url";
  image["image_url"]["url"] = "data:image/png;base64," + base64_encode(png);
  ordered_json text;
  text["type"] = "text";
  text["text"] = prompt;

  ordered_json message;
  message["role"] = "user";
  message["content"] = ordered_json::array({image, text});

  ordered_json body;
  body["model"] = endpoint.model.empty() ? endpoint.name : endpoint.model;
  body["messages"] = ordered_json::array({message});
  body["temperature"] = 0;
  body["max_tokens"] = 100;
  body["top_p"] = 1.0;
  body["frequency_penalty"] = 0;
  body["presence_penalty"] = 0;
  return body.dump();
}

std::string extract_response_text(std::string_view response_body) {
  ordered_json j;
  try {
    j = ordered_json::parse(response_body);
  } catch (const nlohmann::json::exception&) {
    throw Error("response is not JSON");
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    if (content.is_string()) return content.get<std::string>();
    // Some servers return content parts.
    std::string out;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") out += part.value("text", "");
    }
    return out;
  } catch (const nlohmann::json::exception&) {
    throw Error("response lacks choices[0].message.content");
  }
}

AskResult ask(const ModelEndpoint& endpoint, const std::string& api_key,
              std::span<const std::uint8_t> png, std::string_view prompt) {
  const ParsedUrl url = parse_base_url(endpoint.base_url);
  const std::string body = build_request_body(endpoint, png, prompt);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  httplib::Client client(url.scheme_host_port);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(endpoint.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  AskResult result;
  result.status = TransportStatus::Failed;
  const auto start = std::chrono::steady_clock::now();
  const int max_attempts = endpoint.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    auto res = client.Post(url.prefix + "/chat/completions", headers, body, "application/json");
    bool retry = false;
    if (!res) {
      result.http_status = 0;
      result.error = "transport: " + httplib::to_string(res.error());
      retry = true;
    } else {
      result.http_status = res->status;
      if (res->status >= 200 && res->status < 300) {
        try {
          result.raw_response = extract_response_text(res->body);
          result.status = TransportStatus::Ok;
          result.error.clear();
          break;
        } catch (const Error& ex) {
          result.error = ex.what();
          retry = true;
        }
      } else {
        result.error = "HTTP " + std::to_string(res->status);
        retry = retryable(res->status);
      }
    }
    if (!retry || attempt == max_attempts) break;
    const long long delay = static_cast<long long>(endpoint.backoff_initial_ms) << std::min(attempt - 1, 10);
    std::this_thread::sleep_for(std::chrono::milliseconds(std::min<long long>(delay, 30000)));
  }
  result.latency_ms = elapsed_ms(start);
  return result;
}

RunLog evaluate_manifest(const EvaluationJob& job, const ModelEndpoint& endpoint,
                         const EvaluateOptions& options) {
  endpoint.validate();
  if (options.resume && options.resume->manifest_hash != job.manifest_hash) {
    throw ConfigError("resume log belongs to dataset " + options.resume->manifest_hash +
                      ", not " + job.manifest_hash);
  }

  RunLog log;
  log.run_id = options.resume ? options.resume->run_id : options.run_id;
  log.endpoint = endpoint.name;
  log.manifest_hash = job.manifest_hash;
  log.started = options.resume ? options.resume->started : utc_timestamp();

  const std::size_t total = job.questions.size();
  std::vector<std::optional<AnswerRecord>> slots(total);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < total; ++i) {
    const AnswerRecord* prior = options.resume ? options.resume->find(job.questions[i].id) : nullptr;
    if (prior != nullptr && prior->status == TransportStatus::Ok) {
      slots[i] = *prior;
    } else {
      pending.push_back(i);
    }
  }

  std::ofstream out;
  if (options.log_path) {
    log.records.clear();
    for (const auto& s : slots) {
      if (s) log.records.push_back(*s);
    }
    write_run_log(*options.log_path, log);
    out.open(*options.log_path, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to run log " + options.log_path->string());
  }

  const std::size_t budget = options.max_requests ? std::min(*options.max_requests, pending.size()) : pending.size();
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::vector<bool> finished(pending.size(), false);
  std::size_t flushed = 0;  // pending positions written to the file, in order
  std::size_t done = total - pending.size();

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= budget) return;
      const Question& q = job.questions[pending[k]];
      AnswerRecord record;
      record.question_id = q.id;
      try {
        const auto png = job.load_image(q);
        const AskResult r = ask(endpoint, options.api_key, png, build_prompt(q));
        record.raw_response = r.raw_response;
        record.latency_ms = r.latency_ms;
        record.status = r.status;
        record.http_status = r.http_status;
        record.attempts = r.attempts;
        record.error = r.error;
      } catch (const std::exception& ex) {
        record.status = TransportStatus::Failed;
        record.error = ex.what();
      }

      std::lock_guard lock(mu);
      slots[pending[k]] = std::move(record);
      finished[k] = true;
      ++done;
      if (out.is_open()) {
        while (flushed < budget && finished[flushed]) {
          out << answer_record_line(*slots[pending[flushed]]);
          ++flushed;
        }
        out.flush();
      }
      if (options.progress) options.progress(done, total);
    }
  };

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(endpoint.max_in_flight), budget);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  log.records.clear();
  for (auto& s : slots) {
    if (s) log.records.push_back(std::move(*s));
  }
  if (log.records.size() == total) log.finished = utc_timestamp();
  if (out.is_open()) {
    out.close();
    write_run_log(*options.log_path, log);
  }
  return log;
}

}  // namespace typeprobe
