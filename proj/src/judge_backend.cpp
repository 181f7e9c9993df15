#include "fcjudge/judge_backend.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fcjudge/text_util.hpp"

namespace fcjudge {
namespace {

using json = nlohmann::json;

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void DefaultSleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

}  // namespace

std::string_view ToString(FinishState state) {
  switch (state) {
    case FinishState::kComplete: return "complete";
    case FinishState::kTruncated: return "truncated";
    case FinishState::kRefused: return "refused";
    case FinishState::kTransportError: return "transport_error";
  }
  return "transport_error";
}

std::optional<FinishState> ParseFinishState(std::string_view text) {
  for (auto state : {FinishState::kComplete, FinishState::kTruncated, FinishState::kRefused,
                     FinishState::kTransportError}) {
    if (ToString(state) == text) return state;
  }
  return std::nullopt;
}

std::string ComputeRequestKey(std::string_view model_id, std::string_view body, double temperature) {
  const json key_material = json::array({model_id, body, FormatDouble(temperature)});
  return Sha256Hex(key_material.dump());
}

JudgeRequest MakeJudgeRequest(std::string model_id, RenderedPrompt prompt, double temperature,
                              int max_output_tokens) {
  if (!(temperature >= 0.0)) throw InvalidInput("temperature must be >= 0");
  if (max_output_tokens <= 0) throw InvalidInput("max_output_tokens must be positive");
  JudgeRequest request;
  request.request_key = ComputeRequestKey(model_id, prompt.body, temperature);
  request.model_id = std::move(model_id);
  request.prompt = std::move(prompt);
  request.temperature = temperature;
  request.max_output_tokens = max_output_tokens;
  return request;
}

TruncatedText TruncateDocument(std::string_view document, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < document.size(); ++i) {
    if ((static_cast<unsigned char>(document[i]) & 0xC0) == 0x80) continue;
    if (chars == max_chars) return {std::string(document.substr(0, i)), true};
    ++chars;
  }
  return {std::string(document), false};
}

// ---------------------------------------------------------------------------
// MockJudge

MockJudge::MockJudge(std::map<std::string, std::string> fixture, UnknownKeyPolicy policy,
                     std::string refusal_text)
    : fixture_(std::move(fixture)), policy_(policy), refusal_text_(std::move(refusal_text)) {}

MockJudge MockJudge::FromFile(const std::string& path, UnknownKeyPolicy policy) {
  const std::string text = ReadFile(path);
  std::map<std::string, std::string> fixture;
  const auto first = Trim(text);
  bool parsed_object = false;
  if (!first.empty() && first.front() == '{') {
    try {
      const auto doc = json::parse(first);
      if (doc.is_object() && !doc.contains("request_key")) {
        for (const auto& [key, value] : doc.items()) fixture[key] = value.get<std::string>();
        parsed_object = true;
      }
    } catch (const json::parse_error&) {
      // Not a single object: fall through to line-delimited parsing.
    }
  }
  if (!parsed_object) {
    std::size_t line_number = 0;
    for (std::string_view line : SplitLines(text)) {
      ++line_number;
      if (Trim(line).empty()) continue;
      const auto entry = json::parse(line);
      std::string key;
      if (entry.contains("request_key")) key = entry.at("request_key").get<std::string>();
      else if (entry.contains("id")) key = entry.at("id").get<std::string>();
      else throw std::runtime_error(fmt::format("{}:{}: fixture line without key", path, line_number));
      fixture[key] = entry.at("raw_text").get<std::string>();
    }
  }
  return MockJudge(std::move(fixture), policy);
}

std::optional<std::string> MockJudge::Lookup(const JudgeRequest& request) const {
  if (auto it = fixture_.find(request.request_key); it != fixture_.end()) return it->second;
  for (const auto& id : request.prompt.input_ids) {
    if (auto it = fixture_.find(id); it != fixture_.end()) return it->second;
  }
  if (policy_ == UnknownKeyPolicy::kError) {
    const std::string name = request.prompt.input_ids.empty()
                                 ? request.request_key
                                 : fmt::format("{} (record {})", request.request_key, request.prompt.input_ids.front());
    throw MockLookupError("mock judge has no response for key " + name);
  }
  return std::nullopt;
}

Completion MockJudge::Complete(const JudgeRequest& request) {
  if (auto text = Lookup(request)) return Completion{*text, FinishState::kComplete};
  return Completion{refusal_text_, FinishState::kRefused};
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path dir, bool load_existing) : dir_(std::move(dir)) {
  if (dir_.empty()) return;
  std::filesystem::create_directories(dir_);
  if (!load_existing || !std::filesystem::exists(file())) return;
  std::ifstream in(file(), std::ios::binary);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    try {
      const auto entry = json::parse(line);
      CachedResponse cached;
      cached.raw_text = entry.at("raw_text").get<std::string>();
      cached.finish_state = ParseFinishState(entry.at("finish_state").get<std::string>()).value();
      cached.attempt_count = entry.value("attempt_count", 1);
      cached.input_truncated = entry.value("input_truncated", false);
      entries_[entry.at("request_key").get<std::string>()] = std::move(cached);
    } catch (const std::exception& e) {
      // A torn final line from an interrupted run is skipped, not fatal.
      spdlog::warn("{}:{}: skipping unreadable cache line: {}", file().string(), line_number, e.what());
    }
  }
}

std::filesystem::path ResponseCache::file() const { return dir_ / kFileName; }

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::optional<CachedResponse> ResponseCache::Find(const std::string& request_key) const {
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(request_key); it != entries_.end()) return it->second;
  return std::nullopt;
}

void ResponseCache::Store(const JudgeRequest& request, const JudgeResponse& response) {
  if (response.finish_state == FinishState::kTransportError) return;
  std::lock_guard lock(mutex_);
  if (!dir_.empty()) {
    const json line = {
        {"request_key", request.request_key},
        {"timestamp", UtcTimestamp()},
        {"model_id", request.model_id},
        {"task", ToString(request.prompt.task)},
        {"input_ids", request.prompt.input_ids},
        {"prompt", request.prompt.body},
        {"temperature", request.temperature},
        {"max_output_tokens", request.max_output_tokens},
        {"raw_text", response.raw_text},
        {"finish_state", ToString(response.finish_state)},
        {"attempt_count", response.attempt_count},
        {"input_truncated", response.input_truncated},
    };
    std::ofstream out(file(), std::ios::binary | std::ios::app);
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot append to cache file " + file().string());
  }
  entries_[request.request_key] =
      CachedResponse{response.raw_text, response.finish_state, response.attempt_count, response.input_truncated};
}

// ---------------------------------------------------------------------------
// Retry and rate limiting

std::chrono::milliseconds RetryPolicy::BackoffAfter(int attempt) const {
  const double factor = std::pow(multiplier, std::max(0, attempt - 1));
  const double ms = static_cast<double>(initial_backoff.count()) * factor;
  return std::min(max_backoff, std::chrono::milliseconds(static_cast<std::int64_t>(ms)));
}

RateLimiter::RateLimiter(double requests_per_second, Sleeper sleeper)
    : sleeper_(sleeper ? std::move(sleeper) : Sleeper(DefaultSleep)) {
  if (requests_per_second > 0.0) {
    interval_ = std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / requests_per_second));
  }
}

void RateLimiter::Acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  const auto wait = slot - std::chrono::steady_clock::now();
  if (wait.count() > 0) sleeper_(std::chrono::ceil<std::chrono::milliseconds>(wait));
}

// ---------------------------------------------------------------------------
// JudgeClient

JudgeClient::JudgeClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache,
                         JudgeClientOptions options)
    : backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>(std::filesystem::path{}, false)),
      options_(std::move(options)),
      limiter_(options_.requests_per_second, options_.sleeper) {
  if (!options_.sleeper) options_.sleeper = DefaultSleep;
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
}

JudgeResponse JudgeClient::Submit(const JudgeRequest& request) {
  JudgeResponse response;
  response.request_key = request.request_key;
  response.input_truncated = request.input_truncated;

  if (auto cached = cache_->Find(request.request_key)) {
    response.raw_text = std::move(cached->raw_text);
    response.finish_state = cached->finish_state;
    response.attempt_count = cached->attempt_count;
    response.from_cache = true;
    return response;
  }

  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    response.attempt_count = attempt;
    Completion completion;
    try {
      limiter_.Acquire();
      completion = backend_->Complete(request);
    } catch (const std::exception& e) {
      completion = Completion{{}, FinishState::kTransportError, false, 0, e.what()};
    }
    if (completion.state != FinishState::kTransportError) {
      response.raw_text = std::move(completion.text);
      response.finish_state = completion.state;
      response.error.clear();
      break;
    }
    response.finish_state = FinishState::kTransportError;
    response.error = completion.http_status != 0
                         ? fmt::format("HTTP {}: {}", completion.http_status, completion.error)
                         : completion.error;
    if (!completion.retryable || attempt == options_.retry.max_attempts) break;
    options_.sleeper(options_.retry.BackoffAfter(attempt));
  }
  response.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

  if (response.finish_state == FinishState::kTransportError) {
    spdlog::warn("request {} failed after {} attempt(s): {}", request.request_key.substr(0, 12),
                 response.attempt_count, response.error);
    return response;
  }
  try {
    cache_->Store(request, response);
  } catch (const std::exception& e) {
    spdlog::error("cache write failed for {}: {}", request.request_key.substr(0, 12), e.what());
  }
  return response;
}

BatchResult JudgeClient::RunBatch(std::span<const JudgeRequest> requests, std::size_t max_in_flight,
                                  const std::function<void(std::size_t, std::size_t)>& progress) {
  if (max_in_flight == 0) throw InvalidInput("max_in_flight must be at least 1");
  BatchResult result;
  result.responses.resize(requests.size());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < requests.size(); i = next.fetch_add(1)) {
      result.responses[i] = Submit(requests[i]);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, requests.size());
      }
    }
  };
  const std::size_t workers = std::min(max_in_flight, requests.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  auto& s = result.summary;
  s.total = requests.size();
  for (const auto& r : result.responses) {
    switch (r.finish_state) {
      case FinishState::kComplete: ++s.complete; break;
      case FinishState::kTruncated: ++s.truncated; break;
      case FinishState::kRefused: ++s.refused; break;
      case FinishState::kTransportError: ++s.transport_errors; break;
    }
    s.cache_hits += r.from_cache;
  }
  return result;
}

}  // namespace fcjudge
