// Delivery of rendered prompts to a judge.
//
// A ChatBackend turns one request into one completion. JudgeClient wraps a
// backend with the on-disk response cache, retries with exponential
// backoff, and an optional rate limit. Every request is sent as a single
// user message with no conversation history.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fcjudge/prompts.hpp"

namespace fcjudge {

enum class FinishState { kComplete, kTruncated, kRefused, kTransportError };

std::string_view ToString(FinishState state);
std::optional<FinishState> ParseFinishState(std::string_view text);

inline constexpr double kDefaultTemperature = 0.0;
inline constexpr int kDefaultMaxOutputTokens = 512;

struct JudgeRequest {
  std::string model_id;
  RenderedPrompt prompt;
  double temperature = kDefaultTemperature;
  int max_output_tokens = kDefaultMaxOutputTokens;
  std::string request_key;
  bool input_truncated = false;  // the document was cut to fit the budget
};

/// SHA-256 over model id, prompt body and temperature. Stable across runs.
std::string ComputeRequestKey(std::string_view model_id, std::string_view body, double temperature);

JudgeRequest MakeJudgeRequest(std::string model_id, RenderedPrompt prompt,
                              double temperature = kDefaultTemperature,
                              int max_output_tokens = kDefaultMaxOutputTokens);

struct JudgeResponse {
  std::string request_key;
  std::string raw_text;  // byte-exact model output
  FinishState finish_state = FinishState::kTransportError;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
  int attempt_count = 1;
  bool input_truncated = false;
  std::string error;  // transport failure detail, empty otherwise
};

struct TruncatedText {
  std::string text;
  bool truncated = false;
};

/// Keeps the first `max_chars` Unicode code points and drops the tail.
TruncatedText TruncateDocument(std::string_view document, std::size_t max_chars);

/// Outcome of one backend call, before retry handling.
struct Completion {
  std::string text;
  FinishState state = FinishState::kComplete;
  bool retryable = false;
  int http_status = 0;
  std::string error;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// May throw; JudgeClient converts exceptions into transport errors.
  virtual Completion Complete(const JudgeRequest& request) = 0;
  virtual std::string Name() const = 0;
};

class MockLookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Deterministic judge answering from a fixture keyed by request key or by
/// record id (the prompt's input ids).
class MockJudge : public ChatBackend {
 public:
  enum class UnknownKeyPolicy { kError, kRefusal };

  static constexpr std::string_view kDefaultRefusal = "I'm sorry, but I can't help with that request.";

  explicit MockJudge(std::map<std::string, std::string> fixture,
                     UnknownKeyPolicy policy = UnknownKeyPolicy::kError,
                     std::string refusal_text = std::string(kDefaultRefusal));

  /// Reads either a JSON object {key: text} or a line-delimited file whose
  /// lines carry request_key and raw_text (the response cache format).
  static MockJudge FromFile(const std::string& path, UnknownKeyPolicy policy = UnknownKeyPolicy::kError);

  /// Canned text for the request; throws MockLookupError naming the key in
  /// strict mode when nothing matches.
  std::optional<std::string> Lookup(const JudgeRequest& request) const;

  Completion Complete(const JudgeRequest& request) override;
  std::string Name() const override { return "mock"; }

  std::size_t size() const { return fixture_.size(); }

 private:
  std::map<std::string, std::string> fixture_;
  UnknownKeyPolicy policy_;
  std::string refusal_text_;
};

struct ChatCompletionsConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 120;
};

/// Standard chat-completions JSON request body for a single user message.
std::string BuildChatCompletionBody(const JudgeRequest& request);

/// Maps an HTTP status and body onto a completion. 429 and 5xx are
/// retryable; finish_reason "length" is Truncated; "content_filter" or a
/// refusal field is Refused.
Completion InterpretChatCompletionResponse(int http_status, std::string_view body);

/// Live HTTP(S) backend. The credential is read from the environment at
/// construction; a missing variable throws std::runtime_error so that a run
/// fails before sending anything.
class ChatCompletionsBackend : public ChatBackend {
 public:
  explicit ChatCompletionsBackend(ChatCompletionsConfig config);
  Completion Complete(const JudgeRequest& request) override;
  std::string Name() const override { return "live"; }

 private:
  ChatCompletionsConfig config_;
  std::string api_key_;
};

struct CachedResponse {
  std::string raw_text;
  FinishState finish_state = FinishState::kComplete;
  int attempt_count = 1;
  bool input_truncated = false;
};

/// Append-only response store, one JSON object per line in
/// `<dir>/responses.jsonl`. Lines hold request_key, timestamp, model_id,
/// prompt, temperature, max_output_tokens, raw_text and finish_state.
/// Writes are serialized; transport errors are never stored.
class ResponseCache {
 public:
  /// Empty `dir` keeps everything in memory. With `load_existing` the
  /// entries already on disk are served as hits (resume).
  ResponseCache(std::filesystem::path dir, bool load_existing);

  std::optional<CachedResponse> Find(const std::string& request_key) const;
  void Store(const JudgeRequest& request, const JudgeResponse& response);

  std::filesystem::path file() const;
  std::size_t size() const;

  static constexpr std::string_view kFileName = "responses.jsonl";

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<std::string, CachedResponse> entries_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{60000};

  /// Delay before attempt `attempt + 1`, attempt being 1-based.
  std::chrono::milliseconds BackoffAfter(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Spaces request starts at least 1/rate apart; a rate <= 0 disables it.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second, Sleeper sleeper = {});
  void Acquire();

 private:
  std::chrono::nanoseconds interval_{0};
  Sleeper sleeper_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_{};
};

struct BatchSummary {
  std::size_t total = 0;
  std::size_t complete = 0;
  std::size_t truncated = 0;
  std::size_t refused = 0;
  std::size_t transport_errors = 0;
  std::size_t cache_hits = 0;
};

struct BatchResult {
  std::vector<JudgeResponse> responses;  // responses[i] answers requests[i]
  BatchSummary summary;
};

struct JudgeClientOptions {
  RetryPolicy retry;
  double requests_per_second = 0.0;
  Sleeper sleeper;  // defaults to std::this_thread::sleep_for
};

class JudgeClient {
 public:
  JudgeClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache,
              JudgeClientOptions options = {});

  /// Never throws: failures after the retry budget come back as
  /// TransportError responses. Non-error responses are persisted to the
  /// cache before returning.
  JudgeResponse Submit(const JudgeRequest& request);

  /// Submits with at most `max_in_flight` concurrent requests.
  BatchResult RunBatch(std::span<const JudgeRequest> requests, std::size_t max_in_flight,
                       const std::function<void(std::size_t done, std::size_t total)>& progress = {});

  const ChatBackend& backend() const { return *backend_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  JudgeClientOptions options_;
  RateLimiter limiter_;
};

}  // namespace fcjudge
