#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace idrag {

enum class Purpose {
    Action,
    ComponentGeneration,
    Summarization,
    QueryBuilder,
    JudgeRationale,
    JudgeScore,
    Quiz,
};

std::string to_string(Purpose p);

struct GenerationParams {
    double temperature = 0.5;
    int max_tokens = 256;
    std::optional<std::int64_t> seed;
};

// Paper-given defaults: action/component 0.5, deterministic choices 0.0;
// 1000 tokens for component generation, 500 for summarization, 256 otherwise.
GenerationParams default_params(Purpose p);

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string text;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    GenerationParams params;
    Purpose purpose = Purpose::Action;

    static ChatRequest user(Purpose p, const std::string& text);
    std::string flattened() const;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
    double norm() const;
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Stable 64-bit FNV-1a over the flattened request; used as the mock script
// key and in the request log.
std::string prompt_hash(const ChatRequest& req);
std::uint64_t fnv1a(const std::string& s);

// First balanced-brace object in the text, fenced or bare; nullopt when the
// text carries no parseable object.
std::optional<nlohmann::json> extract_structured_block(const std::string& text);

struct GatewayLogRecord {
    Purpose purpose;
    GenerationParams params;
    std::string hash;
    double latency_ms = 0.0;
    std::string reply;
};

class Gateway {
public:
    virtual ~Gateway() = default;

    virtual std::string complete(const ChatRequest& req) = 0;
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual std::size_t embedding_dimension() const = 0;

    const std::vector<GatewayLogRecord>& log() const { return log_; }
    void clear_log() { log_.clear(); }

protected:
    void append_log(GatewayLogRecord rec);

    std::vector<GatewayLogRecord> log_;
    std::mutex log_mutex_;
};

// Deterministic offline backend. Replies come from a scripted match list
// (exact text, prompt hash, or regex), falling back to a digest-derived
// sentence unless strict mode is on. Embeddings hash the token multiset into
// a fixed 64-dim unit vector, so identical strings embed identically.
class MockGateway : public Gateway {
public:
    explicit MockGateway(bool strict = false) : strict_(strict) {}

    std::string complete(const ChatRequest& req) override;
    EmbeddingVector embed(const std::string& text) override;
    std::size_t embedding_dimension() const override { return kDim; }

    void script_exact(const std::string& prompt_text, const std::string& reply);
    void script_hash(const std::string& hash, const std::string& reply);
    void script_regex(const std::string& pattern, const std::string& reply);
    // Queue of replies consumed in order for a given purpose; takes
    // precedence over match rules.
    void script_purpose(Purpose p, std::vector<std::string> replies);
    void script_embedding(const std::string& text, std::vector<double> values);

    void load_script(const std::string& path);

    static constexpr std::size_t kDim = 64;

private:
    std::string fallback_reply(const ChatRequest& req, const std::string& hash) const;

    struct Rule {
        enum class Kind { Exact, Hash, Regex } kind;
        std::string key;
        std::string reply;
    };
    bool strict_;
    std::vector<Rule> rules_;
    std::map<Purpose, std::vector<std::string>> purpose_queues_;
    std::map<std::string, std::vector<double>> embedding_overrides_;
    std::mutex mutex_;
};

// Chat-completions-compatible HTTP client. Endpoint and credentials come
// from MODEL_ENDPOINT_URL / MODEL_API_KEY / MODEL_NAME and
// EMBED_ENDPOINT_URL / EMBED_MODEL_NAME.
struct HttpGatewayConfig {
    std::string endpoint_url;
    std::string api_key;
    std::string model_name;
    std::string embed_endpoint_url;
    std::string embed_model_name;
    int retries = 2;
    int min_interval_ms = 0;
    std::size_t context_char_limit = 400000;
    std::size_t embed_dim = 768;

    static HttpGatewayConfig from_env();
};

class HttpGateway : public Gateway {
public:
    explicit HttpGateway(HttpGatewayConfig cfg);

    std::string complete(const ChatRequest& req) override;
    EmbeddingVector embed(const std::string& text) override;
    std::size_t embedding_dimension() const override { return cfg_.embed_dim; }

private:
    void throttle();

    HttpGatewayConfig cfg_;
    std::mutex call_mutex_;
    std::int64_t last_call_ms_ = 0;
};

} // namespace idrag
