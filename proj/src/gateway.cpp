#include "idrag/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "idrag/errors.hpp"

namespace idrag {

using nlohmann::json;

std::string to_string(Purpose p) {
    switch (p) {
        case Purpose::Action: return "action";
        case Purpose::ComponentGeneration: return "component_generation";
        case Purpose::Summarization: return "summarization";
        case Purpose::QueryBuilder: return "query_builder";
        case Purpose::JudgeRationale: return "judge_rationale";
        case Purpose::JudgeScore: return "judge_score";
        case Purpose::Quiz: return "quiz";
    }
    return "action";
}

GenerationParams default_params(Purpose p) {
    GenerationParams g;
    switch (p) {
        case Purpose::ComponentGeneration:
            g.max_tokens = 1000;
            break;
        case Purpose::Summarization:
            g.max_tokens = 500;
            break;
        case Purpose::JudgeScore:
            g.temperature = 0.0;
            break;
        default:
            break;
    }
    return g;
}

ChatRequest ChatRequest::user(Purpose p, const std::string& text) {
    ChatRequest req;
    req.purpose = p;
    req.params = default_params(p);
    req.messages.push_back({"user", text});
    return req;
}

std::string ChatRequest::flattened() const {
    std::string out;
    for (const auto& m : messages) {
        out += m.role;
        out += ": ";
        out += m.text;
        out += "\n";
    }
    return out;
}

double EmbeddingVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatch("cosine: dimensions " + std::to_string(a.dimension()) +
                                " vs " + std::to_string(b.dimension()));
    }
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of zero vector");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    return dot / (na * nb);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

static std::string to_hex(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex;
    for (int i = 15; i >= 0; --i) out << ((v >> (i * 4)) & 0xf);
    return out.str();
}

std::string prompt_hash(const ChatRequest& req) {
    std::ostringstream key;
    key << req.flattened() << "|t=" << req.params.temperature << "|m=" << req.params.max_tokens;
    if (req.params.seed) key << "|s=" << *req.params.seed;
    return to_hex(fnv1a(key.str()));
}

std::optional<json> extract_structured_block(const std::string& text) {
    for (std::size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (escaped) {
                escaped = false;
                continue;
            }
            if (in_string) {
                if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0) {
                    auto candidate = text.substr(start, i - start + 1);
                    auto parsed = json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded()) return parsed;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

void Gateway::append_log(GatewayLogRecord rec) {
    std::lock_guard<std::mutex> lock(log_mutex_);
    log_.push_back(std::move(rec));
}

// --- MockGateway ---------------------------------------------------------

void MockGateway::script_exact(const std::string& prompt_text, const std::string& reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    rules_.push_back({Rule::Kind::Exact, prompt_text, reply});
}

void MockGateway::script_hash(const std::string& hash, const std::string& reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    rules_.push_back({Rule::Kind::Hash, hash, reply});
}

void MockGateway::script_regex(const std::string& pattern, const std::string& reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    rules_.push_back({Rule::Kind::Regex, pattern, reply});
}

void MockGateway::script_purpose(Purpose p, std::vector<std::string> replies) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& q = purpose_queues_[p];
    q.insert(q.end(), replies.begin(), replies.end());
}

void MockGateway::script_embedding(const std::string& text, std::vector<double> values) {
    std::lock_guard<std::mutex> lock(mutex_);
    embedding_overrides_[text] = std::move(values);
}

void MockGateway::load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    for (const auto& entry : j) {
        std::string match = entry.value("match", "exact");
        std::string reply = entry.at("reply").get<std::string>();
        std::string key = entry.value("key", entry.value("pattern", ""));
        if (match == "exact") script_exact(key, reply);
        else if (match == "hash") script_hash(key, reply);
        else if (match == "regex") script_regex(key, reply);
        else throw ParseError(path + ": unknown match kind '" + match + "'");
    }
}

std::string MockGateway::fallback_reply(const ChatRequest& req, const std::string& hash) const {
    if (req.purpose == Purpose::JudgeScore) {
        // Deterministic in-range score so mock episodes evaluate end to end.
        std::uint64_t h = fnv1a(hash);
        return std::to_string(1 + static_cast<int>(h % 10));
    }
    return "mock reply " + hash.substr(0, 12);
}

std::string MockGateway::complete(const ChatRequest& req) {
    std::string hash = prompt_hash(req);
    std::string flat = req.flattened();
    std::string reply;
    bool found = false;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = purpose_queues_.find(req.purpose);
        if (it != purpose_queues_.end() && !it->second.empty()) {
            reply = it->second.front();
            it->second.erase(it->second.begin());
            found = true;
        }
        if (!found) {
            for (const auto& rule : rules_) {
                bool match = false;
                switch (rule.kind) {
                    case Rule::Kind::Exact:
                        match = (flat == rule.key) ||
                                (!req.messages.empty() && req.messages.back().text == rule.key);
                        break;
                    case Rule::Kind::Hash:
                        match = (hash == rule.key);
                        break;
                    case Rule::Kind::Regex:
                        match = std::regex_search(flat, std::regex(rule.key));
                        break;
                }
                if (match) {
                    reply = rule.reply;
                    found = true;
                    break;
                }
            }
        }
    }
    if (!found) {
        if (strict_) throw GatewayError("unscripted prompt, hash " + hash);
        reply = fallback_reply(req, hash);
    }
    append_log({req.purpose, req.params, hash, 0.0, reply});
    return reply;
}

static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

EmbeddingVector MockGateway::embed(const std::string& text) {
    if (text.empty()) throw GatewayError("embed of empty text");
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = embedding_overrides_.find(text);
        if (it != embedding_overrides_.end()) return {it->second};
    }
    // Token-multiset hash: identical strings embed identically, overlapping
    // strings correlate.
    std::vector<double> acc(kDim, 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::uint64_t h = fnv1a(token);
        for (std::size_t d = 0; d < kDim; ++d) {
            std::uint64_t x = splitmix64(h + d);
            acc[d] += (static_cast<double>(x % 2000001) / 1000000.0) - 1.0;
        }
        token.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
    double n = 0.0;
    for (double v : acc) n += v * v;
    n = std::sqrt(n);
    if (n == 0.0) {
        acc[0] = 1.0;
    } else {
        for (double& v : acc) v /= n;
    }
    return {acc};
}

// --- HttpGateway ---------------------------------------------------------

HttpGatewayConfig HttpGatewayConfig::from_env() {
    HttpGatewayConfig cfg;
    auto get = [](const char* name) -> std::string {
        const char* v = std::getenv(name);
        return v ? v : "";
    };
    cfg.endpoint_url = get("MODEL_ENDPOINT_URL");
    cfg.api_key = get("MODEL_API_KEY");
    cfg.model_name = get("MODEL_NAME");
    cfg.embed_endpoint_url = get("EMBED_ENDPOINT_URL");
    cfg.embed_model_name = get("EMBED_MODEL_NAME");
    return cfg;
}

HttpGateway::HttpGateway(HttpGatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint_url.empty()) {
        throw GatewayError("MODEL_ENDPOINT_URL is not configured");
    }
}

void HttpGateway::throttle() {
    if (cfg_.min_interval_ms <= 0) return;
    auto now_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now().time_since_epoch())
                      .count();
    std::int64_t wait = last_call_ms_ + cfg_.min_interval_ms - now_ms;
    if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    last_call_ms_ = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now().time_since_epoch())
                        .count();
}

static std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string HttpGateway::complete(const ChatRequest& req) {
    std::string flat = req.flattened();
    if (flat.size() > cfg_.context_char_limit) {
        throw ContextOverflow("prompt of " + std::to_string(flat.size()) +
                              " chars exceeds backend context limit");
    }
    json body;
    body["model"] = cfg_.model_name;
    body["messages"] = json::array();
    for (const auto& m : req.messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.text}});
    }
    body["temperature"] = req.params.temperature;
    body["max_tokens"] = req.params.max_tokens;
    if (req.params.seed) body["seed"] = *req.params.seed;

    auto [base, path] = split_url(cfg_.endpoint_url);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        std::lock_guard<std::mutex> lock(call_mutex_);
        throttle();
        auto t0 = std::chrono::steady_clock::now();
        httplib::Client client(base);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        auto res = client.Post(path, headers, body.dump(), "application/json");
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (res && res->status == 200) {
            auto j = json::parse(res->body, nullptr, false);
            if (!j.is_discarded() && j.contains("choices") && !j["choices"].empty()) {
                std::string reply = j["choices"][0]["message"]["content"].get<std::string>();
                append_log({req.purpose, req.params, prompt_hash(req), ms, reply});
                return reply;
            }
            last_error = "malformed completion response";
        } else {
            last_error = res ? "http status " + std::to_string(res->status)
                             : "transport failure";
        }
    }
    throw GatewayError("completion failed after retries: " + last_error);
}

EmbeddingVector HttpGateway::embed(const std::string& text) {
    if (text.empty()) throw GatewayError("embed of empty text");
    std::string url = cfg_.embed_endpoint_url.empty() ? cfg_.endpoint_url : cfg_.embed_endpoint_url;
    auto [base, path] = split_url(url);
    json body;
    body["model"] = cfg_.embed_model_name;
    body["input"] = json::array({text});
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        std::lock_guard<std::mutex> lock(call_mutex_);
        throttle();
        httplib::Client client(base);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (res && res->status == 200) {
            auto j = json::parse(res->body, nullptr, false);
            if (!j.is_discarded() && j.contains("data") && !j["data"].empty()) {
                return {j["data"][0]["embedding"].get<std::vector<double>>()};
            }
            last_error = "malformed embedding response";
        } else {
            last_error = res ? "http status " + std::to_string(res->status)
                             : "transport failure";
        }
    }
    throw GatewayError("embedding failed after retries: " + last_error);
}

} // namespace idrag
