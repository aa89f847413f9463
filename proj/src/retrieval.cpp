#include "idrag/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>
#include <set>

#include "idrag/errors.hpp"
#include "idrag/prompts.hpp"

namespace idrag {

SearchStrategy fallback_strategy() {
    return {{"profession", "is_politically"}, {"values"}, {}};
}

RetrievalMode retrieval_mode_from_string(const std::string& s) {
    if (s == "symbolic") return RetrievalMode::Symbolic;
    if (s == "semantic") return RetrievalMode::Semantic;
    if (s == "hybrid") return RetrievalMode::Hybrid;
    throw ParseError("unknown retrieval mode: '" + s + "'");
}

std::string to_string(RetrievalMode m) {
    switch (m) {
        case RetrievalMode::Symbolic: return "symbolic";
        case RetrievalMode::Semantic: return "semantic";
        case RetrievalMode::Hybrid: return "hybrid";
    }
    return "symbolic";
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::High: return "high";
        case Provenance::Medium: return "medium";
        case Provenance::Keyword: return "keyword";
        case Provenance::Expansion: return "expansion";
        case Provenance::Semantic: return "semantic";
    }
    return "high";
}

std::string context_summary(const WorkingMemory& wm) {
    std::string summary = wm.observation;
    if (!wm.plan.empty()) summary += "\n" + wm.plan;
    if (summary.size() > 1500) summary.resize(1500);
    return summary;
}

static std::vector<std::string> parse_string_list(const nlohmann::json& j,
                                                  const std::string& key, bool& ok) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) {
        ok = false;
        return out;
    }
    for (const auto& item : j[key]) {
        if (!item.is_string()) {
            ok = false;
            return out;
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

SearchStrategy build_strategy(const std::string& agent_name, const WorkingMemory& wm,
                              Gateway& gateway) {
    std::string prompt = fill_template(load_prompt("query_builder.txt"),
                                       {{"agent_name", agent_name},
                                        {"context_summary", context_summary(wm)}});
    std::string reply = gateway.complete(ChatRequest::user(Purpose::QueryBuilder, prompt));
    auto block = extract_structured_block(reply);
    if (!block) return fallback_strategy();
    bool ok = true;
    SearchStrategy s;
    s.high_priority = parse_string_list(*block, "high_priority", ok);
    s.medium_priority = parse_string_list(*block, "medium_priority", ok);
    s.keywords = parse_string_list(*block, "keywords", ok);
    if (!ok) return fallback_strategy();
    if (s.high_priority.empty() && s.medium_priority.empty() && s.keywords.empty()) {
        return fallback_strategy();
    }
    return s;
}

static std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

static bool contains_ci(const std::string& haystack, const std::string& needle) {
    return lowercase(haystack).find(lowercase(needle)) != std::string::npos;
}

RetrievalResult heuristic_search(const Chronicle& c, const SearchStrategy& s,
                                 const RetrievalConfig& cfg) {
    RetrievalResult result;
    auto triplets = as_triplets(c);
    std::set<std::size_t> taken;
    std::size_t budget = static_cast<std::size_t>(cfg.triplet_budget);

    auto collect = [&](const std::vector<std::string>& relations, Provenance tag) {
        for (const auto& rel : relations) {
            for (std::size_t i = 0; i < c.edges.size(); ++i) {
                if (result.triplets.size() >= budget) return;
                if (taken.count(i)) continue;
                if (c.edges[i].relation == rel) {
                    result.triplets.push_back(triplets[i]);
                    result.provenance.push_back(tag);
                    taken.insert(i);
                }
            }
        }
    };
    collect(s.high_priority, Provenance::High);
    if (result.triplets.size() < budget) collect(s.medium_priority, Provenance::Medium);

    if (result.triplets.empty() && !s.keywords.empty()) {
        for (std::size_t i = 0; i < c.edges.size() && result.triplets.size() < budget; ++i) {
            const auto& e = c.edges[i];
            const IdentityNode* src = c.find_node(e.source);
            const IdentityNode* dst = c.find_node(e.target);
            bool match = false;
            for (const auto& kw : s.keywords) {
                if (contains_ci(triplets[i].subject, kw) || contains_ci(e.relation, kw) ||
                    contains_ci(triplets[i].object, kw) ||
                    (src && contains_ci(src->text, kw)) ||
                    (dst && contains_ci(dst->text, kw))) {
                    match = true;
                    break;
                }
            }
            if (match) {
                result.triplets.push_back(triplets[i]);
                result.provenance.push_back(Provenance::Keyword);
            }
        }
    }

    std::string text;
    for (std::size_t i = 0; i < result.triplets.size(); ++i) {
        if (i) text += "\n";
        text += render_triplet(result.triplets[i]);
    }
    result.formatted_text = text;
    return result;
}

std::vector<std::string> semantic_topk(const Chronicle& c,
                                       const EmbeddingVector& query_embedding,
                                       std::size_t k) {
    struct Scored {
        double sim;
        std::string id;
    };
    std::vector<Scored> scored;
    for (const auto& n : c.nodes) {
        if (!n.embedding) throw MissingEmbedding("node '" + n.id + "' has no embedding");
        EmbeddingVector v{*n.embedding};
        scored.push_back({cosine_similarity(query_embedding, v), n.id});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].id);
    return out;
}

static void reformat(RetrievalResult& result) {
    std::string text;
    for (std::size_t i = 0; i < result.triplets.size(); ++i) {
        if (i) text += "\n";
        text += render_triplet(result.triplets[i]);
    }
    result.formatted_text = text;
}

RetrievalResult retrieve_identity(const Chronicle& c, const std::string& agent_name,
                                  const WorkingMemory& wm, const RetrievalConfig& cfg,
                                  Gateway& gateway, std::ostream* trace, int timestep) {
    SearchStrategy strategy = build_strategy(agent_name, wm, gateway);
    RetrievalResult result;
    auto triplets = as_triplets(c);

    if (cfg.mode == RetrievalMode::Semantic) {
        EmbeddingVector query = gateway.embed(context_summary(wm).empty()
                                                  ? agent_name
                                                  : context_summary(wm));
        auto ids = semantic_topk(c, query, static_cast<std::size_t>(cfg.triplet_budget));
        std::set<std::string> selected(ids.begin(), ids.end());
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            if (result.triplets.size() >= static_cast<std::size_t>(cfg.triplet_budget)) break;
            if (selected.count(c.edges[i].source) || selected.count(c.edges[i].target)) {
                result.triplets.push_back(triplets[i]);
                result.provenance.push_back(Provenance::Semantic);
            }
        }
    } else if (cfg.mode == RetrievalMode::Hybrid) {
        // Symbolic matches score 1.0, everything else its cosine similarity
        // to the context-summary embedding; one total order over edges.
        EmbeddingVector query = gateway.embed(context_summary(wm).empty()
                                                  ? agent_name
                                                  : context_summary(wm));
        std::set<std::string> wanted(strategy.high_priority.begin(), strategy.high_priority.end());
        wanted.insert(strategy.medium_priority.begin(), strategy.medium_priority.end());
        struct Scored {
            double score;
            std::size_t index;
            bool symbolic;
        };
        std::vector<Scored> scored;
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            bool symbolic = wanted.count(c.edges[i].relation) > 0;
            double score = 1.0;
            if (!symbolic) {
                const IdentityNode* dst = c.find_node(c.edges[i].target);
                if (!dst || !dst->embedding) {
                    throw MissingEmbedding("node '" + c.edges[i].target +
                                           "' has no embedding (hybrid mode)");
                }
                score = cosine_similarity(query, EmbeddingVector{*dst->embedding});
            }
            scored.push_back({score, i, symbolic});
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const Scored& a, const Scored& b) { return a.score > b.score; });
        for (const auto& s : scored) {
            if (result.triplets.size() >= static_cast<std::size_t>(cfg.triplet_budget)) break;
            result.triplets.push_back(triplets[s.index]);
            result.provenance.push_back(s.symbolic ? Provenance::High : Provenance::Semantic);
        }
    } else {
        result = heuristic_search(c, strategy, cfg);
    }

    if (cfg.expansion_radius > 0 && !result.triplets.empty()) {
        std::set<std::string> seeds;
        std::set<std::string> have;
        for (const auto& t : result.triplets) {
            have.insert(t.subject + "\x1f" + t.relation + "\x1f" + t.object);
        }
        std::map<std::string, std::string> label_to_id;
        for (const auto& n : c.nodes) label_to_id[n.label] = n.id;
        for (const auto& t : result.triplets) {
            auto s = label_to_id.find(t.subject);
            auto o = label_to_id.find(t.object);
            if (s != label_to_id.end()) seeds.insert(s->second);
            if (o != label_to_id.end()) seeds.insert(o->second);
        }
        auto hood = k_hop_neighborhood(c, seeds, cfg.expansion_radius);
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            if (!hood.count(c.edges[i].source) || !hood.count(c.edges[i].target)) continue;
            std::string key = triplets[i].subject + "\x1f" + triplets[i].relation + "\x1f" +
                              triplets[i].object;
            if (have.count(key)) continue;
            have.insert(key);
            result.triplets.push_back(triplets[i]);
            result.provenance.push_back(Provenance::Expansion);
        }
    }

    reformat(result);

    if (trace) {
        std::map<std::string, int> counts;
        for (auto p : result.provenance) counts[to_string(p)]++;
        *trace << "retrieval t=" << timestep << " agent=" << agent_name << " high=[";
        for (std::size_t i = 0; i < strategy.high_priority.size(); ++i) {
            if (i) *trace << ",";
            *trace << strategy.high_priority[i];
        }
        *trace << "] medium=[";
        for (std::size_t i = 0; i < strategy.medium_priority.size(); ++i) {
            if (i) *trace << ",";
            *trace << strategy.medium_priority[i];
        }
        *trace << "] provenance={";
        bool first = true;
        for (const auto& [tag, n] : counts) {
            if (!first) *trace << ",";
            *trace << tag << ":" << n;
            first = false;
        }
        *trace << "} text_hash=" << std::hex << fnv1a(result.formatted_text) << std::dec
               << "\n";
    }
    return result;
}

} // namespace idrag
