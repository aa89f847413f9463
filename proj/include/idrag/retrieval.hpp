#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "idrag/chronicle.hpp"
#include "idrag/gateway.hpp"
#include "idrag/memory.hpp"

namespace idrag {

// Materialized identity query: prioritized relation types plus fallback
// keywords.
struct SearchStrategy {
    std::vector<std::string> high_priority;
    std::vector<std::string> medium_priority;
    std::vector<std::string> keywords;
};

SearchStrategy fallback_strategy();

enum class RetrievalMode { Symbolic, Semantic, Hybrid };

RetrievalMode retrieval_mode_from_string(const std::string& s);
std::string to_string(RetrievalMode m);

struct RetrievalConfig {
    int triplet_budget = 8;
    int expansion_radius = 0;
    RetrievalMode mode = RetrievalMode::Symbolic;
};

enum class Provenance { High, Medium, Keyword, Expansion, Semantic };

std::string to_string(Provenance p);

struct RetrievalResult {
    std::vector<Triplet> triplets;
    std::vector<Provenance> provenance; // parallel to triplets
    std::string formatted_text;
};

// Query-builder call: interpolates agent name and the working-memory context
// summary (observation + plan, truncated to 1500 chars) into the retrieval
// prompt and parses the returned strategy object. Any parse failure yields
// the fallback strategy.
SearchStrategy build_strategy(const std::string& agent_name, const WorkingMemory& wm,
                              Gateway& gateway);

// Priority search: all high-priority relations (strategy order, then edge
// insertion order), then medium, truncated at the budget; keyword scan only
// when the priority pass yields nothing.
RetrievalResult heuristic_search(const Chronicle& c, const SearchStrategy& s,
                                 const RetrievalConfig& cfg);

// Top-k node ids by cosine similarity to the query, descending; ties broken
// by lexicographic node id.
std::vector<std::string> semantic_topk(const Chronicle& c,
                                       const EmbeddingVector& query_embedding,
                                       std::size_t k);

// Full ID-RAG retrieval: strategy formulation, search per mode, optional
// r-hop expansion (appended beyond the budget, deduplicated), formatting.
RetrievalResult retrieve_identity(const Chronicle& c, const std::string& agent_name,
                                  const WorkingMemory& wm, const RetrievalConfig& cfg,
                                  Gateway& gateway, std::ostream* trace = nullptr,
                                  int timestep = -1);

std::string context_summary(const WorkingMemory& wm);

} // namespace idrag
