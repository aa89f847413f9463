#pragma once

#include <string>
#include <vector>

#include "idrag/gateway.hpp"
#include "idrag/time.hpp"

namespace idrag {

struct MemoryEntry {
    SimTime timestamp = 0;
    std::string text;
    EmbeddingVector embedding;
    double importance = 0.5;
};

// Append-only episodic stream; timestamps non-decreasing in append order.
struct MemoryStream {
    std::string owner;
    std::vector<MemoryEntry> entries;
};

void append(MemoryStream& m, const std::string& text, SimTime timestamp,
            double importance, Gateway& gateway);

struct SalienceParams {
    double relevance_weight = 1.0;
    double recency_weight = 0.25;
    double importance_weight = 0.25;
    double recency_tau_hours = 24.0;
};

// score = w_rel * cos(embed(probe), e) + w_rec * exp(-dt_hours/tau) + w_imp * importance;
// ties broken newer-first.
std::vector<MemoryEntry> salience_topk(const MemoryStream& m, const std::string& probe,
                                       std::size_t k, SimTime now, Gateway& gateway,
                                       const SalienceParams& params = {});

// Per-timestep prompt context. Section order is fixed; rendering uses the
// headers the prompts expect.
struct WorkingMemory {
    std::string observation;
    std::string retrieved_memories;
    std::string identity_characteristics;
    std::string somatic_state;
    std::string plan;

    std::string render() const;
};

WorkingMemory compose_working_memory(const std::string& observation,
                                     const std::vector<MemoryEntry>& retrieved,
                                     const std::string& identity_section,
                                     const std::string& somatic = "",
                                     const std::string& plan = "");

// Replacement semantics for the identity section; all other sections are
// byte-identical in the returned copy.
WorkingMemory augment(const WorkingMemory& wm, const std::string& identity_text);

} // namespace idrag
