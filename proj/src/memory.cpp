#include "idrag/memory.hpp"

#include <algorithm>
#include <cmath>

#include "idrag/errors.hpp"

namespace idrag {

void append(MemoryStream& m, const std::string& text, SimTime timestamp,
            double importance, Gateway& gateway) {
    if (!m.entries.empty() && timestamp < m.entries.back().timestamp) {
        throw TimestampRegression("append at " + format_sim_time(timestamp) +
                                  " precedes last entry at " +
                                  format_sim_time(m.entries.back().timestamp));
    }
    MemoryEntry e;
    e.timestamp = timestamp;
    e.text = text;
    e.importance = importance;
    e.embedding = gateway.embed(text);
    m.entries.push_back(std::move(e));
}

std::vector<MemoryEntry> salience_topk(const MemoryStream& m, const std::string& probe,
                                       std::size_t k, SimTime now, Gateway& gateway,
                                       const SalienceParams& params) {
    if (m.entries.empty()) return {};
    EmbeddingVector probe_vec = gateway.embed(probe);
    struct Scored {
        double score;
        std::size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(m.entries.size());
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const auto& e = m.entries[i];
        double rel = cosine_similarity(probe_vec, e.embedding);
        double dt_hours = static_cast<double>(now - e.timestamp) / 3600.0;
        double rec = std::exp(-dt_hours / params.recency_tau_hours);
        double score = params.relevance_weight * rel + params.recency_weight * rec +
                       params.importance_weight * e.importance;
        scored.push_back({score, i});
    }
    std::stable_sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        // newer first on ties
        return m.entries[a.index].timestamp > m.entries[b.index].timestamp;
    });
    std::vector<MemoryEntry> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) {
        out.push_back(m.entries[scored[i].index]);
    }
    return out;
}

std::string WorkingMemory::render() const {
    std::string out;
    out += "Observation:\n" + observation + "\n\n";
    out += "Retrieved memories:\n" + retrieved_memories + "\n\n";
    out += "Identity characteristics:\n" + identity_characteristics + "\n\n";
    out += "Feeling about recent progress in life:\n" + somatic_state + "\n\n";
    out += "Plan:\n" + plan + "\n";
    return out;
}

WorkingMemory compose_working_memory(const std::string& observation,
                                     const std::vector<MemoryEntry>& retrieved,
                                     const std::string& identity_section,
                                     const std::string& somatic,
                                     const std::string& plan) {
    WorkingMemory wm;
    wm.observation = observation;
    std::string lines;
    for (const auto& e : retrieved) {
        if (!lines.empty()) lines += "\n";
        lines += "[" + format_sim_time(e.timestamp) + "] " + e.text;
    }
    wm.retrieved_memories = lines;
    wm.identity_characteristics = identity_section;
    wm.somatic_state = somatic;
    wm.plan = plan;
    return wm;
}

WorkingMemory augment(const WorkingMemory& wm, const std::string& identity_text) {
    WorkingMemory out = wm;
    out.identity_characteristics = identity_text;
    return out;
}

} // namespace idrag
