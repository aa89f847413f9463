#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace idrag {

enum class NodeKind { Belief, Trait, Value, Preference, Goal, Entity, Attribute };

NodeKind node_kind_from_string(const std::string& s);
std::string to_string(NodeKind k);

struct IdentityNode {
    std::string id;
    std::string label;
    NodeKind kind = NodeKind::Entity;
    std::string text;
    std::optional<std::vector<double>> embedding;
};

struct IdentityEdge {
    std::string source;
    std::string relation;
    std::string target;
    std::optional<std::string> constraint;
};

// Directed identity knowledge graph. Nodes and edges keep insertion order;
// all retrieval paths treat the graph as read-only, only the update hook
// bumps `version`.
struct Chronicle {
    std::string owner;
    std::vector<IdentityNode> nodes;
    std::vector<IdentityEdge> edges;
    std::int64_t version = 0;

    const IdentityNode* find_node(const std::string& id) const;
};

struct Triplet {
    std::string subject;
    std::string relation;
    std::string object;
};

bool operator==(const Triplet& a, const Triplet& b);

// Throws ValidationError naming the offending element on duplicate node ids,
// duplicate (source, relation, target) edges, or dangling endpoints.
void validate(const Chronicle& c);

Chronicle load_chronicle(const std::string& path);
void save_chronicle(const Chronicle& c, const std::string& path);

Chronicle parse_chronicle_json(const std::string& text, const std::string& origin);
std::string chronicle_to_json(const Chronicle& c);

// One triplet per edge in insertion order; subject/object are node labels.
std::vector<Triplet> as_triplets(const Chronicle& c);

// "<subject> <relation with underscores as spaces> <object>."
std::string render_triplet(const Triplet& t);

// Newline-joined render_triplet over as_triplets.
std::string render_chronicle_text(const Chronicle& c);

// Undirected r-hop expansion from the seeds; includes the seeds themselves.
std::set<std::string> k_hop_neighborhood(const Chronicle& c,
                                         const std::set<std::string>& seeds,
                                         int radius);

} // namespace idrag
