#include "idrag/chronicle.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "idrag/errors.hpp"

namespace idrag {

using nlohmann::json;

NodeKind node_kind_from_string(const std::string& s) {
    if (s == "belief") return NodeKind::Belief;
    if (s == "trait") return NodeKind::Trait;
    if (s == "value") return NodeKind::Value;
    if (s == "preference") return NodeKind::Preference;
    if (s == "goal") return NodeKind::Goal;
    if (s == "entity") return NodeKind::Entity;
    if (s == "attribute") return NodeKind::Attribute;
    throw ParseError("unknown node kind: '" + s + "'");
}

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Belief: return "belief";
        case NodeKind::Trait: return "trait";
        case NodeKind::Value: return "value";
        case NodeKind::Preference: return "preference";
        case NodeKind::Goal: return "goal";
        case NodeKind::Entity: return "entity";
        case NodeKind::Attribute: return "attribute";
    }
    return "entity";
}

const IdentityNode* Chronicle::find_node(const std::string& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

bool operator==(const Triplet& a, const Triplet& b) {
    return a.subject == b.subject && a.relation == b.relation && a.object == b.object;
}

void validate(const Chronicle& c) {
    std::set<std::string> ids;
    for (const auto& n : c.nodes) {
        if (n.id.empty()) throw ValidationError("node with empty id in chronicle of " + c.owner);
        if (!ids.insert(n.id).second) {
            throw ValidationError("duplicate node id: '" + n.id + "'");
        }
    }
    std::set<std::string> seen_edges;
    for (const auto& e : c.edges) {
        if (e.relation.empty()) {
            throw ValidationError("edge " + e.source + " -> " + e.target + " has empty relation");
        }
        if (!ids.count(e.source)) {
            throw ValidationError("edge references missing node id: '" + e.source + "'");
        }
        if (!ids.count(e.target)) {
            throw ValidationError("edge references missing node id: '" + e.target + "'");
        }
        std::string key = e.source + "\x1f" + e.relation + "\x1f" + e.target;
        if (!seen_edges.insert(key).second) {
            throw ValidationError("duplicate edge: (" + e.source + ", " + e.relation + ", " + e.target + ")");
        }
    }
}

Chronicle parse_chronicle_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    Chronicle c;
    try {
        c.owner = j.at("owner").get<std::string>();
        c.version = j.value("version", 0);
        for (const auto& jn : j.at("nodes")) {
            IdentityNode n;
            n.id = jn.at("id").get<std::string>();
            n.label = jn.at("label").get<std::string>();
            n.kind = node_kind_from_string(jn.value("kind", "entity"));
            n.text = jn.value("text", "");
            if (jn.contains("embedding") && !jn["embedding"].is_null()) {
                n.embedding = jn["embedding"].get<std::vector<double>>();
            }
            c.nodes.push_back(std::move(n));
        }
        for (const auto& je : j.at("edges")) {
            IdentityEdge e;
            e.source = je.at("source").get<std::string>();
            e.relation = je.at("relation").get<std::string>();
            e.target = je.at("target").get<std::string>();
            if (je.contains("constraint") && !je["constraint"].is_null()) {
                e.constraint = je["constraint"].get<std::string>();
            }
            c.edges.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    validate(c);
    return c;
}

Chronicle load_chronicle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open chronicle file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_chronicle_json(buf.str(), path);
}

std::string chronicle_to_json(const Chronicle& c) {
    json j;
    j["owner"] = c.owner;
    j["version"] = c.version;
    j["nodes"] = json::array();
    for (const auto& n : c.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["label"] = n.label;
        jn["kind"] = to_string(n.kind);
        jn["text"] = n.text;
        if (n.embedding) jn["embedding"] = *n.embedding;
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = json::array();
    for (const auto& e : c.edges) {
        json je;
        je["source"] = e.source;
        je["relation"] = e.relation;
        je["target"] = e.target;
        if (e.constraint) je["constraint"] = *e.constraint;
        j["edges"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

void save_chronicle(const Chronicle& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write chronicle file: " + path);
    out << chronicle_to_json(c);
}

std::vector<Triplet> as_triplets(const Chronicle& c) {
    std::vector<Triplet> out;
    out.reserve(c.edges.size());
    for (const auto& e : c.edges) {
        const IdentityNode* s = c.find_node(e.source);
        const IdentityNode* t = c.find_node(e.target);
        out.push_back({s ? s->label : e.source, e.relation, t ? t->label : e.target});
    }
    return out;
}

std::string render_triplet(const Triplet& t) {
    std::string rel = t.relation;
    std::replace(rel.begin(), rel.end(), '_', ' ');
    return t.subject + " " + rel + " " + t.object + ".";
}

std::string render_chronicle_text(const Chronicle& c) {
    std::string out;
    bool first = true;
    for (const auto& t : as_triplets(c)) {
        if (!first) out += "\n";
        out += render_triplet(t);
        first = false;
    }
    return out;
}

std::set<std::string> k_hop_neighborhood(const Chronicle& c,
                                         const std::set<std::string>& seeds,
                                         int radius) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& n : c.nodes) adj[n.id];
    for (const auto& e : c.edges) {
        adj[e.source].push_back(e.target);
        adj[e.target].push_back(e.source);
    }
    for (const auto& s : seeds) {
        if (!adj.count(s)) throw UnknownNode("unknown seed node id: '" + s + "'");
    }
    std::set<std::string> visited(seeds.begin(), seeds.end());
    std::deque<std::pair<std::string, int>> frontier;
    for (const auto& s : seeds) frontier.emplace_back(s, 0);
    while (!frontier.empty()) {
        auto [id, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= radius) continue;
        for (const auto& next : adj[id]) {
            if (visited.insert(next).second) {
                frontier.emplace_back(next, depth + 1);
            }
        }
    }
    return visited;
}

} // namespace idrag
