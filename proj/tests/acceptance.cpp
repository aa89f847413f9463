// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the process exits non-zero if any gating criterion fails. Criterion
// 13 needs a configured live endpoint and is skipped (not failed) without
// one.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "idrag/cli.hpp"
#include "idrag/errors.hpp"
#include "idrag/evaluation.hpp"
#include "idrag/prompts.hpp"
#include "idrag/retrieval.hpp"
#include "idrag/simulation.hpp"
#include "test_support.hpp"

using namespace idrag;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& note = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name;
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

// Criterion 13 reports its outcome but never affects the exit code.
void report_nongating(bool ok, const std::string& note) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion 13: live smoke (non-gating)";
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << std::endl;
}

void run(int n, const std::string& name, bool (*fn)(std::string&)) {
    std::string note;
    bool ok = false;
    try {
        ok = fn(note);
    } catch (const std::exception& e) {
        note = e.what();
    }
    report(n, name, ok, note);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario riverbend() { return load_scenario(fixture_dir() + "/riverbend.scenario.json"); }

// --- 1: fixture shapes ----------------------------------------------------

bool c1(std::string&) {
    std::ostringstream a_out, b_out, err;
    if (cmd_inspect(fixture_dir() + "/alice.chronicle.json", a_out, err) != 0) return false;
    if (cmd_inspect(fixture_dir() + "/bob.chronicle.json", b_out, err) != 0) return false;
    return a_out.str().find("nodes: 17, edges: 16") != std::string::npos &&
           b_out.str().find("nodes: 16, edges: 15") != std::string::npos;
}

// --- 2: triplet sentence template ----------------------------------------

bool c2(std::string&) {
    return render_triplet({"Alice", "is_politically", "Conservative"}) ==
           "Alice is politically Conservative.";
}

// --- 3: priority search vs exhaustive filter + stable sort ----------------

RetrievalResult search_oracle(const Chronicle& c, const SearchStrategy& s,
                              const RetrievalConfig& cfg) {
    auto triplets = as_triplets(c);
    struct Hit {
        int rank;
        std::size_t index;
        Provenance tag;
    };
    std::vector<Hit> hits;
    int rank = 0;
    for (const auto& rel : s.high_priority) {
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            if (c.edges[i].relation == rel) hits.push_back({rank, i, Provenance::High});
        }
        ++rank;
    }
    for (const auto& rel : s.medium_priority) {
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            if (c.edges[i].relation == rel) hits.push_back({rank, i, Provenance::Medium});
        }
        ++rank;
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& a, const Hit& b) { return a.rank < b.rank; });
    // An edge matched by both a high and a medium relation keeps its first
    // (higher-ranked) hit only.
    std::set<std::size_t> seen;
    RetrievalResult out;
    for (const auto& h : hits) {
        if (out.triplets.size() >= static_cast<std::size_t>(cfg.triplet_budget)) break;
        if (!seen.insert(h.index).second) continue;
        out.triplets.push_back(triplets[h.index]);
        out.provenance.push_back(h.tag);
    }
    if (out.triplets.empty() && !s.keywords.empty()) {
        auto lower = [](std::string v) {
            std::transform(v.begin(), v.end(), v.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
            return v;
        };
        for (std::size_t i = 0; i < c.edges.size(); ++i) {
            if (out.triplets.size() >= static_cast<std::size_t>(cfg.triplet_budget)) break;
            const IdentityNode* src = c.find_node(c.edges[i].source);
            const IdentityNode* dst = c.find_node(c.edges[i].target);
            bool match = false;
            for (const auto& kw : s.keywords) {
                std::string k = lower(kw);
                if (lower(triplets[i].subject).find(k) != std::string::npos ||
                    lower(c.edges[i].relation).find(k) != std::string::npos ||
                    lower(triplets[i].object).find(k) != std::string::npos ||
                    (src && lower(src->text).find(k) != std::string::npos) ||
                    (dst && lower(dst->text).find(k) != std::string::npos)) {
                    match = true;
                    break;
                }
            }
            if (match) {
                out.triplets.push_back(triplets[i]);
                out.provenance.push_back(Provenance::Keyword);
            }
        }
    }
    return out;
}

bool c3(std::string& note) {
    std::mt19937 rng(301);
    std::uniform_int_distribution<int> n_rel(0, 3);
    std::uniform_int_distribution<std::size_t> pick_rel(0, test::kRelations.size() - 1);
    std::uniform_int_distribution<int> pick_budget(1, 10);
    std::uniform_int_distribution<int> kw_choice(0, 2);
    const std::vector<std::string> kw_pool = {"node", "text of node 1", "zzz-unmatched"};
    for (int trial = 0; trial < 200; ++trial) {
        Chronicle c = test::random_chronicle(rng, 20, 30);
        SearchStrategy s;
        for (int i = 0, n = n_rel(rng); i < n; ++i) s.high_priority.push_back(test::kRelations[pick_rel(rng)]);
        for (int i = 0, n = n_rel(rng); i < n; ++i) s.medium_priority.push_back(test::kRelations[pick_rel(rng)]);
        for (int i = 0, n = n_rel(rng); i < n; ++i) s.keywords.push_back(kw_pool[kw_choice(rng)]);
        RetrievalConfig cfg;
        cfg.triplet_budget = pick_budget(rng);

        auto got = heuristic_search(c, s, cfg);
        auto expected = search_oracle(c, s, cfg);
        if (got.triplets != expected.triplets || got.provenance != expected.provenance) {
            note = "mismatch on trial " + std::to_string(trial);
            return false;
        }
        // Keyword fallback fires iff the priority pass yields zero.
        bool priority_hit = false;
        for (const auto& e : c.edges) {
            for (const auto& rel : s.high_priority) priority_hit |= (e.relation == rel);
            for (const auto& rel : s.medium_priority) priority_hit |= (e.relation == rel);
        }
        bool has_keyword_tag = std::find(got.provenance.begin(), got.provenance.end(),
                                         Provenance::Keyword) != got.provenance.end();
        if (has_keyword_tag && priority_hit) {
            note = "keyword fallback despite priority hits, trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

// --- 4: k-hop neighborhood vs BFS oracle ----------------------------------

bool c4(std::string& note) {
    std::mt19937 rng(401);
    for (int trial = 0; trial < 200; ++trial) {
        Chronicle c = test::random_chronicle(rng, 20, 30);
        std::uniform_int_distribution<std::size_t> pick(0, c.nodes.size() - 1);
        std::set<std::string> seeds = {c.nodes[pick(rng)].id};
        std::set<std::string> previous;
        for (int r = 0; r <= 3; ++r) {
            auto got = k_hop_neighborhood(c, seeds, r);
            if (got != test::bfs_oracle(c, seeds, r)) {
                note = "oracle mismatch trial " + std::to_string(trial) + " r=" + std::to_string(r);
                return false;
            }
            if (!std::includes(got.begin(), got.end(), previous.begin(), previous.end())) {
                note = "not monotone in r, trial " + std::to_string(trial);
                return false;
            }
            previous = got;
        }
    }
    return true;
}

// --- 5: semantic top-k vs exhaustive cosine sort --------------------------

bool c5(std::string& note) {
    MockGateway gw;
    std::mt19937 rng(501);
    for (int trial = 0; trial < 100; ++trial) {
        Chronicle c = test::random_chronicle(rng, 50, 60);
        for (auto& n : c.nodes) n.embedding = gw.embed(n.label + " " + n.text).values;
        EmbeddingVector query = gw.embed("probe text " + std::to_string(trial));

        std::vector<std::pair<double, std::string>> scored;
        for (const auto& n : c.nodes) {
            scored.push_back({cosine_similarity(query, EmbeddingVector{*n.embedding}), n.id});
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t k = 0; k <= c.nodes.size() + 2; ++k) {
            auto got = semantic_topk(c, query, k);
            std::vector<std::string> expected;
            for (std::size_t i = 0; i < scored.size() && i < k; ++i) {
                expected.push_back(scored[i].second);
            }
            if (got != expected) {
                note = "mismatch trial " + std::to_string(trial) + " k=" + std::to_string(k);
                return false;
            }
        }
    }
    return true;
}

// --- 6: cosine algebra ----------------------------------------------------

bool c6(std::string& note) {
    EmbeddingVector ex{{1.0, 0.0}};
    EmbeddingVector ey{{0.0, 1.0}};
    if (std::abs(cosine_similarity(ex, ex) - 1.0) > 1e-12) return false;
    if (std::abs(cosine_similarity(ex, ey)) > 1e-12) return false;
    std::mt19937 rng(601);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int i = 0; i < 1000; ++i) {
        EmbeddingVector a, b;
        for (int d = 0; d < 16; ++d) {
            a.values.push_back(gauss(rng));
            b.values.push_back(gauss(rng));
        }
        double ab = cosine_similarity(a, b);
        if (std::abs(ab - cosine_similarity(b, a)) > 1e-9) {
            note = "asymmetric at pair " + std::to_string(i);
            return false;
        }
        double alpha = scale(rng);
        EmbeddingVector sa = a;
        for (double& v : sa.values) v *= alpha;
        if (std::abs(ab - cosine_similarity(sa, b)) > 1e-9) {
            note = "not scale invariant at pair " + std::to_string(i);
            return false;
        }
    }
    return true;
}

// --- 7: identity-fill condition semantics ---------------------------------

bool c7(std::string& note) {
    Scenario s = riverbend();
    Chronicle alice = load_chronicle(fixture_dir() + "/alice.chronicle.json");
    Chronicle bob = load_chronicle(fixture_dir() + "/bob.chronicle.json");

    // Full retrieval: the identity section is the complete graph rendering at
    // every timestep.
    Scenario full = s;
    for (auto& a : full.agents) {
        if (!a.chronicle_path.empty()) a.condition = Condition::FullRetrieval;
    }
    MockGateway gw_full;
    auto rec_full = run_episode(full, gw_full, 70);
    if (!rec_full.converged || rec_full.timesteps.size() != 7) {
        note = "full-retrieval episode: " + rec_full.diagnostic;
        return false;
    }
    for (const auto& ts : rec_full.timesteps) {
        for (const auto& act : ts.actions) {
            const Chronicle* c = act.actor == "Alice" ? &alice
                                 : act.actor == "Bob" ? &bob
                                                      : nullptr;
            if (!c) continue;
            if (act.wm_snapshot.identity_characteristics != render_chronicle_text(*c)) {
                note = "full identity differs for " + act.actor + " at t=" +
                       std::to_string(ts.index);
                return false;
            }
        }
    }

    // Selective retrieval: every identity-section sentence is the rendering
    // of some edge of the agent's own graph.
    MockGateway gw_idrag;
    auto rec_idrag = run_episode(s, gw_idrag, 71);
    if (!rec_idrag.converged) {
        note = "id_rag episode: " + rec_idrag.diagnostic;
        return false;
    }
    auto sentence_set = [](const Chronicle& c) {
        std::set<std::string> out;
        for (const auto& t : as_triplets(c)) out.insert(render_triplet(t));
        return out;
    };
    std::set<std::string> alice_ok = sentence_set(alice);
    std::set<std::string> bob_ok = sentence_set(bob);
    for (const auto& ts : rec_idrag.timesteps) {
        for (const auto& act : ts.actions) {
            const std::set<std::string>* ok = act.actor == "Alice" ? &alice_ok
                                              : act.actor == "Bob" ? &bob_ok
                                                                   : nullptr;
            if (!ok) continue;
            std::istringstream lines(act.wm_snapshot.identity_characteristics);
            std::string line;
            while (std::getline(lines, line)) {
                if (line.empty()) continue;
                if (!ok->count(line)) {
                    note = "unmapped identity sentence for " + act.actor + ": " + line;
                    return false;
                }
            }
        }
    }
    return true;
}

// --- 8: end-to-end byte determinism ---------------------------------------

bool c8(std::string& note) {
    auto plan_for = [](const std::string& dir) {
        RunPlan plan;
        plan.scenario_path = "riverbend.scenario.json";
        plan.conditions = {Condition::Baseline, Condition::FullRetrieval, Condition::IdRag};
        plan.runs_per_condition = 1;
        plan.seed = 800;
        plan.out_dir = dir;
        return plan;
    };
    fs::path a = fs::temp_directory_path() / "idrag_acc_det_a";
    fs::path b = fs::temp_directory_path() / "idrag_acc_det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    std::ostringstream out, err;
    if (cmd_run(plan_for(a.string()), out, err) != 0 ||
        cmd_run(plan_for(b.string()), out, err) != 0) {
        note = "mock run failed: " + err.str();
        return false;
    }
    std::vector<std::string> names = {"metrics.tsv"};
    for (const char* cond : {"baseline", "full_retrieval", "id_rag"}) {
        names.push_back(std::string(cond) + "-run0.episode.json");
        names.push_back(std::string(cond) + "-run0.reports.json");
    }
    for (const auto& name : names) {
        if (read_file((a / name).string()) != read_file((b / name).string())) {
            note = name + " differs between executions";
            fs::remove_all(a);
            fs::remove_all(b);
            return false;
        }
    }
    fs::remove_all(a);
    fs::remove_all(b);
    return true;
}

// --- 9: recall metric calculus --------------------------------------------

bool c9(std::string& note) {
    Quiz quiz = load_quiz(fixture_dir() + "/quiz.json", "Alice");
    RecallSubject subject;
    subject.name = "Alice";
    subject.identity_section = "Alice is a farmer.";

    // Exact answers: the mock embeds identical strings identically.
    MockGateway exact;
    std::vector<std::string> answers;
    for (const auto& item : quiz) answers.push_back(item.ground_truth);
    exact.script_purpose(Purpose::Quiz, answers);
    auto r_exact = identity_recall_score(subject, quiz, exact, 0);
    if (r_exact.similarities.size() != 20) {
        note = "expected 20 similarities, got " + std::to_string(r_exact.similarities.size());
        return false;
    }
    if (std::abs(r_exact.score - 1.0) > 1e-6) {
        note = "exact-answer score " + std::to_string(r_exact.score);
        return false;
    }

    // Orthogonal answers: scripted embeddings on disjoint axes.
    MockGateway ortho;
    std::vector<std::string> wrong;
    for (std::size_t i = 0; i < quiz.size(); ++i) {
        std::string answer = "unrelated answer " + std::to_string(i);
        wrong.push_back(answer);
        std::vector<double> ea(MockGateway::kDim, 0.0), et(MockGateway::kDim, 0.0);
        ea[0] = 1.0;
        et[1] = 1.0;
        ortho.script_embedding(answer, ea);
        ortho.script_embedding(quiz[i].ground_truth, et);
    }
    ortho.script_purpose(Purpose::Quiz, wrong);
    auto r_ortho = identity_recall_score(subject, quiz, ortho, 0);
    if (r_ortho.similarities.size() != 20 || std::abs(r_ortho.score) > 1e-6) {
        note = "orthogonal score " + std::to_string(r_ortho.score);
        return false;
    }

    // 10 exact + 10 orthogonal -> 0.5.
    MockGateway half;
    std::vector<std::string> mixed;
    for (std::size_t i = 0; i < quiz.size(); ++i) {
        if (i < 10) {
            mixed.push_back(quiz[i].ground_truth);
        } else {
            std::string answer = "off-axis " + std::to_string(i);
            mixed.push_back(answer);
            std::vector<double> ea(MockGateway::kDim, 0.0), et(MockGateway::kDim, 0.0);
            ea[0] = 1.0;
            et[1] = 1.0;
            half.script_embedding(answer, ea);
            half.script_embedding(quiz[i].ground_truth, et);
        }
    }
    half.script_purpose(Purpose::Quiz, mixed);
    auto r_half = identity_recall_score(subject, quiz, half, 0);
    if (r_half.similarities.size() != 20 || std::abs(r_half.score - 0.5) > 1e-6) {
        note = "mixed score " + std::to_string(r_half.score);
        return false;
    }
    return true;
}

// --- 10: two-prompt judge protocol ----------------------------------------

bool c10(std::string& note) {
    ActionAttempt action;
    action.actor = "Alice";
    action.timestep = 2;
    action.text = "Alice defends the mill.";

    MockGateway gw;
    gw.script_purpose(Purpose::JudgeRationale, {"Matches her preservationist record."});
    gw.script_purpose(Purpose::JudgeScore, {"8"});
    auto rec = action_alignment_score("Alice values Tradition.", action, gw);
    if (rec.score < 1 || rec.score > 10) {
        note = "score out of range: " + std::to_string(rec.score);
        return false;
    }
    // Rationale request must precede the score request in the call log.
    int rationale_at = -1, score_at = -1;
    for (std::size_t i = 0; i < gw.log().size(); ++i) {
        if (gw.log()[i].purpose == Purpose::JudgeRationale && rationale_at < 0) {
            rationale_at = static_cast<int>(i);
        }
        if (gw.log()[i].purpose == Purpose::JudgeScore && score_at < 0) {
            score_at = static_cast<int>(i);
        }
    }
    if (rationale_at < 0 || score_at < 0 || rationale_at > score_at) {
        note = "prompt order wrong in gateway log";
        return false;
    }

    MockGateway worded;
    worded.script_purpose(Purpose::JudgeRationale, {"Matches."});
    worded.script_purpose(Purpose::JudgeScore, {"eleven", "eleven"});
    try {
        action_alignment_score("text", action, worded);
        note = "word-only reply did not raise";
        return false;
    } catch (const JudgeParseError&) {
    }
    // One re-ask happened before the failure: two score requests logged.
    int score_calls = 0;
    for (const auto& r : worded.log()) {
        if (r.purpose == Purpose::JudgeScore) ++score_calls;
    }
    if (score_calls != 2) {
        note = "expected one re-ask, saw " + std::to_string(score_calls) + " score calls";
        return false;
    }
    return true;
}

// --- 11: grounded election mechanics --------------------------------------

bool c11(std::string& note) {
    Scenario s = riverbend();
    MockGateway gw;
    gw.script_purpose(Purpose::Action,
                      {"Ballot for Alice.\nEFFECT: vote:Alice",   // 10:00 closed
                       "Ballot for Alice.\nEFFECT: vote:Alice",   // 11:00 open
                       "Ballot for Bob.\nEFFECT: vote:Bob",       // 13:00 open
                       "Ballot for Alice.\nEFFECT: vote:Alice",   // 14:59-> use 14:00 open
                       "Ballot for Bob.\nEFFECT: vote:Bob"});     // 15:00 closed
    GameMasterState gm;
    ActionAttempt attempt;
    attempt.actor = "Dorothy";
    attempt.text = "casts a ballot";
    const std::vector<std::string> hours = {"2025-06-10 10:00", "2025-06-10 11:00",
                                            "2025-06-10 13:00", "2025-06-10 14:00",
                                            "2025-06-10 15:00"};
    for (const auto& h : hours) {
        gm.clock = parse_sim_time(h);
        resolve_action(gm, s, attempt, gw);
    }
    if (gm.vote_tally["Alice"] != 2 || gm.vote_tally["Bob"] != 1) {
        note = "tally Alice=" + std::to_string(gm.vote_tally["Alice"]) +
               " Bob=" + std::to_string(gm.vote_tally["Bob"]);
        return false;
    }
    int grounded = 0;
    int total = 0;
    for (const auto& e : gm.event_log) grounded += e.grounded_vote ? 1 : 0;
    for (const auto& [cand, n] : gm.vote_tally) total += n;
    if (grounded != total) {
        note = "grounded events " + std::to_string(grounded) + " vs tally " +
               std::to_string(total);
        return false;
    }
    return true;
}

// --- 12: conversation interventions ---------------------------------------

bool c12(std::string& note) {
    AgentState alice;
    alice.name = "Alice";
    alice.memory.owner = "Alice";
    AgentState bob;
    bob.name = "Bob";
    bob.memory.owner = "Bob";

    // A speaker looping on one utterance is cut off within two rounds.
    MockGateway loop;
    loop.script_purpose(Purpose::Action,
                        {"The mill must stay open.", "We will see about that.",
                         "The mill must stay open.", "We will see about that.",
                         "The mill must stay open."});
    GameMasterState gm;
    auto t = run_conversation(gm, alice, bob, loop, 8, parse_sim_time("2025-06-10 10:00"));
    if (t.reason != "repetition" || t.utterances.back().turn > 2) {
        note = "repetition ended at turn " + std::to_string(t.utterances.back().turn) +
               " reason=" + t.reason;
        return false;
    }

    // No transcript exceeds max_turns.
    for (int max_turns : {1, 3, 5}) {
        MockGateway gw;
        GameMasterState gm2;
        AgentState a2 = alice;
        AgentState b2 = bob;
        auto t2 = run_conversation(gm2, a2, b2, gw, max_turns,
                                   parse_sim_time("2025-06-10 10:00"));
        for (const auto& u : t2.utterances) {
            if (u.turn > max_turns) {
                note = "turn " + std::to_string(u.turn) + " exceeds max " +
                       std::to_string(max_turns);
                return false;
            }
        }
        if (static_cast<int>(t2.utterances.size()) > 2 * max_turns) {
            note = "transcript longer than 2*max_turns";
            return false;
        }
    }
    return true;
}

// --- 13: optional live smoke ----------------------------------------------

void c13() {
    const char* endpoint = std::getenv("MODEL_ENDPOINT_URL");
    if (!endpoint || std::string(endpoint).empty()) {
        std::cout << "SKIP criterion 13: live smoke (MODEL_ENDPOINT_URL not set)"
                  << std::endl;
        return;
    }
    try {
        Scenario s = riverbend();
        HttpGateway gateway(HttpGatewayConfig::from_env());
        auto record = run_episode(s, gateway, 1300);
        if (!record.converged || record.timesteps.size() != 7) {
            report_nongating(false, "episode: " + record.diagnostic);
            return;
        }
        Chronicle alice = load_chronicle(fixture_dir() + "/alice.chronicle.json");
        Quiz quiz = load_quiz(fixture_dir() + "/quiz.json", "Alice");
        double last_idrag = 0.0;
        for (const auto& ts : record.timesteps) {
            auto it = std::find_if(ts.actions.begin(), ts.actions.end(),
                                   [](const ActionAttempt& a) { return a.actor == "Alice"; });
            if (it == ts.actions.end()) {
                report_nongating(false, "Alice missing at t=" + std::to_string(ts.index));
                return;
            }
            RecallSubject subject;
            subject.name = "Alice";
            subject.identity_section = it->wm_snapshot.identity_characteristics;
            subject.condition = Condition::IdRag;
            subject.chronicle = &alice;
            subject.retrieval = s.retrieval;
            auto recall = identity_recall_score(subject, quiz, gateway, ts.index);
            if (recall.score < -1e-9 || recall.score > 1.0 + 1e-9) {
                report_nongating(false, "recall out of [0,1] at t=" + std::to_string(ts.index));
                return;
            }
            last_idrag = recall.score;
        }
        // Directional comparison against a baseline episode; reported only.
        Scenario base = s;
        for (auto& a : base.agents) a.condition = Condition::Baseline;
        auto base_record = run_episode(base, gateway, 1301);
        std::string direction = "baseline episode did not converge";
        if (base_record.converged && !base_record.timesteps.empty()) {
            const auto& ts = base_record.timesteps.back();
            auto it = std::find_if(ts.actions.begin(), ts.actions.end(),
                                   [](const ActionAttempt& a) { return a.actor == "Alice"; });
            if (it != ts.actions.end()) {
                RecallSubject subject;
                subject.name = "Alice";
                subject.identity_section = it->wm_snapshot.identity_characteristics;
                auto recall = identity_recall_score(subject, quiz, gateway, ts.index);
                direction = "final recall selective=" + std::to_string(last_idrag) +
                            " baseline=" + std::to_string(recall.score);
            }
        }
        report_nongating(true, direction);
    } catch (const std::exception& e) {
        report_nongating(false, e.what());
    }
}

} // namespace

int main() {
    run(1, "chronicle fixtures have the required shape", c1);
    run(2, "triplet sentence template is byte-exact", c2);
    run(3, "priority search matches the exhaustive oracle", c3);
    run(4, "k-hop neighborhood matches the BFS oracle", c4);
    run(5, "semantic top-k matches the exhaustive cosine sort", c5);
    run(6, "cosine similarity algebra holds", c6);
    run(7, "identity-fill condition semantics hold across an episode", c7);
    run(8, "mock executions are byte-deterministic end to end", c8);
    run(9, "recall metric calculus is exact over 20 questions", c9);
    run(10, "judge protocol orders rationale before score and re-asks once", c10);
    run(11, "votes ground only while polls are open", c11);
    run(12, "conversations end on repetition and respect max_turns", c12);
    c13(); // optional, never gates the exit code on skip
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all gating criteria passed" << std::endl;
    return 0;
}
