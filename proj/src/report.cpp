#include "abct/report.hpp"

namespace abct {

namespace {

Json ciphers(std::span<const Cipher> cs) { return Json(std::vector<Cipher>(cs.begin(), cs.end())); }

Json cell_ref(const CellRef& c) { return Json{{"op", to_string(c.op)}, {"lhs", c.lhs}, {"rhs", c.rhs}}; }

Json state(const SignatureState& s) {
    return Json{{"type", to_string(s.type)},
                {"truth", s.truth},
                {"x", s.x_odd ? "odd" : "even"},
                {"y", s.y_odd ? "odd" : "even"},
                {"constant", s.constant()}};
}

Json ops_list(std::span<const OpKind> ops) {
    Json a = Json::array();
    for (OpKind op : ops) a.push_back(to_string(op));
    return a;
}

}  // namespace

Json to_json(const Codebook& cb) {
    Json j{{"modulus", cb.modulus()}, {"padding", cb.padding()}, {"scheme", to_string(cb.scheme())},
           {"origin", cb.origin()}};
    Json classes = Json::object();
    for (AbcType t : coding_classes(cb.scheme())) classes[std::string(to_string(t))] = ciphers(cb.coding(t));
    j["classes"] = std::move(classes);
    return j;
}

Json to_json(const CandidateEmbedding& e) {
    const Residue n = e.modulus();
    const auto& r = e.roles();
    return Json{{"A", ciphers(std::span(r).subspan(0, n))},
                {"B", ciphers(std::span(r).subspan(n, n))},
                {"C", ciphers(std::span(r).subspan(2 * n, n))}};
}

Json to_json(const HomomorphismReport& r) {
    Json v = Json::array();
    for (const Violation& x : r.violations)
        v.push_back(Json{{"codebook", x.codebook}, {"op", to_string(x.op)}, {"lhs", x.lhs}, {"rhs", x.rhs},
                         {"expected", x.expected}, {"found", x.found}});
    return Json{{"pass", r.pass()}, {"cells_checked", r.cells_checked}, {"violations", std::move(v)}};
}

Json to_json(std::span<const AccidentalPair> pairs) {
    Json v = Json::array();
    for (const AccidentalPair& p : pairs) v.push_back(Json{{"op", to_string(p.op)}, {"x", p.x}, {"y", p.y}});
    return Json{{"pass", pairs.empty()}, {"pairs", std::move(v)}};
}

Json to_json(const AttackOutcome& o) {
    Json t = Json::array();
    for (const AluCall& c : o.transcript)
        t.push_back(Json{{"op", to_string(c.op)}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"result", c.result}});
    return Json{{"attack", to_string(o.kind)},
                {"verdict", to_string(o.verdict)},
                {"admissible", o.admissible},
                {"failures", o.failures},
                {"observation", o.observation},
                {"claimed", o.claimed},
                {"witness", o.witness},
                {"transcript", std::move(t)}};
}

Json to_json(const AttackMatrix& m) {
    Json rows = Json::array();
    for (const MatrixRow& row : m.rows) {
        Json cells = Json::object();
        for (AttackKind k : kAllAttacks) {
            const MatrixCell& c = row.cells[static_cast<std::size_t>(k)];
            Json per = Json::array();
            for (Verdict v : c.per_seed) per.push_back(to_string(v));
            const auto agg = c.aggregate();
            cells[std::string(to_string(k))] =
                Json{{"applicable", c.applicable},
                     {"verdict", c.applicable ? (agg ? Json(to_string(*agg)) : Json("MIXED")) : Json(nullptr)},
                     {"per_seed", std::move(per)}};
        }
        rows.push_back(Json{{"scheme", to_string(row.scheme)}, {"attacks", std::move(cells)}});
    }
    return Json{{"modulus", m.modulus}, {"seeds", m.seeds}, {"rows", std::move(rows)}};
}

Json to_json(const PairSearchReport& r) {
    Json hits = Json::array();
    for (const PairHit& h : r.hits) {
        Json shared = Json::array();
        for (const CellRef& c : h.shared_cells) shared.push_back(cell_ref(c));
        hits.push_back(Json{{"first", to_json(h.first)}, {"second", to_json(h.second)}, {"shared_cells", shared}});
    }
    return Json{{"modulus", r.modulus},
                {"size", r.size},
                {"ops", ops_list(r.ops)},
                {"overlap_definition", "constrained-cell index sets intersect"},
                {"candidates", r.candidates},
                {"pairs_scanned", r.pairs_scanned},
                {"same_embedding_pairs", r.same_embedding_pairs},
                {"compatible_pairs", r.compatible_pairs},
                {"overlapping_compatible_pairs", r.overlapping_compatible_pairs},
                {"compatible_embedding_pairs", r.compatible_embedding_pairs},
                {"overlapping_embedding_pairs", r.overlapping_embedding_pairs},
                {"truncated", r.truncated},
                {"hits", std::move(hits)}};
}

Json to_json(const CliqueReport& r) {
    Json w = Json::array();
    for (const auto& e : r.witness) w.push_back(to_json(e));
    return Json{{"modulus", r.modulus},
                {"size", r.size},
                {"vertices", r.vertices},
                {"edges", r.edges},
                {"max_size", r.max_size},
                {"witness", std::move(w)},
                {"witness_overlapping", r.witness_overlapping},
                {"max_overlapping_size", r.max_overlapping_size},
                {"nodes", r.nodes},
                {"partial", r.partial}};
}

Json to_json(const ClosureReport& r) {
    Json reach = Json::array();
    for (std::size_t i = 0; i < r.reachable.size(); ++i) {
        Json s = state(r.reachable[i]);
        s["min_ops"] = r.min_ops[i];
        s["witness"] = to_string(r.witnesses[i]);
        reach.push_back(std::move(s));
    }
    Json hits = Json::array();
    for (const auto& s : r.constant_hits) hits.push_back(state(s));
    Json open = Json::array();
    for (const auto& s : r.open_class_hits()) open.push_back(state(s));
    return Json{{"states", kSignatureStates},      {"iterations", r.iterations},
                {"reachable_count", r.reachable.size()}, {"constant_hits", std::move(hits)},
                {"x_odd_y_even_hits", std::move(open)},  {"reachable", std::move(reach)}};
}

Json to_json(const ConstantExprReport& r) {
    Json w = Json::array();
    for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
        Json s = state(r.witness_states[i]);
        s["expr"] = to_string(r.witnesses[i]);
        w.push_back(std::move(s));
    }
    return Json{{"max_ops", r.max_ops},
                {"states_by_ops", r.states_by_ops},
                {"reachable_count", r.reachable.size()},
                {"witnesses", std::move(w)}};
}

Json to_json(const Lemma1Report& r) {
    Json ce = Json::array();
    for (const auto& c : r.counterexamples)
        ce.push_back(Json{{"first", c.first}, {"first_type", to_string(c.first_type)}, {"second", c.second},
                          {"second_type", to_string(c.second_type)}});
    return Json{{"holds", r.holds()},
                {"max_leaves", r.max_leaves},
                {"parity_relaxed", r.parity_relaxed},
                {"expressions", r.expressions},
                {"valid_expressions", r.valid_expressions},
                {"classes", r.classes},
                {"comparisons", r.comparisons},
                {"counterexamples", std::move(ce)},
                {"quaternion_mismatches", r.quaternion_mismatches}};
}

}  // namespace abct
