// abct: build, check and attack encrypted arithmetic tables; run the searches.
//
// Exit codes: 0 pass, 1 property failure, 2 usage or bad input, 3 guard.

#include "abct/alu.hpp"
#include "abct/attack.hpp"
#include "abct/expr.hpp"
#include "abct/forge.hpp"
#include "abct/report.hpp"
#include "abct/search.hpp"
#include "abct/table_file.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace abct;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kGuard = 3;

struct UsageError : Error {
    using Error::Error;
};

SchemeKind scheme_arg(const std::string& s) {
    const auto k = parse_scheme(s);
    if (!k) throw UsageError("unknown scheme '" + s + "' (plain, ab, abc)");
    return *k;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::string join(std::span<const Cipher> cs, const char* sep = ",") {
    std::ostringstream o;
    for (std::size_t i = 0; i < cs.size(); ++i) o << (i ? sep : "") << cs[i];
    return o.str();
}

// name=value[,name=value...]
std::map<std::string, std::uint64_t> parse_bindings(const std::string& text) {
    std::map<std::string, std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("binding '" + item + "' is not name=value");
        const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("binding '" + item + "' needs a non-negative integer");
        if (!out.emplace(name, std::stoull(value)).second) throw UsageError("'" + name + "' bound twice");
    }
    return out;
}

std::pair<Cipher, Cipher> parse_pair(const std::string& text, const TableSet& ts) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("--pair needs c1,c2");
    const auto b = parse_bindings("c1=" + text.substr(0, comma) + ",c2=" + text.substr(comma + 1));
    for (const auto& [k, v] : b)
        if (v > UINT32_MAX || !ts.contains(static_cast<Cipher>(v)))
            throw UsageError("cipher value " + std::to_string(v) + " outside the cipherspace");
    return {static_cast<Cipher>(b.at("c1")), static_cast<Cipher>(b.at("c2"))};
}

// --- build ------------------------------------------------------------------------

struct BuildArgs {
    Residue modulus = 2;
    std::uint32_t padding = 0;
    std::string scheme = "abc";
    std::string fill = "safe";
    std::string layout = "random";
    std::uint64_t seed = 0;
    std::optional<int> dual;
    bool keyed = false;
    bool redact = false;
    std::string out;
    std::string secondary_out;
};

int run_build(const BuildArgs& a) {
    if (a.keyed) {
        KeyedBuild kb = build_keyed(a.modulus, a.seed);
        TableSet stored = kb.tables.materialize();
        write_text_file(a.out, serialize(stored, kb.codebook, a.redact));
        std::cerr << "keyed tables, S = " << stored.size() << '\n';
        return kPass;
    }
    const SchemeKind scheme = scheme_arg(a.scheme);
    const auto layout = parse_layout(a.layout);
    if (!layout) throw UsageError("unknown layout '" + a.layout + "' (blocked, strided, random)");
    const Codebook cb = build_codebook(a.modulus, a.padding, scheme, a.seed, *layout);
    if (a.dual) {
        DualBuild d = build_dual(cb, *a.dual, a.seed);
        write_text_file(a.out, serialize(d.tables, cb, a.redact));
        if (!a.secondary_out.empty()) write_text_file(a.secondary_out, serialize(d.tables, d.secondary, a.redact));
        return kPass;
    }
    if (!a.secondary_out.empty()) throw UsageError("--secondary needs --dual");
    FillPolicy policy;
    policy.seed = a.seed;
    if (a.fill == "safe")
        policy.kind = FillKind::SafeRandom;
    else if (a.fill == "raw")
        policy.kind = FillKind::RawRandom;
    else
        throw UsageError("unknown fill '" + a.fill + "' (safe, raw)");
    write_text_file(a.out, serialize(build_tables(cb, policy), cb, a.redact));
    return kPass;
}

// --- check ------------------------------------------------------------------------

struct CheckArgs {
    std::string file;
    std::string codebook_file;
    bool skip_pairs = false;
    bool json = false;
};

std::optional<Codebook> owner_codebook(const TableFile& f, const std::string& codebook_file) {
    if (codebook_file.empty()) return f.codebook;
    TableFile other = read_table_file(codebook_file);
    if (!other.codebook) throw UsageError(codebook_file + " has no codebook section");
    if (other.codebook->size() != f.tables.size() || other.codebook->origin() != f.tables.origin())
        throw UsageError("codebook in " + codebook_file + " does not fit the tables");
    return other.codebook;
}

int run_check(const CheckArgs& a) {
    const TableFile f = read_table_file(a.file);
    const auto cb = owner_codebook(f, a.codebook_file);
    bool pass = true;
    Json report{{"file", a.file}, {"size", f.tables.size()}, {"provenance", f.tables.provenance().fill}};

    if (cb) {
        const HomomorphismReport h = check_homomorphism(f.tables, *cb);
        pass = pass && h.pass();
        report["homomorphism"] = to_json(h);
        for (const Violation& v : h.violations)
            std::cerr << "homomorphism: " << to_string(v.op) << '(' << v.lhs << ',' << v.rhs << ") = " << v.found
                      << ", expected " << v.expected << '\n';
    } else {
        report["homomorphism"] = nullptr;
        std::cerr << "no codebook: homomorphism not checked\n";
    }
    if (!a.skip_pairs) {
        const auto pairs = check_no_accidental_pairs(f.tables);
        pass = pass && pairs.empty();
        report["accidental_pairs"] = to_json(pairs);
        for (const AccidentalPair& p : pairs)
            std::cerr << "accidental pair under " << to_string(p.op) << ": {" << p.x << ", " << p.y << "}\n";
    } else {
        report["accidental_pairs"] = nullptr;
    }
    report["pass"] = pass;
    if (a.json)
        print_json(report);
    else
        std::cout << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kPass : kFail;
}

// --- eval / typecheck ---------------------------------------------------------------

struct EvalArgs {
    std::string file;
    std::string expr;
    std::string bind;
    bool cipher_bindings = false;
};

int run_eval(const EvalArgs& a) {
    const TableFile f = read_table_file(a.file);
    const Expr e = parse_expr(a.expr);
    const auto binds = parse_bindings(a.bind);
    Cipher result;
    if (f.codebook && !a.cipher_bindings) {
        PlainEnv env;
        for (const auto& [k, v] : binds) {
            if (v >= f.codebook->modulus()) throw UsageError("plain value " + std::to_string(v) + " not below the modulus");
            env[k] = static_cast<Residue>(v);
        }
        result = eval_expr(f.tables, *f.codebook, env, e);
    } else {
        CipherEnv env;
        for (const auto& [k, v] : binds) {
            if (v > UINT32_MAX || !f.tables.contains(static_cast<Cipher>(v)))
                throw UsageError("cipher value " + std::to_string(v) + " outside the cipherspace");
            env[k] = static_cast<Cipher>(v);
        }
        result = eval_cipher(f.tables, env, e);
    }
    std::cout << result;
    if (f.codebook) {
        const Decoded d = f.codebook->decrypt(result);
        if (d.is_padding())
            std::cout << " (padding)";
        else
            std::cout << " (" << d.value << ':' << to_string(d.type) << ')';
    }
    std::cout << '\n';
    return kPass;
}

int run_typecheck(const std::string& text, const std::string& scheme) {
    const Expr e = parse_expr(text);
    const auto t = type_of(e, scheme_arg(scheme));
    std::cout << type_name(t) << ' ' << to_string(quaternion_of(e)) << '\n';
    return t ? kPass : kFail;
}

// --- attack -----------------------------------------------------------------------------

struct AttackArgs {
    std::string file;
    std::string codebook_file;
    std::string suite = "all";
    std::string pair;
    bool json = false;
};

int run_attack_cmd(const AttackArgs& a) {
    const TableFile f = read_table_file(a.file);
    const auto cb = owner_codebook(f, a.codebook_file);
    if (!cb) throw UsageError("judging an attack needs the owner's codebook; pass --codebook FILE");
    std::vector<AttackKind> kinds;
    if (a.suite == "all") {
        kinds.assign(kAllAttacks.begin(), kAllAttacks.end());
    } else {
        const auto k = parse_attack(a.suite);
        if (!k) throw UsageError("unknown attack '" + a.suite + "'");
        kinds.push_back(*k);
    }
    Json rows = Json::array();
    for (AttackKind k : kinds) {
        if (!attack_applicable(cb->modulus(), k)) {
            rows.push_back(Json{{"attack", to_string(k)}, {"verdict", "NOT_APPLICABLE"}});
            if (!a.json) std::cout << to_string(k) << " NOT_APPLICABLE\n";
            continue;
        }
        AttackOutcome o;
        if (k == AttackKind::AbDefeat && !a.pair.empty()) {
            o = run_ab_defeat(f.tables, *cb, parse_pair(a.pair, f.tables));
        } else {
            o = run_attack(f.tables, *cb, k);
        }
        rows.push_back(to_json(o));
        if (!a.json) {
            std::cout << to_string(k) << ' ' << to_string(o.verdict) << " admissible=" << o.admissible
                      << " failures=" << o.failures;
            if (!o.witness.empty()) std::cout << " witness=" << join(o.witness);
            std::cout << '\n';
        }
    }
    if (a.json) print_json(Json{{"scheme", to_string(cb->scheme())}, {"modulus", cb->modulus()}, {"attacks", rows}});
    return kPass;
}

struct MatrixArgs {
    Residue modulus = 16;
    std::uint64_t seed_count = 20;
    std::uint64_t first_seed = 1;
    unsigned workers = 1;
    bool json = false;
};

int run_matrix(const MatrixArgs& a) {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < a.seed_count; ++s) seeds.push_back(a.first_seed + s);
    const AttackMatrix m = attack_matrix(a.modulus, seeds, a.workers);
    if (a.json) {
        print_json(to_json(m));
        return kPass;
    }
    std::cout << "scheme";
    for (AttackKind k : kAllAttacks) std::cout << ' ' << to_string(k);
    std::cout << '\n';
    for (const MatrixRow& row : m.rows) {
        std::cout << to_string(row.scheme);
        for (const MatrixCell& c : row.cells) {
            const auto v = c.aggregate();
            std::cout << ' ' << (!c.applicable ? "N/A" : v ? to_string(*v) : std::string_view("MIXED"));
        }
        std::cout << '\n';
    }
    return kPass;
}

// --- search -----------------------------------------------------------------------------

struct EmbeddingArgs {
    Residue modulus = 2;
    std::uint32_t size = 6;
    bool pairs = false;
    bool clique = false;
    std::string in_file;
    std::optional<std::uint64_t> limit;
    unsigned workers = 1;
    bool all_ops = false;
    bool no_symmetry = false;
    double time_budget = 0;
    bool json = false;
};

std::vector<OpKind> search_ops(bool all) {
    if (all) return {kAllOps.begin(), kAllOps.end()};
    return {kEmbeddingOps.begin(), kEmbeddingOps.end()};
}

int run_embeddings(const EmbeddingArgs& a) {
    const auto ops = search_ops(a.all_ops);
    if (!a.in_file.empty()) {
        const TableFile f = read_table_file(a.in_file);
        if (f.header.scheme != SchemeKind::ABC) throw UsageError("embedding search reads ABC tables");
        const auto found = embeddings_in(f.tables, f.header.modulus, ops);
        if (a.json) {
            Json list = Json::array();
            for (const auto& e : found) list.push_back(to_json(e));
            print_json(Json{{"file", a.in_file}, {"origin", f.tables.origin()}, {"embeddings", std::move(list)}});
        } else {
            std::cout << found.size() << " embedding(s), values relative to origin " << f.tables.origin() << '\n';
            for (const auto& e : found) std::cout << to_string(e) << '\n';
        }
        return kPass;
    }
    if (a.pairs) {
        PairSearchOptions o;
        o.ops = ops;
        o.workers = a.workers;
        o.limit = a.limit;
        const PairSearchReport r = search_overlapping_pairs(a.modulus, a.size, o);
        if (a.json) {
            print_json(to_json(r));
        } else {
            std::cout << "candidates " << r.candidates << ", pairs " << r.pairs_scanned << '\n'
                      << "compatible embedding pairs " << r.compatible_embedding_pairs << '\n'
                      << "overlapping compatible embedding pairs: ";
            if (r.overlapping_embedding_pairs == 0)
                std::cout << "NONE\n";
            else
                std::cout << r.overlapping_embedding_pairs << '\n';
            for (const PairHit& h : r.hits) std::cout << "  " << to_string(h.first) << " | " << to_string(h.second) << '\n';
            if (r.truncated) std::cout << "TRUNCATED at the candidate limit\n";
        }
        return kPass;
    }
    if (a.clique) {
        CliqueBounds b;
        b.ops = ops;
        b.workers = a.workers;
        b.symmetry = !a.no_symmetry;
        b.time_budget = a.time_budget;
        if (a.limit) b.max_candidates = *a.limit;
        const CliqueReport r = max_compatible_set(a.modulus, a.size, b);
        if (a.json) {
            print_json(to_json(r));
        } else {
            std::cout << "max compatible embeddings " << r.max_size << (r.partial ? " (PARTIAL: lower bound)" : "")
                      << '\n'
                      << "graph " << r.vertices << " vertices, " << r.edges << " edges\n"
                      << "witness overlapping: " << (r.witness_overlapping ? "yes" : "no") << '\n'
                      << "largest set with an overlapping pair: " << r.max_overlapping_size << '\n';
            for (const auto& e : r.witness) std::cout << "  " << to_string(e) << '\n';
        }
        return kPass;
    }
    EnumerateOptions eo;
    eo.symmetry = !a.no_symmetry;
    eo.limit = a.limit;
    const auto total = count_candidates(a.modulus, a.size);
    if (!total) throw GuardError("candidate count overflows 64 bits");
    if (a.json) {
        Json j{{"modulus", a.modulus}, {"size", a.size}, {"candidates", *total}, {"embeddings", *total / 3}};
        print_json(j);
    } else {
        std::cout << "candidates " << *total << " (" << *total / 3 << " embeddings up to rotation)\n";
    }
    return kPass;
}

struct ExprSearchArgs {
    bool closure = false;
    std::optional<std::size_t> max_ops;
    bool json = false;
};

int run_expr_search(const ExprSearchArgs& a) {
    if (a.max_ops) {
        const ConstantExprReport r = enumerate_constant_exprs(*a.max_ops);
        if (a.json) {
            print_json(to_json(r));
            return kPass;
        }
        for (std::size_t k = 0; k < r.states_by_ops.size(); ++k)
            std::cout << "ops " << k << ": " << r.states_by_ops[k] << " signatures\n";
        if (r.witnesses.empty()) std::cout << "constant-valued typed expression: NONE up to " << r.max_ops << " ops\n";
        for (std::size_t i = 0; i < r.witnesses.size(); ++i)
            std::cout << "constant-valued typed expression: " << to_string(r.witnesses[i]) << "  ["
                      << to_string(r.witness_states[i]) << "]\n";
        return kPass;
    }
    const ClosureReport r = signature_closure();
    if (a.json) {
        print_json(to_json(r));
        return kPass;
    }
    std::cout << "reachable signatures " << r.reachable.size() << " of " << kSignatureStates << '\n';
    const auto open = r.open_class_hits();
    if (open.empty()) {
        std::cout << "constant-valued typed expression: NONE (x odd, y even)\n";
    } else {
        for (const SignatureState& s : open)
            for (std::size_t i = 0; i < r.reachable.size(); ++i)
                if (r.reachable[i] == s)
                    std::cout << "constant-valued typed expression: " << to_string(r.witnesses[i]) << " (x odd, y even, "
                              << to_string(s.type) << ", value " << (s.truth ? 1 : 0) << ")\n";
    }
    return kPass;
}

struct Lemma1Args {
    std::size_t max_leaves = 6;
    bool parity_relaxed = false;
    bool json = false;
};

int run_lemma1(const Lemma1Args& a) {
    Lemma1Options o;
    o.max_leaves = a.max_leaves;
    o.parity_relaxed = a.parity_relaxed;
    const Lemma1Report r = verify_lemma1(o);
    if (a.json) {
        print_json(to_json(r));
    } else {
        std::cout << "expressions " << r.expressions << ", validly typed " << r.valid_expressions << ", classes "
                  << r.classes << '\n'
                  << "counterexamples " << r.counterexamples.size() << ", quaternion mismatches "
                  << r.quaternion_mismatches.size() << '\n';
        for (const auto& c : r.counterexamples)
            std::cout << "  " << c.first << " : " << to_string(c.first_type) << "  vs  " << c.second << " : "
                      << to_string(c.second_type) << '\n';
        std::cout << (r.holds() ? "HOLDS" : "FAILS") << '\n';
    }
    return r.holds() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ABC-encrypted arithmetic tables: build, check, attack, search"};
    app.require_subcommand(1);
    std::function<int()> action;

    BuildArgs build;
    auto* b = app.add_subcommand("build", "write a table file");
    b->add_option("--modulus", build.modulus, "plain modulus n")->check(CLI::Range(1u, 1u << 30));
    b->add_option("--padding", build.padding, "number of padding values m");
    b->add_option("--scheme", build.scheme, "plain, ab or abc");
    b->add_option("--fill", build.fill, "safe or raw");
    b->add_option("--layout", build.layout, "blocked, strided or random");
    b->add_option("--seed", build.seed);
    b->add_option("--dual", build.dual, "second embedding, variant 0..7 (n = 2, abc)")->check(CLI::Range(0, 7));
    b->add_flag("--keyed", build.keyed, "keyed construction over S = 4n");
    b->add_flag("--redact", build.redact, "omit the codebook");
    b->add_option("-o,--output", build.out)->required();
    b->add_option("--secondary", build.secondary_out, "with --dual: also write the second embedding's file");
    b->callback([&] { action = [&] { return run_build(build); }; });

    CheckArgs check;
    auto* c = app.add_subcommand("check", "homomorphism and accidental-pair checks");
    c->add_option("file", check.file)->required();
    c->add_option("--codebook", check.codebook_file, "table file whose codebook to check against");
    c->add_flag("--skip-pairs", check.skip_pairs, "skip the accidental-pair check");
    c->add_flag("--json", check.json);
    c->callback([&] { action = [&] { return run_check(check); }; });

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "evaluate an expression through the tables");
    e->add_option("file", eval.file)->required();
    e->add_option("--expr", eval.expr)->required();
    e->add_option("--bind", eval.bind, "x=V,y=W (plain values; cipher values for redacted files)");
    e->add_flag("--cipher", eval.cipher_bindings, "bindings are cipher values");
    e->callback([&] { action = [&] { return run_eval(eval); }; });

    std::string tc_expr, tc_scheme = "abc";
    auto* t = app.add_subcommand("typecheck", "type and quaternion unit of an expression");
    t->add_option("--expr", tc_expr)->required();
    t->add_option("--scheme", tc_scheme);
    t->callback([&] { action = [&] { return run_typecheck(tc_expr, tc_scheme); }; });

    AttackArgs attack;
    auto* at = app.add_subcommand("attack", "run attacks against a table file");
    at->add_option("file", attack.file)->required();
    at->add_option("--suite", attack.suite, "all or one of DOUBLING SELF_SUB SELF_DIV LAGRANGE AB_DEFEAT");
    at->add_option("--codebook", attack.codebook_file, "table file holding the owner's codebook");
    at->add_option("--pair", attack.pair, "observed operand pair c1,c2 for AB_DEFEAT");
    at->add_flag("--json", attack.json);
    at->callback([&] { action = [&] { return run_attack_cmd(attack); }; });

    MatrixArgs matrix;
    auto* mx = app.add_subcommand("matrix", "scheme x attack verdict grid over seeds");
    mx->add_option("--modulus", matrix.modulus)->check(CLI::Range(1u, 1u << 30));
    mx->add_option("--seeds", matrix.seed_count, "number of seeds")->check(CLI::PositiveNumber);
    mx->add_option("--first-seed", matrix.first_seed);
    mx->add_option("--workers", matrix.workers)->check(CLI::PositiveNumber);
    mx->add_flag("--json", matrix.json);
    mx->callback([&] { action = [&] { return run_matrix(matrix); }; });

    auto* s = app.add_subcommand("search", "embedding and expression searches");
    s->require_subcommand(1);
    EmbeddingArgs emb;
    auto* se = s->add_subcommand("embeddings", "candidate embeddings, overlapping pairs, max compatible sets");
    se->add_option("--modulus", emb.modulus)->check(CLI::Range(1u, 1u << 30));
    se->add_option("--size", emb.size, "cipherspace size S");
    auto* po = se->add_flag("--pairs-overlap", emb.pairs, "scan all pairs for compatible overlapping embeddings");
    auto* mc = se->add_flag("--max-clique", emb.clique, "largest set of mutually compatible embeddings");
    auto* in = se->add_option("--in", emb.in_file, "list the embeddings present in a table file");
    po->excludes(mc)->excludes(in);
    mc->excludes(in);
    se->add_option("--limit", emb.limit, "candidate limit");
    se->add_option("--workers", emb.workers)->check(CLI::PositiveNumber);
    se->add_flag("--all-ops", emb.all_ops, "constrain SUB and DIV cells too");
    se->add_flag("--no-symmetry", emb.no_symmetry, "do not pin the first role");
    se->add_option("--time-budget", emb.time_budget, "clique search budget in seconds (0: none)");
    se->add_flag("--json", emb.json);
    se->callback([&] { action = [&] { return run_embeddings(emb); }; });

    ExprSearchArgs xs;
    auto* sx = s->add_subcommand("expr", "constant-valued typed expressions in x:A, y:B modulo 2");
    auto* cl = sx->add_flag("--closure", xs.closure, "signature closure (all sizes)");
    auto* mo = sx->add_option("--max-ops", xs.max_ops, "explicit enumeration up to N operations");
    cl->excludes(mo);
    sx->add_flag("--json", xs.json);
    sx->callback([&] { action = [&] { return run_expr_search(xs); }; });

    Lemma1Args lemma;
    auto* l = app.add_subcommand("lemma1", "rearrangements never change the type");
    l->add_option("--max-leaves", lemma.max_leaves)->check(CLI::PositiveNumber);
    l->add_flag("--parity-relaxed", lemma.parity_relaxed, "group by occurrence parity");
    l->add_flag("--json", lemma.json);
    l->callback([&] { action = [&] { return run_lemma1(lemma); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kPass : kUsage;
    }
    try {
        return action();
    } catch (const GuardError& err) {
        std::cerr << "guard: " << err.what() << '\n';
        return kGuard;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    }
}
