#include "abct/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace abct {

// --- candidates ------------------------------------------------------------------

CandidateEmbedding::CandidateEmbedding(Residue n, std::uint32_t size, std::vector<Cipher> roles)
    : n_(n), size_(size), roles_(std::move(roles)) {
    if (n_ < 1) throw Error("modulus must be positive");
    if (roles_.size() != 3ull * n_) throw Error("a candidate assigns exactly 3n roles");
    if (size_ < roles_.size()) throw Error("cipherspace smaller than 3n");
    std::vector<bool> used(size_, false);
    for (Cipher c : roles_) {
        if (c >= size_) throw Error("role value outside cipherspace");
        if (used[c]) throw Error("role values must be distinct");
        used[c] = true;
    }
}

CandidateEmbedding CandidateEmbedding::from_codebook(const Codebook& cb) {
    if (cb.scheme() != SchemeKind::ABC) throw Error("embeddings are ABC codebooks");
    std::vector<Cipher> roles;
    for (AbcType t : coding_classes(SchemeKind::ABC))
        for (Cipher c : cb.coding(t)) roles.push_back(c - cb.origin());
    return CandidateEmbedding(cb.modulus(), cb.size(), std::move(roles));
}

Codebook CandidateEmbedding::codebook() const {
    std::vector<std::vector<Cipher>> maps(3);
    for (std::size_t k = 0; k < 3; ++k) maps[k].assign(roles_.begin() + k * n_, roles_.begin() + (k + 1) * n_);
    return Codebook(n_, size_ - 3 * n_, SchemeKind::ABC, std::move(maps));
}

CandidateEmbedding CandidateEmbedding::rotated() const {
    std::vector<Cipher> r;
    r.reserve(roles_.size());
    r.insert(r.end(), roles_.begin() + n_, roles_.end());
    r.insert(r.end(), roles_.begin(), roles_.begin() + n_);
    return CandidateEmbedding(n_, size_, std::move(r));
}

CandidateEmbedding CandidateEmbedding::canonical() const {
    CandidateEmbedding best = *this, r = rotated();
    for (int i = 0; i < 2; ++i, r = r.rotated())
        if (r.roles_ < best.roles_) best = r;
    return best;
}

std::string to_string(const CandidateEmbedding& e) {
    std::ostringstream out;
    const char* names = "ABC";
    for (std::size_t k = 0; k < 3; ++k) {
        if (k) out << ' ';
        out << names[k] << '=';
        for (Residue x = 0; x < e.modulus(); ++x) out << (x ? "," : "") << e.roles()[k * e.modulus() + x];
    }
    return out.str();
}

namespace {

/// One constrained cell in role terms; the same for every candidate.
struct CellTemplate {
    std::uint8_t slot;  // position of op in the searched op list
    OpKind op;
    std::uint16_t lhs, rhs, out;  // role indices
};

std::vector<CellTemplate> make_templates(Residue n, std::span<const OpKind> ops) {
    std::vector<CellTemplate> out;
    for (std::size_t s = 0; s < ops.size(); ++s)
        for (AbcType t1 : coding_classes(SchemeKind::ABC))
            for (AbcType t2 : coding_classes(SchemeKind::ABC)) {
                const auto t3 = result_type(SchemeKind::ABC, t1, t2);
                if (!t3) continue;
                for (Residue x = 0; x < n; ++x)
                    for (Residue y = 0; y < n; ++y) {
                        const auto z = combine(ops[s], x, y, n);
                        if (!z) continue;
                        out.push_back(CellTemplate{static_cast<std::uint8_t>(s), ops[s],
                                                   static_cast<std::uint16_t>(index_of(t1) * n + x),
                                                   static_cast<std::uint16_t>(index_of(t2) * n + y),
                                                   static_cast<std::uint16_t>(index_of(*t3) * n + *z)});
                    }
            }
    return out;
}

void check_ops(std::span<const OpKind> ops) {
    if (ops.empty()) throw Error("no operation selected");
    std::set<OpKind> seen(ops.begin(), ops.end());
    if (seen.size() != ops.size()) throw Error("operation listed twice");
}

/// Constrained cells of one candidate as a dense slot -> value+1 map (0 = free).
class DenseCells {
public:
    DenseCells(std::uint32_t size, std::size_t slots) : size_(size), cells_(slots * size * size, 0) {}

    void assign(std::span<const Cipher> roles, std::span<const CellTemplate> templates) {
        std::fill(cells_.begin(), cells_.end(), 0);
        for (const CellTemplate& t : templates)
            cells_[index(t.slot, roles[t.lhs], roles[t.rhs])] = static_cast<std::uint8_t>(roles[t.out] + 1);
    }

    std::size_t index(std::size_t slot, Cipher a, Cipher b) const {
        return (slot * size_ + a) * size_ + b;
    }
    std::uint8_t at(std::size_t i) const { return cells_[i]; }

private:
    std::uint32_t size_;
    std::vector<std::uint8_t> cells_;
};

struct PairCheck {
    bool conflict = false;
    std::size_t shared = 0;
};

PairCheck check_pair(const DenseCells& a, std::span<const Cipher> b, std::span<const CellTemplate> templates,
                     bool stop_on_conflict = true) {
    PairCheck r;
    for (const CellTemplate& t : templates) {
        const std::uint8_t d = a.at(a.index(t.slot, b[t.lhs], b[t.rhs]));
        if (!d) continue;
        ++r.shared;
        if (d != b[t.out] + 1) {
            r.conflict = true;
            if (stop_on_conflict) return r;
        }
    }
    return r;
}

void check_search_size(Residue n, std::uint32_t size) {
    if (n < 1) throw Error("modulus must be positive");
    if (size < 3ull * n) throw Error("cipherspace must hold 3n values");
    if (size > kMaxSearchSize) throw GuardError("embedding searches need S <= " + std::to_string(kMaxSearchSize));
}

/// Interleaved role order A0,B0,C0,A1,... and the templates that become
/// checkable at each depth of a backtracking assignment.
struct RoleSchedule {
    std::vector<std::uint16_t> order;
    std::vector<std::vector<CellTemplate>> ready;  // by depth
};

RoleSchedule make_schedule(Residue n, std::span<const CellTemplate> templates) {
    RoleSchedule s;
    std::vector<std::size_t> depth_of(3 * n);
    for (Residue x = 0; x < n; ++x)
        for (std::uint16_t k = 0; k < 3; ++k) {
            depth_of[k * n + x] = s.order.size();
            s.order.push_back(static_cast<std::uint16_t>(k * n + x));
        }
    s.ready.resize(s.order.size());
    for (const CellTemplate& t : templates)
        s.ready[std::max({depth_of[t.lhs], depth_of[t.rhs], depth_of[t.out]})].push_back(t);
    return s;
}

/// Depth-first assignment of all roles with a per-cell pruning predicate.
/// Emits full role vectors (in role order, not schedule order).
void backtrack(std::uint32_t size, const RoleSchedule& sched,
               const std::function<bool(const CellTemplate&, std::span<const Cipher>)>& cell_ok,
               const std::function<void(std::span<const Cipher>)>& emit, std::optional<Cipher> first_value = {}) {
    std::vector<Cipher> roles(sched.order.size(), 0);
    std::vector<bool> used(size, false);
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == sched.order.size()) {
            emit(roles);
            return;
        }
        const std::uint16_t role = sched.order[depth];
        Cipher lo = 0, hi = size;
        if (depth == 0 && first_value) lo = *first_value, hi = *first_value + 1;
        for (Cipher v = lo; v < hi; ++v) {
            if (used[v]) continue;
            roles[role] = v;
            bool ok = true;
            for (const CellTemplate& t : sched.ready[depth])
                if (!cell_ok(t, roles)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            used[v] = true;
            rec(depth + 1);
            used[v] = false;
        }
    };
    rec(0);
}

}  // namespace

std::vector<ConstrainedCell> CandidateEmbedding::constrained_cells(std::span<const OpKind> ops) const {
    check_ops(ops);
    std::vector<ConstrainedCell> out;
    for (const CellTemplate& t : make_templates(n_, ops))
        out.push_back(ConstrainedCell{t.op, roles_[t.lhs], roles_[t.rhs], roles_[t.out]});
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::uint64_t> count_candidates(Residue n, std::uint32_t size) {
    if (size < 3ull * n) return 0;
    std::uint64_t c = 1;
    for (std::uint64_t i = 0; i < 3ull * n; ++i) {
        const std::uint64_t f = size - i;
        if (c > UINT64_MAX / f) return std::nullopt;
        c *= f;
    }
    return c;
}

CandidateList enumerate_candidates(Residue n, std::uint32_t size, const EnumerateOptions& options) {
    check_search_size(n, size);
    CandidateList list;
    const auto total = count_candidates(n, size);
    if (!total) throw GuardError("candidate count overflows 64 bits");
    list.total = *total;
    list.multiplier = options.symmetry ? size : 1;
    const std::uint64_t reduced = list.total / list.multiplier;
    if (reduced > kCandidateGuard && !options.limit)
        throw GuardError(std::to_string(reduced) + " candidates exceed the guard of " +
                         std::to_string(kCandidateGuard) + "; pass an explicit limit");

    const std::size_t roles = 3ull * n;
    std::vector<Cipher> cur(roles);
    std::vector<bool> used(size, false);
    bool stop = false;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (stop) return;
        if (pos == roles) {
            if (options.limit && list.candidates.size() >= *options.limit) {
                list.truncated = true;
                stop = true;
                return;
            }
            list.candidates.emplace_back(n, size, cur);
            return;
        }
        const Cipher hi = (pos == 0 && options.symmetry) ? 1 : size;
        for (Cipher v = 0; v < hi && !stop; ++v) {
            if (used[v]) continue;
            used[v] = true;
            cur[pos] = v;
            rec(pos + 1);
            used[v] = false;
        }
    };
    rec(0);
    return list;
}

Compatibility compatibility(const CandidateEmbedding& a, const CandidateEmbedding& b, std::span<const OpKind> ops) {
    if (a.size() != b.size() || a.modulus() != b.modulus()) throw Error("candidates from different searches");
    const auto ca = a.constrained_cells(ops), cb = b.constrained_cells(ops);
    Compatibility r;
    std::size_t shared = 0;
    std::size_t i = 0, j = 0;
    while (i < ca.size() && j < cb.size()) {
        const CellRef ra{ca[i].op, ca[i].lhs, ca[i].rhs}, rb{cb[j].op, cb[j].lhs, cb[j].rhs};
        if (ra < rb) {
            ++i;
        } else if (rb < ra) {
            ++j;
        } else {
            ++shared;
            if (ca[i].value != cb[j].value && !r.conflict) {
                r.compatible = false;
                r.conflict = Conflict{ra.op, ra.lhs, ra.rhs, ca[i].value, cb[j].value};
            }
            ++i, ++j;
        }
    }
    r.same_embedding = r.compatible && shared == ca.size() && shared == cb.size();
    return r;
}

OverlapResult overlap(const CandidateEmbedding& a, const CandidateEmbedding& b, std::span<const OpKind> ops) {
    if (a.size() != b.size()) throw Error("candidates over different cipherspaces");
    std::set<CellRef> left;
    for (const auto& c : a.constrained_cells(ops)) left.insert(CellRef{c.op, c.lhs, c.rhs});
    OverlapResult r;
    for (const auto& c : b.constrained_cells(ops))
        if (left.count(CellRef{c.op, c.lhs, c.rhs})) r.shared_cells.push_back(CellRef{c.op, c.lhs, c.rhs});
    std::sort(r.shared_cells.begin(), r.shared_cells.end());
    r.overlapping = !r.shared_cells.empty();
    return r;
}

std::vector<CandidateEmbedding> embeddings_in(const TableSet& ts, Residue n, std::span<const OpKind> ops) {
    check_ops(ops);
    if (!ts.materialized()) throw Error("embedding search needs stored tables");
    check_search_size(n, ts.size());
    const auto templates = make_templates(n, ops);
    const RoleSchedule sched = make_schedule(n, templates);
    const Cipher o = ts.origin();
    std::set<CandidateEmbedding> found;
    backtrack(
        ts.size(), sched,
        [&](const CellTemplate& t, std::span<const Cipher> r) {
            return ts.at(t.op, o + r[t.lhs], o + r[t.rhs]) == o + r[t.out];
        },
        [&](std::span<const Cipher> r) {
            found.insert(CandidateEmbedding(n, ts.size(), std::vector<Cipher>(r.begin(), r.end())).canonical());
        });
    return {found.begin(), found.end()};
}

// --- pair scan -----------------------------------------------------------------------

PairSearchReport search_overlapping_pairs(Residue n, std::uint32_t size, const PairSearchOptions& options) {
    check_ops(options.ops);
    check_search_size(n, size);
    const auto total = count_candidates(n, size);
    if (!options.limit && (!total || *total > kMaxPairCandidates))
        throw GuardError("pair scan over " + (total ? std::to_string(*total) : std::string("> 2^64")) +
                         " candidates exceeds the guard of " + std::to_string(kMaxPairCandidates) +
                         "; pass an explicit limit");
    EnumerateOptions eo;
    eo.limit = options.limit;
    const CandidateList list = enumerate_candidates(n, size, eo);
    const auto& cands = list.candidates;
    const auto templates = make_templates(n, options.ops);

    PairSearchReport report;
    report.modulus = n;
    report.size = size;
    report.ops = options.ops;
    report.candidates = cands.size();
    report.truncated = list.truncated;

    std::vector<bool> canonical(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) canonical[i] = cands[i].canonical() == cands[i];

    struct Local {
        std::uint64_t scanned = 0, same = 0, compatible = 0, overlapping = 0, emb_compatible = 0, emb_overlapping = 0;
        std::vector<std::pair<std::size_t, std::size_t>> hits;
    };
    const unsigned workers = std::max(1u, options.workers);
    std::vector<Local> locals(workers);
    auto work = [&](unsigned w) {
        Local& L = locals[w];
        DenseCells dense(size, options.ops.size());
        for (std::size_t i = w; i < cands.size(); i += workers) {
            dense.assign(cands[i].roles(), templates);
            for (std::size_t j = i + 1; j < cands.size(); ++j) {
                ++L.scanned;
                const PairCheck pc = check_pair(dense, cands[j].roles(), templates);
                if (pc.conflict) continue;
                if (pc.shared == templates.size()) {
                    ++L.same;
                    continue;
                }
                ++L.compatible;
                const bool both = canonical[i] && canonical[j];
                if (both) ++L.emb_compatible;
                if (pc.shared == 0) continue;
                ++L.overlapping;
                if (both) {
                    ++L.emb_overlapping;
                    if (L.hits.size() < options.hit_limit) L.hits.emplace_back(i, j);
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();

    std::vector<std::pair<std::size_t, std::size_t>> hits;
    for (const Local& L : locals) {
        report.pairs_scanned += L.scanned;
        report.same_embedding_pairs += L.same;
        report.compatible_pairs += L.compatible;
        report.overlapping_compatible_pairs += L.overlapping;
        report.compatible_embedding_pairs += L.emb_compatible;
        report.overlapping_embedding_pairs += L.emb_overlapping;
        hits.insert(hits.end(), L.hits.begin(), L.hits.end());
    }
    std::sort(hits.begin(), hits.end());
    if (hits.size() > options.hit_limit) hits.resize(options.hit_limit);
    for (auto [i, j] : hits)
        report.hits.push_back(PairHit{cands[i], cands[j], overlap(cands[i], cands[j], options.ops).shared_cells});
    return report;
}

// --- maximum clique -------------------------------------------------------------------

namespace {

class Bitset {
public:
    explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    Bitset operator&(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            for (std::uint64_t w = words_[k]; w; w &= w - 1)
                fn(k * 64 + static_cast<std::size_t>(__builtin_ctzll(w)));
    }

private:
    std::vector<std::uint64_t> words_;
};

struct Graph {
    std::size_t n = 0;
    std::vector<Bitset> adj;
    std::uint64_t edges = 0;
};

/// Branch and bound with greedy colouring bounds. Deterministic for a fixed
/// graph; stops at the node or time budget.
class CliqueSolver {
public:
    CliqueSolver(const Graph& g, std::uint64_t max_nodes, double time_budget)
        : g_(g), max_nodes_(max_nodes), time_budget_(time_budget), start_(std::chrono::steady_clock::now()) {}

    std::vector<std::size_t> solve(const Bitset& candidates, std::size_t lower_bound = 0) {
        best_.clear();
        best_size_ = lower_bound;
        std::vector<std::size_t> current;
        expand(current, candidates);
        return best_;
    }

    bool aborted() const { return aborted_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    void expand(std::vector<std::size_t>& current, Bitset p) {
        if (aborted_) return;
        if (++nodes_ > max_nodes_ ||
            (time_budget_ > 0 && (nodes_ & 1023) == 0 &&
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() > time_budget_)) {
            aborted_ = true;
            return;
        }
        // greedy colouring of p, vertices listed by ascending colour
        std::vector<std::size_t> order;
        std::vector<std::size_t> colour;
        Bitset uncoloured = p;
        std::size_t c = 0;
        while (uncoloured.any()) {
            ++c;
            Bitset q = uncoloured;
            while (q.any()) {
                std::size_t v = 0;
                q.for_each([&](std::size_t i) { v = i; });  // take the highest index
                q.reset(v);
                uncoloured.reset(v);
                order.push_back(v);
                colour.push_back(c);
                q = q & complement(v, q);
            }
        }
        for (std::size_t k = order.size(); k-- > 0;) {
            if (current.size() + colour[k] <= best_size_) return;
            const std::size_t v = order[k];
            current.push_back(v);
            const Bitset np = p & g_.adj[v];
            if (!np.any()) {
                if (current.size() > best_size_) {
                    best_size_ = current.size();
                    best_ = current;
                }
            } else {
                expand(current, np);
            }
            current.pop_back();
            p.reset(v);
            if (aborted_) return;
        }
    }

    // q minus the neighbours of v
    Bitset complement(std::size_t v, const Bitset& q) const {
        Bitset r = q;
        g_.adj[v].for_each([&](std::size_t i) {
            if (r.test(i)) r.reset(i);
        });
        return r;
    }

    const Graph& g_;
    std::uint64_t max_nodes_;
    double time_budget_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::size_t> best_;
    std::size_t best_size_ = 0;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

Graph build_graph(std::span<const CandidateEmbedding> verts, std::span<const CellTemplate> templates,
                  std::size_t slots, unsigned workers) {
    Graph g;
    g.n = verts.size();
    g.adj.assign(g.n, Bitset(g.n));
    if (g.n == 0) return g;
    const std::uint32_t size = verts.front().size();
    workers = std::max(1u, workers);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges(workers);
    auto work = [&](unsigned w) {
        DenseCells dense(size, slots);
        for (std::size_t i = w; i < g.n; i += workers) {
            dense.assign(verts[i].roles(), templates);
            for (std::size_t j = i + 1; j < g.n; ++j) {
                const PairCheck pc = check_pair(dense, verts[j].roles(), templates);
                if (!pc.conflict && pc.shared != templates.size()) edges[w].emplace_back(i, j);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    for (const auto& list : edges)
        for (auto [i, j] : list) {
            g.adj[i].set(j);
            g.adj[j].set(i);
            ++g.edges;
        }
    return g;
}

bool any_overlapping_pair(std::span<const CandidateEmbedding> set, std::span<const OpKind> ops) {
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            if (overlap(set[i], set[j], ops).overlapping) return true;
    return false;
}

}  // namespace

CliqueReport max_compatible_set(std::span<const CandidateEmbedding> candidates, const CliqueBounds& bounds) {
    check_ops(bounds.ops);
    CliqueReport report;
    if (candidates.empty()) return report;
    const Residue n = candidates.front().modulus();
    const std::uint32_t size = candidates.front().size();
    check_search_size(n, size);
    report.modulus = n;
    report.size = size;

    std::set<CandidateEmbedding> distinct;
    for (const auto& c : candidates) distinct.insert(c.canonical());
    std::vector<CandidateEmbedding> verts(distinct.begin(), distinct.end());
    if (verts.size() > bounds.max_candidates) {
        verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(bounds.max_candidates), verts.end());
        report.partial = true;
    }
    const auto templates = make_templates(n, bounds.ops);
    const Graph g = build_graph(verts, templates, bounds.ops.size(), bounds.workers);
    report.vertices = g.n;
    report.edges = g.edges;

    Bitset all(g.n);
    for (std::size_t i = 0; i < g.n; ++i) all.set(i);
    CliqueSolver solver(g, bounds.max_nodes, bounds.time_budget);
    const auto best = solver.solve(all);
    for (std::size_t v : best) report.witness.push_back(verts[v]);
    report.max_size = best.size();
    report.witness_overlapping = any_overlapping_pair(report.witness, bounds.ops);

    // cliques through an overlapping edge
    for (std::size_t u = 0; u < g.n && !solver.aborted(); ++u)
        g.adj[u].for_each([&](std::size_t v) {
            if (v <= u || solver.aborted()) return;
            if (!overlap(verts[u], verts[v], bounds.ops).overlapping) return;
            const auto rest = solver.solve(g.adj[u] & g.adj[v]);
            report.max_overlapping_size = std::max(report.max_overlapping_size, 2 + rest.size());
        });
    report.nodes = solver.nodes();
    report.partial = report.partial || solver.aborted();
    return report;
}

CliqueReport max_compatible_set(Residue n, std::uint32_t size, const CliqueBounds& bounds) {
    check_search_size(n, size);
    check_ops(bounds.ops);
    if (!bounds.symmetry) {
        EnumerateOptions eo;
        eo.limit = bounds.max_candidates;
        const CandidateList list = enumerate_candidates(n, size, eo);
        CliqueReport r = max_compatible_set(list.candidates, bounds);
        r.partial = r.partial || list.truncated;
        return r;
    }

    // Pin the least candidate v0 = (0, 1, ..., 3n-1); the answer is 1 + the
    // maximum clique among embeddings compatible with and different from v0.
    std::vector<Cipher> ident(3 * n);
    for (std::size_t i = 0; i < ident.size(); ++i) ident[i] = static_cast<Cipher>(i);
    const CandidateEmbedding v0(n, size, ident);
    const auto templates = make_templates(n, bounds.ops);
    const RoleSchedule sched = make_schedule(n, templates);
    DenseCells base(size, bounds.ops.size());
    base.assign(v0.roles(), templates);

    CliqueReport report;
    report.modulus = n;
    report.size = size;

    std::vector<CandidateEmbedding> neighbours;
    bool truncated = false;
    struct Stop {};
    try {
        backtrack(
            size, sched,
            [&](const CellTemplate& t, std::span<const Cipher> r) {
                const std::uint8_t d = base.at(base.index(t.slot, r[t.lhs], r[t.rhs]));
                return d == 0 || d == r[t.out] + 1;
            },
            [&](std::span<const Cipher> r) {
                CandidateEmbedding c(n, size, std::vector<Cipher>(r.begin(), r.end()));
                if (!(c.canonical() == c)) return;
                const PairCheck pc = check_pair(base, c.roles(), templates);
                if (pc.conflict || pc.shared == templates.size()) return;
                if (neighbours.size() >= bounds.max_candidates) {
                    truncated = true;
                    throw Stop{};
                }
                neighbours.push_back(std::move(c));
            });
    } catch (const Stop&) {
    }

    const Graph g = build_graph(neighbours, templates, bounds.ops.size(), bounds.workers);
    report.vertices = g.n;
    report.edges = g.edges;
    Bitset all(g.n);
    for (std::size_t i = 0; i < g.n; ++i) all.set(i);
    CliqueSolver solver(g, bounds.max_nodes, bounds.time_budget);
    const auto best = solver.solve(all);
    report.witness.push_back(v0);
    for (std::size_t v : best) report.witness.push_back(neighbours[v]);
    report.max_size = report.witness.size();
    report.witness_overlapping = any_overlapping_pair(report.witness, bounds.ops);

    // any overlapping edge can be relabelled to pass through v0
    for (std::size_t u = 0; u < g.n && !solver.aborted(); ++u) {
        if (check_pair(base, neighbours[u].roles(), templates).shared == 0) continue;
        const auto rest = solver.solve(g.adj[u]);
        report.max_overlapping_size = std::max(report.max_overlapping_size, 2 + rest.size());
    }
    report.nodes = solver.nodes();
    report.partial = truncated || solver.aborted();
    return report;
}

// --- signature closure -------------------------------------------------------------------

SignatureState SignatureState::from_index(int i) {
    SignatureState s;
    s.y_odd = i & 1;
    s.x_odd = (i >> 1) & 1;
    s.truth = static_cast<std::uint8_t>((i >> 2) & 15);
    s.type = static_cast<AbcType>(i >> 6);
    return s;
}

std::string to_string(const SignatureState& s) {
    std::ostringstream out;
    out << to_string(s.type) << " truth=";
    for (int b = 0; b < 4; ++b) out << ((s.truth >> b) & 1);
    out << " x=" << (s.x_odd ? "odd" : "even") << " y=" << (s.y_odd ? "odd" : "even");
    return out.str();
}

namespace {

constexpr std::uint8_t kTruthX = 0b1010;  // bit x + 2y
constexpr std::uint8_t kTruthY = 0b1100;

std::optional<SignatureState> combine_states(OpKind op, const SignatureState& a, const SignatureState& b) {
    const auto t = result_type(SchemeKind::ABC, a.type, b.type);
    if (!t) return std::nullopt;
    SignatureState s;
    s.type = *t;
    s.truth = op == OpKind::Add ? (a.truth ^ b.truth) : (a.truth & b.truth);
    s.x_odd = a.x_odd != b.x_odd;
    s.y_odd = a.y_odd != b.y_odd;
    return s;
}

const std::array<SignatureState, 2>& seeds() {
    static const std::array<SignatureState, 2> s{SignatureState{AbcType::A, kTruthX, true, false},
                                                 SignatureState{AbcType::B, kTruthY, false, true}};
    return s;
}

Expr seed_expr(int k) { return k == 0 ? Expr::leaf("x", AbcType::A) : Expr::leaf("y", AbcType::B); }

}  // namespace

SignatureState signature_of(const Expr& e) {
    if (e.is_leaf()) {
        const Leaf& l = e.as_leaf();
        if (l.name == "x" && l.type == AbcType::A) return seeds()[0];
        if (l.name == "y" && l.type == AbcType::B) return seeds()[1];
        throw Error("signature expressions use only x:A and y:B");
    }
    if (e.op() != OpKind::Add && e.op() != OpKind::Mul) throw Error("signature expressions use only + and *");
    const auto s = combine_states(e.op(), signature_of(e.lhs()), signature_of(e.rhs()));
    if (!s) throw Error("ill-typed expression " + to_string(e));
    return *s;
}

std::vector<SignatureState> ClosureReport::open_class_hits() const {
    std::vector<SignatureState> out;
    for (const auto& s : constant_hits)
        if (s.x_odd && !s.y_odd) out.push_back(s);
    return out;
}

ClosureReport signature_closure() {
    // Saturation by rounds: every round combines all pairs of states known so
    // far, so a state first found in round r has a witness built from older ones.
    std::array<std::optional<Expr>, kSignatureStates> witness;
    std::array<std::size_t, kSignatureStates> ops{};
    for (int k = 0; k < 2; ++k) witness[seeds()[k].index()] = seed_expr(k);

    ClosureReport report;
    for (bool changed = true; changed;) {
        changed = false;
        ++report.iterations;
        std::vector<int> known;
        for (int i = 0; i < kSignatureStates; ++i)
            if (witness[i]) known.push_back(i);
        std::vector<std::pair<int, Expr>> fresh;
        std::vector<std::size_t> fresh_ops;
        for (int a : known)
            for (int b : known)
                for (OpKind op : {OpKind::Add, OpKind::Mul}) {
                    const auto s = combine_states(op, SignatureState::from_index(a), SignatureState::from_index(b));
                    if (!s || witness[s->index()]) continue;
                    const std::size_t cost = ops[a] + ops[b] + 1;
                    auto it = std::find_if(fresh.begin(), fresh.end(), [&](auto& f) { return f.first == s->index(); });
                    if (it == fresh.end()) {
                        fresh.emplace_back(s->index(), Expr::node(op, *witness[a], *witness[b]));
                        fresh_ops.push_back(cost);
                    } else if (cost < fresh_ops[it - fresh.begin()]) {
                        it->second = Expr::node(op, *witness[a], *witness[b]);
                        fresh_ops[it - fresh.begin()] = cost;
                    }
                }
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            witness[fresh[k].first] = fresh[k].second;
            ops[fresh[k].first] = fresh_ops[k];
            changed = true;
        }
    }
    for (int i = 0; i < kSignatureStates; ++i) {
        if (!witness[i]) continue;
        const SignatureState s = SignatureState::from_index(i);
        report.reachable.push_back(s);
        report.witnesses.push_back(*witness[i]);
        report.min_ops.push_back(ops[i]);
        if (s.constant()) report.constant_hits.push_back(s);
    }
    return report;
}

ConstantExprReport enumerate_constant_exprs(std::size_t max_ops) {
    if (max_ops > kMaxConstantSearchOps)
        throw GuardError("constant-expression search needs max ops <= " + std::to_string(kMaxConstantSearchOps));
    // by_ops[k][state] = an expression with exactly k operations and that signature
    std::vector<std::array<std::optional<Expr>, kSignatureStates>> by_ops(max_ops + 1);
    for (int k = 0; k < 2; ++k) by_ops[0][seeds()[k].index()] = seed_expr(k);
    for (std::size_t k = 1; k <= max_ops; ++k)
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = k - 1 - i;
            for (int a = 0; a < kSignatureStates; ++a) {
                if (!by_ops[i][a]) continue;
                for (int b = 0; b < kSignatureStates; ++b) {
                    if (!by_ops[j][b]) continue;
                    for (OpKind op : {OpKind::Add, OpKind::Mul}) {
                        const auto s =
                            combine_states(op, SignatureState::from_index(a), SignatureState::from_index(b));
                        if (!s || by_ops[k][s->index()]) continue;
                        by_ops[k][s->index()] = Expr::node(op, *by_ops[i][a], *by_ops[j][b]);
                    }
                }
            }
        }

    ConstantExprReport report;
    report.max_ops = max_ops;
    std::array<std::optional<Expr>, kSignatureStates> smallest;
    for (std::size_t k = 0; k <= max_ops; ++k) {
        std::size_t count = 0;
        for (int s = 0; s < kSignatureStates; ++s) {
            if (!by_ops[k][s]) continue;
            ++count;
            if (!smallest[s]) smallest[s] = by_ops[k][s];
        }
        report.states_by_ops.push_back(count);
    }
    for (int s = 0; s < kSignatureStates; ++s) {
        if (!smallest[s]) continue;
        const SignatureState st = SignatureState::from_index(s);
        report.reachable.push_back(st);
        if (st.constant()) {
            report.witnesses.push_back(*smallest[s]);
            report.witness_states.push_back(st);
        }
    }
    return report;
}

}  // namespace abct
