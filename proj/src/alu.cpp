#include "abct/alu.hpp"

#include "abct/rng.hpp"

namespace abct {

Cipher apply(const TableSet& ts, OpKind op, Cipher lhs, Cipher rhs) { return ts.at(op, lhs, rhs); }

namespace {

template <class LeafFn>
Cipher evaluate(const TableSet& ts, const Expr& e, LeafFn&& leaf) {
    if (e.is_leaf()) return leaf(e.as_leaf());
    const Cipher l = evaluate(ts, e.lhs(), leaf);
    const Cipher r = evaluate(ts, e.rhs(), leaf);
    return apply(ts, e.op(), l, r);
}

}  // namespace

Cipher eval_expr(const TableSet& ts, const Codebook& cb, const PlainEnv& env, const Expr& e) {
    if (!type_of(e, cb.scheme())) throw Error("ill-typed expression " + to_string(e));
    return evaluate(ts, e, [&](const Leaf& l) {
        const auto it = env.find(l.name);
        if (it == env.end()) throw Error("unbound variable " + l.name);
        return cb.encrypt(it->second, l.type);
    });
}

Cipher eval_cipher(const TableSet& ts, const CipherEnv& env, const Expr& e) {
    return evaluate(ts, e, [&](const Leaf& l) {
        const auto it = env.find(l.name);
        if (it == env.end()) throw Error("unbound variable " + l.name);
        if (!ts.contains(it->second)) throw Error("binding of " + l.name + " outside cipherspace");
        return it->second;
    });
}

std::optional<Residue> plain_value(const Expr& e, const PlainEnv& env, Residue n) {
    if (e.is_leaf()) {
        const auto it = env.find(e.as_leaf().name);
        if (it == env.end()) throw Error("unbound variable " + e.as_leaf().name);
        return it->second % n;
    }
    const auto l = plain_value(e.lhs(), env, n);
    const auto r = plain_value(e.rhs(), env, n);
    if (!l || !r) return std::nullopt;
    return combine(e.op(), *l, *r, n);
}

HomomorphismReport check_homomorphism(const TableSet& ts, std::span<const Codebook> cbs) {
    HomomorphismReport report;
    for (std::size_t k = 0; k < cbs.size(); ++k) {
        const Codebook& cb = cbs[k];
        if (cb.size() != ts.size() || cb.origin() != ts.origin())
            throw Error("codebook and table disagree on the cipherspace");
        for_each_constrained_cell(cb, kAllOps, [&](OpKind op, Cipher a, Cipher b, Cipher want) {
            ++report.cells_checked;
            const Cipher got = ts.at(op, a, b);
            if (got != want) report.violations.push_back(Violation{k, op, a, b, want, got});
        });
    }
    return report;
}

HomomorphismReport check_homomorphism(const TableSet& ts, const Codebook& cb) {
    return check_homomorphism(ts, std::span<const Codebook>(&cb, 1));
}

HomomorphismReport sample_homomorphism(const TableSet& ts, const Codebook& cb, std::uint64_t per_op,
                                       std::uint64_t seed) {
    if (cb.size() != ts.size() || cb.origin() != ts.origin())
        throw Error("codebook and table disagree on the cipherspace");
    HomomorphismReport report;
    SplitMix64 rng(seed);
    const auto classes = coding_classes(cb.scheme());
    std::vector<std::pair<AbcType, AbcType>> typed;
    for (AbcType a : classes)
        for (AbcType b : classes)
            if (result_type(cb.scheme(), a, b)) typed.emplace_back(a, b);
    const Residue n = cb.modulus();
    for (OpKind op : kAllOps) {
        for (std::uint64_t i = 0; i < per_op;) {
            const auto [t1, t2] = typed[rng.uniform(typed.size())];
            const auto x = static_cast<Residue>(rng.uniform(n));
            const auto y = static_cast<Residue>(rng.uniform(n));
            const auto z = combine(op, x, y, n);
            if (!z) continue;  // non-unit divisor: the cell is free
            ++i;
            ++report.cells_checked;
            const Cipher a = cb.encrypt(x, t1), b = cb.encrypt(y, t2);
            const Cipher want = cb.encrypt(*z, *result_type(cb.scheme(), t1, t2));
            const Cipher got = ts.at(op, a, b);
            if (got != want) report.violations.push_back(Violation{0, op, a, b, want, got});
        }
    }
    return report;
}

}  // namespace abct
