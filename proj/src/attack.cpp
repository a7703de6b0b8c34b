#include "abct/attack.hpp"

#include "abct/forge.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace abct {

std::string_view to_string(AttackKind k) {
    switch (k) {
    case AttackKind::Doubling: return "DOUBLING";
    case AttackKind::SelfSub: return "SELF_SUB";
    case AttackKind::SelfDiv: return "SELF_DIV";
    case AttackKind::Lagrange: return "LAGRANGE";
    case AttackKind::AbDefeat: return "AB_DEFEAT";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Reliable: return "RELIABLE";
    case Verdict::Unreliable: return "UNRELIABLE";
    case Verdict::NoClaim: return "NO_CLAIM";
    }
    return "?";
}

std::optional<AttackKind> parse_attack(std::string_view s) {
    for (AttackKind k : kAllAttacks)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

Residue attack_target(AttackKind k) {
    switch (k) {
    case AttackKind::Doubling:
    case AttackKind::SelfSub: return 0;
    case AttackKind::SelfDiv:
    case AttackKind::Lagrange:
    case AttackKind::AbDefeat: return 1;
    }
    return 0;
}

Cipher BlackBoxAlu::operator()(OpKind op, Cipher lhs, Cipher rhs) {
    const Cipher r = ts_.at(op, lhs, rhs);
    log_.push_back(AluCall{op, lhs, rhs, r});
    return r;
}

namespace attacker {

std::optional<Cipher> doubling(BlackBoxAlu& alu, Cipher start) {
    std::set<Cipher> seen{start};
    Cipher v = start;
    for (;;) {
        const Cipher w = alu(OpKind::Add, v, v);
        if (w == v) return v;
        if (!seen.insert(w).second) return std::nullopt;
        v = w;
    }
}

Cipher self_sub(BlackBoxAlu& alu, Cipher c) { return alu(OpKind::Sub, c, c); }

Cipher self_div(BlackBoxAlu& alu, Cipher c) { return alu(OpKind::Div, c, c); }

Cipher lagrange(BlackBoxAlu& alu, Cipher c, unsigned squarings) {
    for (unsigned i = 0; i < squarings; ++i) c = alu(OpKind::Mul, c, c);
    return c;
}

std::pair<Cipher, Cipher> ab_defeat(BlackBoxAlu& alu, Cipher c1, Cipher c2) {
    const Cipher p = alu(OpKind::Mul, c1, c2);
    const Cipher q = alu(OpKind::Mul, c2, c1);
    return {alu(OpKind::Div, p, q), alu(OpKind::Div, q, p)};
}

}  // namespace attacker

namespace {

std::optional<unsigned> power_of_two_exponent(Residue n) {
    if (n == 0 || (n & (n - 1)) != 0) return std::nullopt;
    unsigned w = 0;
    while ((Residue{1} << w) < n) ++w;
    return w;
}

bool is_unit(Residue x, Residue n) { return inverse_mod(x, n).has_value(); }

std::vector<std::vector<Cipher>> admissible_observations(const Codebook& cb, AttackKind kind) {
    std::vector<std::vector<Cipher>> out;
    const Residue n = cb.modulus();
    const auto classes = coding_classes(cb.scheme());
    switch (kind) {
    case AttackKind::Doubling:
    case AttackKind::SelfSub:
        for (AbcType t : classes)
            for (Residue x = 0; x < n; ++x) out.push_back({cb.encrypt(x, t)});
        break;
    case AttackKind::SelfDiv:
    case AttackKind::Lagrange:
        for (AbcType t : classes)
            for (Residue x = 0; x < n; ++x)
                if (is_unit(x, n)) out.push_back({cb.encrypt(x, t)});
        break;
    case AttackKind::AbDefeat:
        for (AbcType t1 : classes)
            for (AbcType t2 : classes) {
                if (!result_type(cb.scheme(), t1, t2)) continue;
                for (Residue x = 0; x < n; ++x)
                    for (Residue y = 0; y < n; ++y)
                        if (is_unit(x, n) && is_unit(y, n)) out.push_back({cb.encrypt(x, t1), cb.encrypt(y, t2)});
            }
        break;
    }
    return out;
}

struct Attempt {
    std::vector<Cipher> claimed;
    bool success = false;
    std::vector<AluCall> transcript;
};

Attempt attempt(const TableSet& ts, const Codebook& cb, AttackKind kind, const std::vector<Cipher>& obs) {
    BlackBoxAlu alu(ts);
    Attempt a;
    const Residue target = attack_target(kind);
    auto hits = [&](Cipher c) {
        const Decoded d = cb.decrypt(c);
        return !d.is_padding() && d.value == target;
    };
    switch (kind) {
    case AttackKind::Doubling:
        if (auto c = attacker::doubling(alu, obs[0])) {
            a.claimed = {*c};
            a.success = hits(*c);
        }
        break;
    case AttackKind::SelfSub:
        a.claimed = {attacker::self_sub(alu, obs[0])};
        a.success = hits(a.claimed[0]);
        break;
    case AttackKind::SelfDiv:
        a.claimed = {attacker::self_div(alu, obs[0])};
        a.success = hits(a.claimed[0]);
        break;
    case AttackKind::Lagrange:
        a.claimed = {attacker::lagrange(alu, obs[0], *power_of_two_exponent(cb.modulus()) - 1)};
        a.success = hits(a.claimed[0]);
        break;
    case AttackKind::AbDefeat: {
        const auto [r1, r2] = attacker::ab_defeat(alu, obs[0], obs[1]);
        a.claimed = {r1, r2};
        const Decoded d1 = cb.decrypt(r1), d2 = cb.decrypt(r2);
        a.success = d1 == Decoded{1, cb.decrypt(obs[0]).type} && d2 == Decoded{1, cb.decrypt(obs[1]).type};
        break;
    }
    }
    a.transcript = alu.transcript();
    return a;
}

void check_parameters(const TableSet& ts, const Codebook& cb, AttackKind kind) {
    if (ts.size() != cb.size() || ts.origin() != cb.origin())
        throw Error("codebook and table disagree on the cipherspace");
    if (kind == AttackKind::Lagrange && !attack_applicable(cb.modulus(), kind))
        throw Error("LAGRANGE needs a modulus 2^w with w >= 3, got " + std::to_string(cb.modulus()));
}

AttackOutcome judge(const TableSet& ts, const Codebook& cb, AttackKind kind,
                    const std::vector<std::vector<Cipher>>& observations,
                    const std::optional<std::vector<Cipher>>& shown) {
    AttackOutcome out;
    out.kind = kind;
    out.admissible = observations.size();
    for (const auto& obs : observations) {
        const Attempt a = attempt(ts, cb, kind, obs);
        if (!a.success) {
            if (out.failures == 0) out.witness = obs;
            ++out.failures;
        }
    }
    const auto& first = shown ? *shown : (observations.empty() ? std::vector<Cipher>{} : observations.front());
    if (!first.empty()) {
        Attempt a = attempt(ts, cb, kind, first);
        out.observation = first;
        out.claimed = std::move(a.claimed);
        out.transcript = std::move(a.transcript);
    }
    if (observations.empty())
        out.verdict = Verdict::NoClaim;
    else
        out.verdict = out.failures == 0 ? Verdict::Reliable : Verdict::Unreliable;
    return out;
}

}  // namespace

bool attack_applicable(Residue n, AttackKind kind) {
    if (kind != AttackKind::Lagrange) return true;
    const auto w = power_of_two_exponent(n);
    return w && *w >= 3;
}

AttackOutcome run_attack(const TableSet& ts, const Codebook& cb, AttackKind kind) {
    check_parameters(ts, cb, kind);
    return judge(ts, cb, kind, admissible_observations(cb, kind), std::nullopt);
}

AttackOutcome run_ab_defeat(const TableSet& ts, const Codebook& cb, std::pair<Cipher, Cipher> observed) {
    check_parameters(ts, cb, AttackKind::AbDefeat);
    const auto t1 = cb.decrypt(observed.first).type, t2 = cb.decrypt(observed.second).type;
    if (!result_type(cb.scheme(), t1, t2)) throw Error("observed pair is not a validly typed operation");
    return judge(ts, cb, AttackKind::AbDefeat, admissible_observations(cb, AttackKind::AbDefeat),
                 std::vector<Cipher>{observed.first, observed.second});
}

std::optional<Verdict> MatrixCell::aggregate() const {
    if (!applicable || per_seed.empty()) return std::nullopt;
    for (Verdict v : per_seed)
        if (v != per_seed.front()) return std::nullopt;
    return per_seed.front();
}

AttackMatrix attack_matrix(Residue n, std::span<const std::uint64_t> seeds, unsigned workers) {
    constexpr std::array<SchemeKind, 3> schemes{SchemeKind::Plain, SchemeKind::AB, SchemeKind::ABC};
    if (3ull * n > kMaxMatrixSize)
        throw GuardError("attack matrix needs 3n <= " + std::to_string(kMaxMatrixSize));

    AttackMatrix m;
    m.modulus = n;
    m.seeds.assign(seeds.begin(), seeds.end());
    for (SchemeKind s : schemes) {
        MatrixRow row{s, {}};
        for (AttackKind a : kAllAttacks) {
            auto& c = row.cells[static_cast<std::size_t>(a)];
            c.applicable = attack_applicable(n, a);
            if (c.applicable) c.per_seed.assign(seeds.size(), Verdict::NoClaim);
        }
        m.rows.push_back(row);
    }

    const std::size_t jobs = schemes.size() * seeds.size();
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                const std::size_t si = j / seeds.size(), k = j % seeds.size();
                const SchemeKind s = schemes[si];
                const Codebook cb = build_codebook(n, 0, s, seeds[k], Layout::Random);
                const FillPolicy fill{s == SchemeKind::Plain ? FillKind::RawRandom : FillKind::SafeRandom, 0,
                                      seeds[k]};
                const TableSet ts = build_tables(cb, fill);
                for (AttackKind a : kAllAttacks) {
                    auto& cell = m.rows[si].cells[static_cast<std::size_t>(a)];
                    if (!cell.applicable) continue;
                    cell.per_seed[k] = run_attack(ts, cb, a).verdict;
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return m;
}

}  // namespace abct
