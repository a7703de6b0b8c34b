#include "abct/forge.hpp"

#include "abct/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace abct {

std::string_view to_string(Layout l) {
    switch (l) {
    case Layout::Blocked: return "blocked";
    case Layout::Strided: return "strided";
    case Layout::Random: return "random";
    }
    return "?";
}

std::optional<Layout> parse_layout(std::string_view s) {
    for (Layout l : {Layout::Blocked, Layout::Strided, Layout::Random})
        if (s == to_string(l)) return l;
    return std::nullopt;
}

Codebook build_codebook(Residue n, std::uint32_t m, SchemeKind scheme, std::uint64_t seed, Layout layout) {
    if (n < 2) throw Error("modulus must be at least 2");
    const std::size_t classes = class_count(scheme);
    const std::uint64_t size = classes * static_cast<std::uint64_t>(n) + m;
    if (size > (1ull << 31)) throw GuardError("cipherspace too large");
    std::vector<std::vector<Cipher>> maps(classes, std::vector<Cipher>(n));

    switch (layout) {
    case Layout::Blocked:
        // class blocks in order, labelled from 1, padding last
        for (std::size_t k = 0; k < classes; ++k)
            for (Residue x = 0; x < n; ++x) maps[k][x] = static_cast<Cipher>(1 + k * n + x);
        return Codebook(n, m, scheme, std::move(maps), 1);

    case Layout::Strided: {
        if (m != 0 && m < n) throw Error("strided layout needs padding 0 or at least the modulus");
        const std::size_t stride = classes + (m > 0 ? 1 : 0);
        for (std::size_t k = 0; k < classes; ++k)
            for (Residue x = 0; x < n; ++x) maps[k][x] = static_cast<Cipher>(x * stride + k);
        return Codebook(n, m, scheme, std::move(maps));
    }

    case Layout::Random: {
        std::vector<Cipher> perm(size);
        std::iota(perm.begin(), perm.end(), Cipher{0});
        SplitMix64 rng(seed);
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform(i)]);
        std::size_t next = 0;
        for (std::size_t k = 0; k < classes; ++k)
            for (Residue x = 0; x < n; ++x) maps[k][x] = perm[next++];
        return Codebook(n, m, scheme, std::move(maps));
    }
    }
    throw Error("unknown layout");
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<OpKind, 2> kPairCheckedOps{OpKind::Add, OpKind::Mul};

/// Draws free cells for the safe fill.
class SafeDrawer {
public:
    SafeDrawer(const Codebook& cb, std::uint64_t seed) : cb_(cb), rng_(seed) {
        for (AbcType t : coding_classes(cb.scheme())) {
            auto& lists = outside_[index_of(t)];
            for (std::uint32_t i = 0; i < cb.size(); ++i) {
                const Cipher c = cb.origin() + i;
                const Decoded d = cb.decrypt(c);
                if (d.type == t) continue;
                lists[0].push_back(c);
                if (d.is_padding() || d.value != 0) lists[1].push_back(c);
                if (d.is_padding() || d.value != 1 % cb.modulus()) lists[2].push_back(c);
            }
            for (const auto& l : lists)
                if (l.empty())
                    throw Error("safe fill impossible: no cipher value lies outside class " +
                                std::string(to_string(t)) + " (use a typed scheme or raw fill)");
        }
    }

    Cipher draw(OpKind op, Cipher lhs, Cipher rhs) {
        const Decoded a = cb_.decrypt(lhs);
        const Decoded b = cb_.decrypt(rhs);
        if (a.is_padding() || a.type != b.type) return cb_.origin() + static_cast<Cipher>(rng_.uniform(cb_.size()));
        int which = 0;
        if (lhs == rhs && op == OpKind::Sub) which = 1;
        if (lhs == rhs && op == OpKind::Div) which = 2;
        const auto& list = outside_[index_of(a.type)][which];
        return list[rng_.uniform(list.size())];
    }

private:
    const Codebook& cb_;
    SplitMix64 rng_;
    // [class][0: any outside value, 1: also not an encryption of 0, 2: also not of 1]
    std::array<std::array<std::vector<Cipher>, 3>, 3> outside_;
};

using ForcedMap = std::array<std::vector<std::int64_t>, 4>;

ForcedMap forced_cells(std::span<const Codebook> cbs) {
    const Codebook& first = cbs.front();
    const std::size_t s = first.size();
    ForcedMap forced;
    for (auto& v : forced) v.assign(s * s, -1);
    for (const Codebook& cb : cbs) {
        if (cb.size() != first.size() || cb.origin() != first.origin())
            throw Error("codebooks do not share one cipherspace");
        for_each_constrained_cell(cb, kAllOps, [&](OpKind op, Cipher a, Cipher b, Cipher v) {
            auto& slot = forced[index_of(op)][(a - cb.origin()) * s + (b - cb.origin())];
            if (slot >= 0 && slot != v)
                throw Error("codebooks force different values in " + std::string(to_string(op)) + "(" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
            slot = v;
        });
    }
    return forced;
}

}  // namespace

TableSet build_tables_multi(std::span<const Codebook> cbs, std::uint64_t seed, Provenance provenance) {
    if (cbs.empty()) throw Error("no codebook given");
    const Codebook& primary = cbs.front();
    const std::uint32_t s = primary.size();
    const Cipher o = primary.origin();
    TableSet ts(s, o, std::move(provenance));  // size guard before the forced maps
    const ForcedMap forced = forced_cells(cbs);
    SafeDrawer drawer(primary, seed);
    auto is_free = [&](OpKind op, Cipher a, Cipher b) {
        return forced[index_of(op)][static_cast<std::size_t>(a - o) * s + (b - o)] < 0;
    };
    for (OpKind op : kAllOps) {
        for (Cipher a = o; a < o + s; ++a) {
            for (Cipher b = o; b < o + s; ++b) {
                const auto f = forced[index_of(op)][static_cast<std::size_t>(a - o) * s + (b - o)];
                ts.set(op, a, b, f >= 0 ? static_cast<Cipher>(f) : drawer.draw(op, a, b));
            }
        }
    }

    for (int sweep = 0; sweep < kMaxRepairSweeps; ++sweep) {
        const auto offenders = check_no_accidental_pairs(ts);
        if (offenders.empty()) return ts;
        for (const AccidentalPair& p : offenders) {
            std::set<std::pair<Cipher, Cipher>> cells{{p.x, p.x}, {p.x, p.y}, {p.y, p.x}, {p.y, p.y}};
            bool redrawn = false;
            for (auto [a, b] : cells) {
                if (!is_free(p.op, a, b)) continue;
                ts.set(p.op, a, b, drawer.draw(p.op, a, b));
                redrawn = true;
            }
            if (!redrawn)
                throw Error("accidental pair {" + std::to_string(p.x) + "," + std::to_string(p.y) + "} under " +
                            std::string(to_string(p.op)) + " is fully constrained; seed " + std::to_string(seed));
        }
    }
    throw Error("safe fill did not converge within " + std::to_string(kMaxRepairSweeps) + " sweeps; seed " +
                std::to_string(seed));
}

TableSet build_tables(const Codebook& cb, const FillPolicy& policy) {
    switch (policy.kind) {
    case FillKind::Dual:
        return build_dual(cb, policy.variant, policy.seed).tables;
    case FillKind::SafeRandom: {
        const std::array<Codebook, 1> one{cb};
        return build_tables_multi(one, policy.seed, Provenance{"safe", policy.seed});
    }
    case FillKind::RawRandom: {
        TableSet ts(cb.size(), cb.origin(), Provenance{"raw", policy.seed});
        SplitMix64 rng(policy.seed);
        const Cipher o = cb.origin();
        for (OpKind op : kAllOps)
            for (Cipher a = o; a < o + cb.size(); ++a)
                for (Cipher b = o; b < o + cb.size(); ++b) {
                    const auto f = forced_value(cb, op, a, b);
                    ts.set(op, a, b, f ? *f : o + static_cast<Cipher>(rng.uniform(cb.size())));
                }
        return ts;
    }
    }
    throw Error("unknown fill policy");
}

// ---------------------------------------------------------------------------

Codebook dual_codebook(const Codebook& primary, int variant) {
    if (primary.scheme() != SchemeKind::ABC || primary.modulus() != 2 || primary.padding() != 0)
        throw Error("the dual construction needs a 1-bit ABC codebook without padding");
    if (variant < 0 || variant > 7) throw Error("dual variant must be in 0..7");
    auto pair_of = [&](AbcType t, bool swap) {
        const auto c = primary.coding(t);
        return swap ? std::vector<Cipher>{c[1], c[0]} : std::vector<Cipher>{c[0], c[1]};
    };
    std::vector<std::vector<Cipher>> maps{
        pair_of(AbcType::A, variant & 1),
        pair_of(AbcType::C, variant & 2),
        pair_of(AbcType::B, variant & 4),
    };
    return Codebook(2, 0, SchemeKind::ABC, std::move(maps), primary.origin());
}

Codebook block_swap_codebook(const Codebook& primary) {
    if (primary.scheme() != SchemeKind::ABC) throw Error("block swap needs an ABC codebook");
    auto copy = [&](AbcType t) {
        const auto c = primary.coding(t);
        return std::vector<Cipher>(c.begin(), c.end());
    };
    return Codebook(primary.modulus(), primary.padding(), SchemeKind::ABC,
                    {copy(AbcType::A), copy(AbcType::C), copy(AbcType::B)}, primary.origin());
}

DualBuild build_dual(const Codebook& primary, int variant, std::uint64_t seed) {
    Codebook secondary = dual_codebook(primary, variant);
    const std::array<Codebook, 2> both{primary, secondary};
    TableSet ts = build_tables_multi(both, seed, Provenance{"dual:" + std::to_string(variant), seed});
    return DualBuild{std::move(ts), std::move(secondary)};
}

// ---------------------------------------------------------------------------

KeyedPermutation::KeyedPermutation(std::uint32_t domain, std::uint64_t seed) : domain_(domain) {
    if (domain_ == 0) throw Error("empty permutation domain");
    bits_ = 2;
    while (bits_ < 32 && (std::uint64_t{1} << bits_) < domain_) bits_ += 2;
    half_mask_ = (1u << (bits_ / 2)) - 1;
    SplitMix64 schedule(seed);
    for (auto& k : keys_) k = schedule.next();
}

std::uint32_t KeyedPermutation::feistel(std::uint32_t x) const {
    const int half = bits_ / 2;
    std::uint32_t l = x >> half, r = x & half_mask_;
    for (int i = 0; i < kRounds; ++i) {
        const std::uint32_t f = static_cast<std::uint32_t>(mix64(r ^ keys_[i]) & half_mask_);
        std::tie(l, r) = std::pair{r, l ^ f};
    }
    return (l << half) | r;
}

std::uint32_t KeyedPermutation::feistel_inverse(std::uint32_t y) const {
    const int half = bits_ / 2;
    std::uint32_t l = y >> half, r = y & half_mask_;
    for (int i = kRounds - 1; i >= 0; --i) {
        const std::uint32_t f = static_cast<std::uint32_t>(mix64(l ^ keys_[i]) & half_mask_);
        std::tie(l, r) = std::pair{r ^ f, l};
    }
    return (l << half) | r;
}

std::uint32_t KeyedPermutation::forward(std::uint32_t x) const {
    if (x >= domain_) throw Error("permutation input out of range");
    std::uint32_t y = feistel(x);
    while (y >= domain_) y = feistel(y);
    return y;
}

std::uint32_t KeyedPermutation::inverse(std::uint32_t y) const {
    if (y >= domain_) throw Error("permutation input out of range");
    std::uint32_t x = feistel_inverse(y);
    while (x >= domain_) x = feistel_inverse(x);
    return x;
}

namespace {

class KeyedCells final : public CellSource {
public:
    KeyedCells(Codebook cb, std::uint64_t seed) : cb_(std::move(cb)), seed_(seed) {}

    Cipher cell(OpKind op, Cipher lhs, Cipher rhs) const override {
        if (auto f = forced_value(cb_, op, lhs, rhs)) return *f;
        const std::uint64_t key =
            (static_cast<std::uint64_t>(index_of(op)) << 62) ^ (static_cast<std::uint64_t>(lhs) << 31) ^ rhs;
        return static_cast<Cipher>(mix64(seed_ + kGoldenGamma * (key + 1)) % cb_.size());
    }

private:
    Codebook cb_;
    std::uint64_t seed_;
};

}  // namespace

KeyedBuild build_keyed(Residue n, std::uint64_t seed) {
    if (n < 2) throw Error("modulus must be at least 2");
    if (n > (1u << 29)) throw GuardError("keyed cipherspace too large");
    const std::uint32_t s = 4 * n;
    const KeyedPermutation perm(s, seed);
    std::vector<std::vector<Cipher>> maps(3, std::vector<Cipher>(n));
    for (std::uint32_t t = 0; t < 3; ++t)
        for (Residue x = 0; x < n; ++x) maps[t][x] = perm.forward(4 * x + t);
    Codebook cb(n, n, SchemeKind::ABC, std::move(maps));
    auto cells = std::make_shared<const KeyedCells>(cb, seed);
    return KeyedBuild{TableSet(s, std::move(cells), 0, Provenance{"keyed", seed}), std::move(cb)};
}

// ---------------------------------------------------------------------------

std::vector<AccidentalPair> check_no_accidental_pairs(const TableSet& ts) {
    std::vector<AccidentalPair> out;
    const Cipher lo = ts.origin(), hi = ts.origin() + ts.size();
    for (OpKind op : kPairCheckedOps) {
        std::set<std::pair<Cipher, Cipher>> found;
        auto closed = [&](Cipher x, Cipher y) {
            auto in = [&](Cipher v) { return v == x || v == y; };
            return in(ts.at(op, x, x)) && in(ts.at(op, x, y)) && in(ts.at(op, y, x)) && in(ts.at(op, y, y));
        };
        for (Cipher x = lo; x < hi; ++x) {
            const Cipher d = ts.at(op, x, x);
            if (d == x) {
                // a fixed point, plus any partner closing a pair with it
                found.emplace(x, x);
                for (Cipher y = lo; y < hi; ++y)
                    if (y != x && closed(x, y)) found.emplace(std::min(x, y), std::max(x, y));
            } else if (closed(x, d)) {
                found.emplace(std::min(x, d), std::max(x, d));
            }
        }
        for (auto [x, y] : found) out.push_back(AccidentalPair{op, x, y});
    }
    return out;
}

}  // namespace abct
