#include "abct/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace abct {

Expr Expr::leaf(std::string name, AbcType type) {
    auto n = std::make_shared<Node>();
    n->leaf = Leaf{std::move(name), type};
    return Expr(std::move(n));
}

Expr Expr::node(OpKind op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->leaves = lhs.leaf_count() + rhs.leaf_count();
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Expr(std::move(n));
}

bool Expr::is_leaf() const { return node_->leaf.has_value(); }

const Leaf& Expr::as_leaf() const {
    if (!is_leaf()) throw Error("expression is not a leaf");
    return *node_->leaf;
}

OpKind Expr::op() const {
    if (is_leaf()) throw Error("leaf has no operation");
    return node_->op;
}

const Expr& Expr::lhs() const {
    if (is_leaf()) throw Error("leaf has no operands");
    return *node_->lhs;
}

const Expr& Expr::rhs() const {
    if (is_leaf()) throw Error("leaf has no operands");
    return *node_->rhs;
}

std::size_t Expr::leaf_count() const { return node_->leaves; }

std::vector<Leaf> Expr::leaves() const {
    std::vector<Leaf> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.is_leaf()) {
            out.push_back(e.as_leaf());
            return;
        }
        walk(e.lhs());
        walk(e.rhs());
    };
    walk(*this);
    return out;
}

std::vector<OpKind> Expr::ops() const {
    std::vector<OpKind> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.is_leaf()) return;
        walk(e.lhs());
        out.push_back(e.op());
        walk(e.rhs());
    };
    walk(*this);
    return out;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.as_leaf() == b.as_leaf();
    return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
}

// --- parsing -------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse() {
        Expr e = expr();
        skip_blanks();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_blanks() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_blanks();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr expr() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr lhs = expr();
            std::optional<OpKind> kind;
            if (peek() != '\0') kind = parse_op(text_.substr(pos_, 1));
            if (!kind) throw ParseError("expected one of + - * /", pos_);
            ++pos_;
            Expr rhs = expr();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return Expr::node(*kind, std::move(lhs), std::move(rhs));
        }
        if (c >= 'a' && c <= 'z') return leaf();
        if (c == '\0') throw ParseError("unexpected end of input", pos_);
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr leaf() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::islower(static_cast<unsigned char>(text_[pos_])) ||
                                       std::isdigit(static_cast<unsigned char>(text_[pos_]))))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (pos_ >= text_.size() || text_[pos_] != ':') throw ParseError("expected ':' after variable name", pos_);
        ++pos_;
        const std::size_t type_pos = pos_;
        if (pos_ >= text_.size()) throw ParseError("expected a type A, B or C", type_pos);
        const char t = text_[pos_];
        if (t == 'X') throw ParseError("X is not a leaf type", type_pos);
        if (t != 'A' && t != 'B' && t != 'C') throw ParseError("expected a type A, B or C", type_pos);
        ++pos_;
        return Expr::leaf(std::move(name), *parse_type(std::string_view(&t, 1)));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
    if (e.is_leaf()) return e.as_leaf().name + ":" + std::string(to_string(e.as_leaf().type));
    return "(" + to_string(e.lhs()) + " " + std::string(op_symbol(e.op())) + " " + to_string(e.rhs()) + ")";
}

// --- typing ----------------------------------------------------------------------

std::optional<AbcType> type_of(const Expr& e, SchemeKind scheme) {
    if (e.is_leaf()) {
        const AbcType t = e.as_leaf().type;
        if (!is_coding_class(scheme, t)) return std::nullopt;
        return t;
    }
    const auto l = type_of(e.lhs(), scheme);
    if (!l) return std::nullopt;
    const auto r = type_of(e.rhs(), scheme);
    if (!r) return std::nullopt;
    return result_type(scheme, *l, *r);
}

std::string type_name(std::optional<AbcType> t) { return t ? std::string(to_string(*t)) : "ILL_TYPED"; }

// --- quaternions -------------------------------------------------------------------

QuaternionUnit operator*(QuaternionUnit a, QuaternionUnit b) {
    // basis products: row = left axis, column = right axis (1, i, j, k)
    static constexpr std::array<std::array<QuaternionUnit, 4>, 4> table{{
        {{{1, Axis::One}, {1, Axis::I}, {1, Axis::J}, {1, Axis::K}}},
        {{{1, Axis::I}, {-1, Axis::One}, {1, Axis::K}, {-1, Axis::J}}},
        {{{1, Axis::J}, {-1, Axis::K}, {-1, Axis::One}, {1, Axis::I}}},
        {{{1, Axis::K}, {1, Axis::J}, {-1, Axis::I}, {-1, Axis::One}}},
    }};
    const QuaternionUnit p = table[static_cast<int>(a.axis)][static_cast<int>(b.axis)];
    return QuaternionUnit{a.sign * b.sign * p.sign, p.axis};
}

std::string to_string(QuaternionUnit q) {
    static constexpr std::array<const char*, 4> names{"1", "i", "j", "k"};
    return std::string(q.sign < 0 ? "-" : "+") + names[static_cast<int>(q.axis)];
}

Axis axis_of(AbcType t) {
    switch (t) {
    case AbcType::A: return Axis::I;
    case AbcType::B: return Axis::J;
    case AbcType::C: return Axis::K;
    case AbcType::X: break;
    }
    throw Error("X has no quaternion unit");
}

QuaternionUnit quaternion_of(const Expr& e) {
    if (e.is_leaf()) return QuaternionUnit{1, axis_of(e.as_leaf().type)};
    return quaternion_of(e.lhs()) * quaternion_of(e.rhs());
}

// --- parities ----------------------------------------------------------------------

ParityProfile parity_profile(const Expr& e) {
    ParityProfile out;
    for (const Leaf& l : e.leaves()) {
        auto [it, inserted] = out.try_emplace(l.name, Parity::Odd);
        if (!inserted) it->second = it->second == Parity::Odd ? Parity::Even : Parity::Odd;
    }
    return out;
}

// --- rearrangements -----------------------------------------------------------------

std::uint64_t catalan(unsigned k) {
    std::uint64_t c = 1;
    for (unsigned i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

namespace {

/// Full binary tree shapes in preorder (true = internal node).
using Shape = std::vector<bool>;

const std::vector<Shape>& shapes(std::size_t leaves) {
    static std::vector<std::vector<Shape>> memo{{}, {Shape{false}}};
    while (memo.size() <= leaves) {
        const std::size_t n = memo.size();
        std::vector<Shape> out;
        for (std::size_t left = 1; left < n; ++left)
            for (const Shape& l : memo[left])
                for (const Shape& r : memo[n - left]) {
                    Shape s{true};
                    s.insert(s.end(), l.begin(), l.end());
                    s.insert(s.end(), r.begin(), r.end());
                    out.push_back(std::move(s));
                }
        memo.push_back(std::move(out));
    }
    return memo[leaves];
}

Expr build(const Shape& shape, std::size_t& at, std::span<const Leaf> leaves, std::size_t& leaf,
           std::span<const OpKind> ops, std::size_t& op) {
    if (!shape[at++]) {
        const Leaf& l = leaves[leaf++];
        return Expr::leaf(l.name, l.type);
    }
    Expr lhs = build(shape, at, leaves, leaf, ops, op);
    const OpKind kind = ops[op++];
    Expr rhs = build(shape, at, leaves, leaf, ops, op);
    return Expr::node(kind, std::move(lhs), std::move(rhs));
}

Expr build(const Shape& shape, std::span<const Leaf> leaves, std::span<const OpKind> ops) {
    std::size_t at = 0, leaf = 0, op = 0;
    return build(shape, at, leaves, leaf, ops, op);
}

struct Folded {
    std::optional<AbcType> type;
    QuaternionUnit q;
};

Folded fold(const Shape& shape, std::size_t& at, std::span<const AbcType> types, std::size_t& leaf) {
    if (!shape[at++]) {
        const AbcType t = types[leaf++];
        return Folded{t, QuaternionUnit{1, axis_of(t)}};
    }
    const Folded l = fold(shape, at, types, leaf);
    const Folded r = fold(shape, at, types, leaf);
    std::optional<AbcType> t;
    if (l.type && r.type) t = result_type(SchemeKind::ABC, *l.type, *r.type);
    return Folded{t, l.q * r.q};
}

}  // namespace

void for_each_rearrangement(const Expr& e, const std::function<void(const Expr&)>& fn) {
    const std::size_t n = e.leaf_count();
    if (n > kMaxRearrangeLeaves)
        throw GuardError("rearrangement needs at most " + std::to_string(kMaxRearrangeLeaves) + " leaves, got " +
                         std::to_string(n));
    std::vector<Leaf> leaves = e.leaves();
    std::sort(leaves.begin(), leaves.end());
    const std::vector<OpKind> ops = e.ops();
    for (const Shape& shape : shapes(n)) {
        std::vector<Leaf> order = leaves;
        do {
            fn(build(shape, order, ops));
        } while (std::next_permutation(order.begin(), order.end()));
    }
}

std::vector<Expr> rearrangements(const Expr& e) {
    std::vector<Expr> out;
    for_each_rearrangement(e, [&](const Expr& r) { out.push_back(r); });
    return out;
}

Lemma1Report verify_lemma1(const Lemma1Options& options) {
    if (options.max_leaves > kMaxRearrangeLeaves)
        throw GuardError("lemma check needs max leaves <= " + std::to_string(kMaxRearrangeLeaves));
    std::vector<Leaf> alphabet = options.alphabet;
    if (alphabet.empty()) alphabet = {{"x", AbcType::A}, {"y", AbcType::B}, {"z", AbcType::C}};
    for (const Leaf& l : alphabet)
        if (l.type == AbcType::X) throw Error("X is not a leaf type");
    const std::size_t k = alphabet.size();

    Lemma1Report report;
    report.max_leaves = options.max_leaves;
    report.parity_relaxed = options.parity_relaxed;

    std::vector<AbcType> types;
    std::vector<Leaf> leaves;
    const std::vector<OpKind> ops(options.max_leaves, OpKind::Mul);
    for (std::size_t n = 1; n <= options.max_leaves; ++n) {
        // group key: per-letter counts (exact) or parities (relaxed)
        struct Group {
            std::array<std::optional<std::string>, 3> witness;
            std::uint64_t valid = 0;
        };
        std::map<std::vector<std::size_t>, Group> groups;
        std::vector<std::size_t> seq(n, 0);
        for (;;) {
            std::vector<std::size_t> key(k, 0);
            types.assign(n, AbcType::A);
            leaves.assign(n, Leaf{});
            for (std::size_t i = 0; i < n; ++i) {
                ++key[seq[i]];
                types[i] = alphabet[seq[i]].type;
                leaves[i] = alphabet[seq[i]];
            }
            if (options.parity_relaxed)
                for (auto& c : key) c %= 2;
            Group& g = groups[key];
            for (const Shape& shape : shapes(n)) {
                std::size_t at = 0, leaf = 0;
                const Folded f = fold(shape, at, types, leaf);
                ++report.expressions;
                if (!f.type) continue;
                ++report.valid_expressions;
                ++g.valid;
                if (f.q.axis != axis_of(*f.type) && report.quaternion_mismatches.size() < 16)
                    report.quaternion_mismatches.push_back(to_string(build(shape, leaves, ops)));
                auto& w = g.witness[index_of(*f.type)];
                if (!w) w = to_string(build(shape, leaves, ops));
            }
            // next sequence over the alphabet
            std::size_t i = n;
            while (i > 0 && ++seq[i - 1] == k) seq[--i] = 0;
            if (i == 0) break;
        }
        for (const auto& [key, g] : groups) {
            ++report.classes;
            report.comparisons += g.valid * g.valid;
            std::optional<std::size_t> seen;
            for (std::size_t t = 0; t < 3; ++t) {
                if (!g.witness[t]) continue;
                if (seen)
                    report.counterexamples.push_back(Lemma1Counterexample{
                        *g.witness[*seen], *g.witness[t], static_cast<AbcType>(*seen), static_cast<AbcType>(t)});
                else
                    seen = t;
            }
        }
    }
    return report;
}

}  // namespace abct
