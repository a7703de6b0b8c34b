#include "abct/core.hpp"

#include <numeric>
#include <tuple>
#include <utility>

namespace abct {

namespace {

constexpr std::array<AbcType, 1> kPlainClasses{AbcType::A};
constexpr std::array<AbcType, 2> kAbClasses{AbcType::A, AbcType::B};
constexpr std::array<AbcType, 3> kAbcClasses{AbcType::A, AbcType::B, AbcType::C};

}  // namespace

std::string_view to_string(AbcType t) {
    switch (t) {
    case AbcType::A: return "A";
    case AbcType::B: return "B";
    case AbcType::C: return "C";
    case AbcType::X: return "X";
    }
    return "?";
}

std::string_view to_string(OpKind op) {
    switch (op) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    }
    return "?";
}

std::string_view to_string(SchemeKind s) {
    switch (s) {
    case SchemeKind::Plain: return "plain";
    case SchemeKind::AB: return "ab";
    case SchemeKind::ABC: return "abc";
    }
    return "?";
}

std::string_view op_symbol(OpKind op) {
    switch (op) {
    case OpKind::Add: return "+";
    case OpKind::Sub: return "-";
    case OpKind::Mul: return "*";
    case OpKind::Div: return "/";
    }
    return "?";
}

std::optional<AbcType> parse_type(std::string_view s) {
    if (s == "A") return AbcType::A;
    if (s == "B") return AbcType::B;
    if (s == "C") return AbcType::C;
    if (s == "X") return AbcType::X;
    return std::nullopt;
}

std::optional<OpKind> parse_op(std::string_view s) {
    for (OpKind op : kAllOps)
        if (s == to_string(op) || s == op_symbol(op)) return op;
    return std::nullopt;
}

std::optional<SchemeKind> parse_scheme(std::string_view s) {
    for (SchemeKind k : {SchemeKind::Plain, SchemeKind::AB, SchemeKind::ABC})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

std::span<const AbcType> coding_classes(SchemeKind s) {
    switch (s) {
    case SchemeKind::Plain: return kPlainClasses;
    case SchemeKind::AB: return kAbClasses;
    case SchemeKind::ABC: return kAbcClasses;
    }
    return {};
}

std::size_t class_count(SchemeKind s) { return coding_classes(s).size(); }

bool is_coding_class(SchemeKind s, AbcType t) {
    for (AbcType c : coding_classes(s))
        if (c == t) return true;
    return false;
}

std::optional<AbcType> result_type(SchemeKind s, AbcType lhs, AbcType rhs) {
    if (!is_coding_class(s, lhs) || !is_coding_class(s, rhs)) return std::nullopt;
    switch (s) {
    case SchemeKind::Plain:
        return AbcType::A;
    case SchemeKind::AB:
        if (lhs == rhs) return std::nullopt;
        return lhs;
    case SchemeKind::ABC:
        if (lhs == AbcType::A && rhs == AbcType::B) return AbcType::C;
        if (lhs == AbcType::B && rhs == AbcType::C) return AbcType::A;
        if (lhs == AbcType::C && rhs == AbcType::A) return AbcType::B;
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Residue> inverse_mod(Residue y, Residue n) {
    // extended Euclid on signed 64-bit
    std::int64_t r0 = n, r1 = y % n, s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
    }
    if (r0 != 1) return std::nullopt;
    std::int64_t inv = s0 % static_cast<std::int64_t>(n);
    if (inv < 0) inv += n;
    return static_cast<Residue>(inv);
}

std::optional<Residue> combine(OpKind op, Residue x, Residue y, Residue n) {
    const std::uint64_t a = x % n, b = y % n, m = n;
    switch (op) {
    case OpKind::Add: return static_cast<Residue>((a + b) % m);
    case OpKind::Sub: return static_cast<Residue>((a + m - b) % m);
    case OpKind::Mul: return static_cast<Residue>((a * b) % m);
    case OpKind::Div: {
        const auto inv = inverse_mod(y, n);
        if (!inv) return std::nullopt;
        return static_cast<Residue>((a * *inv) % m);
    }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Codebook::Codebook(Residue modulus, std::uint32_t padding, SchemeKind scheme,
                   std::vector<std::vector<Cipher>> maps, Cipher origin)
    : modulus_(modulus), padding_(padding), scheme_(scheme), origin_(origin), maps_(std::move(maps)) {
    if (modulus_ < 1) throw Error("codebook modulus must be positive");
    const std::size_t classes = class_count(scheme_);
    if (maps_.size() != classes) throw Error("codebook needs one map per coding class");
    const std::uint64_t size = static_cast<std::uint64_t>(classes) * modulus_ + padding_;
    if (size > (1ull << 31)) throw GuardError("cipherspace too large");
    inverse_.assign(size, Decoded{});
    std::vector<bool> used(size, false);
    for (std::size_t k = 0; k < classes; ++k) {
        if (maps_[k].size() != modulus_) throw Error("codebook map has wrong length");
        for (Residue x = 0; x < modulus_; ++x) {
            const Cipher c = maps_[k][x];
            if (c < origin_ || c - origin_ >= size) throw Error("codebook value outside cipherspace");
            const auto slot = c - origin_;
            if (used[slot]) throw Error("codebook maps are not disjoint injections");
            used[slot] = true;
            inverse_[slot] = Decoded{x, coding_classes(scheme_)[k]};
        }
    }
}

Cipher Codebook::encrypt(Residue x, AbcType t) const {
    if (x >= modulus_) throw Error("plain value " + std::to_string(x) + " outside modulus");
    if (!is_coding_class(scheme_, t))
        throw Error("type " + std::string(to_string(t)) + " is not a coding class of this scheme");
    return maps_[index_of(t)][x];
}

Decoded Codebook::decrypt(Cipher c) const {
    if (!contains(c)) throw Error("cipher value " + std::to_string(c) + " outside cipherspace");
    return inverse_[c - origin_];
}

std::span<const Cipher> Codebook::coding(AbcType t) const {
    if (!is_coding_class(scheme_, t)) return {};
    return maps_[index_of(t)];
}

std::vector<Cipher> Codebook::padding_values() const {
    std::vector<Cipher> out;
    for (std::uint32_t i = 0; i < size(); ++i)
        if (inverse_[i].is_padding()) out.push_back(origin_ + i);
    return out;
}

std::optional<Cipher> forced_value(const Codebook& cb, OpKind op, Cipher lhs, Cipher rhs) {
    const Decoded a = cb.decrypt(lhs);
    const Decoded b = cb.decrypt(rhs);
    const auto t = result_type(cb.scheme(), a.type, b.type);
    if (!t) return std::nullopt;
    const auto z = combine(op, a.value, b.value, cb.modulus());
    if (!z) return std::nullopt;
    return cb.encrypt(*z, *t);
}

// ---------------------------------------------------------------------------

TableSet::TableSet(std::uint32_t size, Cipher origin, Provenance provenance)
    : size_(size), origin_(origin), provenance_(std::move(provenance)) {
    if (size_ == 0) throw Error("empty cipherspace");
    if (size_ > kMaxMaterialized)
        throw GuardError("cipherspace of size " + std::to_string(size_) + " exceeds the materialization guard " +
                         std::to_string(kMaxMaterialized));
    for (auto& m : cells_) m.assign(static_cast<std::size_t>(size_) * size_, 0);
}

TableSet::TableSet(std::uint32_t size, std::shared_ptr<const CellSource> source, Cipher origin,
                   Provenance provenance)
    : size_(size), origin_(origin), provenance_(std::move(provenance)), source_(std::move(source)) {
    if (size_ == 0) throw Error("empty cipherspace");
    if (!source_) throw Error("functional table needs a cell source");
}

void TableSet::check_operand(Cipher c) const {
    if (!contains(c)) throw Error("operand " + std::to_string(c) + " outside cipherspace");
}

Cipher TableSet::at(OpKind op, Cipher lhs, Cipher rhs) const {
    check_operand(lhs);
    check_operand(rhs);
    if (source_) return source_->cell(op, lhs, rhs);
    return origin_ + cells_[index_of(op)][slot(lhs, rhs)];
}

void TableSet::set(OpKind op, Cipher lhs, Cipher rhs, Cipher value) {
    if (source_) throw Error("functional tables are read-only");
    check_operand(lhs);
    check_operand(rhs);
    check_operand(value);
    cells_[index_of(op)][slot(lhs, rhs)] = static_cast<std::uint16_t>(value - origin_);
}

TableSet TableSet::materialize() const {
    TableSet out(size_, origin_, provenance_);
    if (!source_) {
        out.cells_ = cells_;
        return out;
    }
    for (OpKind op : kAllOps)
        for (Cipher a = origin_; a < origin_ + size_; ++a)
            for (Cipher b = origin_; b < origin_ + size_; ++b) out.set(op, a, b, source_->cell(op, a, b));
    return out;
}

bool operator==(const TableSet& a, const TableSet& b) {
    if (a.size_ != b.size_ || a.origin_ != b.origin_ || !(a.provenance_ == b.provenance_)) return false;
    if (a.materialized() && b.materialized()) return a.cells_ == b.cells_;
    for (OpKind op : kAllOps)
        for (Cipher x = a.origin_; x < a.origin_ + a.size_; ++x)
            for (Cipher y = a.origin_; y < a.origin_ + a.size_; ++y)
                if (a.at(op, x, y) != b.at(op, x, y)) return false;
    return true;
}

}  // namespace abct
