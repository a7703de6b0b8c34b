#pragma once

// Cipherspace model shared by every other part of the library: type tags,
// operations, codebooks and the four operation tables.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abct {

using Cipher = std::uint32_t;
using Residue = std::uint32_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a request exceeds a size guard (materialization, enumeration).
class GuardError : public Error {
public:
    using Error::Error;
};

enum class AbcType : std::uint8_t { A = 0, B = 1, C = 2, X = 3 };
enum class OpKind : std::uint8_t { Add = 0, Sub = 1, Mul = 2, Div = 3 };
enum class SchemeKind : std::uint8_t { Plain, AB, ABC };

inline constexpr std::array<OpKind, 4> kAllOps{OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div};

std::string_view to_string(AbcType t);
std::string_view to_string(OpKind op);
std::string_view to_string(SchemeKind s);
std::string_view op_symbol(OpKind op);

std::optional<AbcType> parse_type(std::string_view s);
std::optional<OpKind> parse_op(std::string_view s);
std::optional<SchemeKind> parse_scheme(std::string_view s);

constexpr std::size_t index_of(OpKind op) { return static_cast<std::size_t>(op); }
constexpr std::size_t index_of(AbcType t) { return static_cast<std::size_t>(t); }

/// The coding classes of a scheme: {A} for plain, {A,B}, or {A,B,C}.
std::span<const AbcType> coding_classes(SchemeKind s);
std::size_t class_count(SchemeKind s);
bool is_coding_class(SchemeKind s, AbcType t);

/// Typing rule of the scheme. nullopt means the operand pair gives nonsense.
///   ABC: (A,B)->C, (B,C)->A, (C,A)->B
///   AB:  (A,B)->A, (B,A)->B
///   plain: every pair of the single class.
std::optional<AbcType> result_type(SchemeKind s, AbcType lhs, AbcType rhs);

std::optional<Residue> inverse_mod(Residue y, Residue n);

/// Plain arithmetic modulo n. Division multiplies by the modular inverse and
/// is undefined (nullopt) when the divisor is not a unit.
std::optional<Residue> combine(OpKind op, Residue x, Residue y, Residue n);

/// Result of decrypting one cipher value. Padding values carry type X.
struct Decoded {
    Residue value = 0;
    AbcType type = AbcType::X;

    bool is_padding() const { return type == AbcType::X; }
    friend bool operator==(const Decoded&, const Decoded&) = default;
};

/// Per-class injections of [0,n) into the cipherspace [origin, origin+S),
/// S = #classes * n + m. Values outside every image are X padding.
///
/// `origin` is 0 except for hand-written codebooks that label the cipherspace
/// from another base (the 1-bit example tables use 1..6).
class Codebook {
public:
    Codebook(Residue modulus, std::uint32_t padding, SchemeKind scheme,
             std::vector<std::vector<Cipher>> maps, Cipher origin = 0);

    Residue modulus() const { return modulus_; }
    std::uint32_t padding() const { return padding_; }
    SchemeKind scheme() const { return scheme_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(inverse_.size()); }
    Cipher origin() const { return origin_; }

    bool contains(Cipher c) const { return c >= origin_ && c - origin_ < size(); }

    Cipher encrypt(Residue x, AbcType t) const;
    Decoded decrypt(Cipher c) const;

    /// Cipher values of class t, indexed by plain value.
    std::span<const Cipher> coding(AbcType t) const;
    std::vector<Cipher> padding_values() const;

    friend bool operator==(const Codebook& a, const Codebook& b) {
        return a.modulus_ == b.modulus_ && a.padding_ == b.padding_ && a.scheme_ == b.scheme_ &&
               a.origin_ == b.origin_ && a.maps_ == b.maps_;
    }

private:
    Residue modulus_;
    std::uint32_t padding_;
    SchemeKind scheme_;
    Cipher origin_;
    std::vector<std::vector<Cipher>> maps_;  // by class index
    std::vector<Decoded> inverse_;           // by c - origin
};

/// The cell value forced by the homomorphism condition under cb, or nullopt
/// when the cell is free ("nonsense") for that codebook.
std::optional<Cipher> forced_value(const Codebook& cb, OpKind op, Cipher lhs, Cipher rhs);

/// Calls fn(op, lhs, rhs, value) for every constrained cell of cb over the given ops.
template <class Fn>
void for_each_constrained_cell(const Codebook& cb, std::span<const OpKind> ops, Fn&& fn) {
    const auto classes = coding_classes(cb.scheme());
    const Residue n = cb.modulus();
    for (OpKind op : ops) {
        for (AbcType t1 : classes) {
            for (AbcType t2 : classes) {
                const auto t3 = result_type(cb.scheme(), t1, t2);
                if (!t3) continue;
                for (Residue x = 0; x < n; ++x) {
                    for (Residue y = 0; y < n; ++y) {
                        const auto z = combine(op, x, y, n);
                        if (!z) continue;
                        fn(op, cb.encrypt(x, t1), cb.encrypt(y, t2), cb.encrypt(*z, *t3));
                    }
                }
            }
        }
    }
}

/// Cell evaluator for tables too large to store (the keyed construction).
class CellSource {
public:
    virtual ~CellSource() = default;
    virtual Cipher cell(OpKind op, Cipher lhs, Cipher rhs) const = 0;
};

struct Provenance {
    std::string fill = "none";
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One S x S result matrix per operation, either stored or computed on demand.
class TableSet {
public:
    static constexpr std::uint32_t kMaxMaterialized = 1u << 13;

    /// Stored tables, every cell initialised to `origin`.
    TableSet(std::uint32_t size, Cipher origin = 0, Provenance provenance = {});
    /// Functional tables backed by a cell evaluator.
    TableSet(std::uint32_t size, std::shared_ptr<const CellSource> source, Cipher origin = 0,
             Provenance provenance = {});

    std::uint32_t size() const { return size_; }
    Cipher origin() const { return origin_; }
    bool materialized() const { return source_ == nullptr; }
    bool contains(Cipher c) const { return c >= origin_ && c - origin_ < size_; }
    const Provenance& provenance() const { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

    Cipher at(OpKind op, Cipher lhs, Cipher rhs) const;
    void set(OpKind op, Cipher lhs, Cipher rhs, Cipher value);

    /// Copy of a functional table into storage (size guard applies).
    TableSet materialize() const;

    friend bool operator==(const TableSet& a, const TableSet& b);

private:
    std::size_t slot(Cipher lhs, Cipher rhs) const {
        return static_cast<std::size_t>(lhs - origin_) * size_ + (rhs - origin_);
    }
    void check_operand(Cipher c) const;

    std::uint32_t size_;
    Cipher origin_;
    Provenance provenance_;
    std::array<std::vector<std::uint16_t>, 4> cells_;
    std::shared_ptr<const CellSource> source_;
};

}  // namespace abct
