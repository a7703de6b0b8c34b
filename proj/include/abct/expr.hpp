#pragma once

// Typed expressions over the four operations: parsing, ABC typing, the
// quaternion image of an expression, occurrence parities and rearrangements.

#include "abct/core.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abct {

struct Leaf {
    std::string name;
    AbcType type = AbcType::A;

    friend bool operator==(const Leaf&, const Leaf&) = default;
    friend auto operator<=>(const Leaf&, const Leaf&) = default;
};

/// Immutable binary expression tree; copies share structure.
class Expr {
public:
    static Expr leaf(std::string name, AbcType type);
    static Expr node(OpKind op, Expr lhs, Expr rhs);

    bool is_leaf() const;
    const Leaf& as_leaf() const;
    OpKind op() const;
    const Expr& lhs() const;
    const Expr& rhs() const;

    std::size_t leaf_count() const;
    /// Leaves in left-to-right order.
    std::vector<Leaf> leaves() const;
    /// Operations in infix (left-to-right) order.
    std::vector<OpKind> ops() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    std::optional<Leaf> leaf;
    OpKind op = OpKind::Add;
    std::optional<Expr> lhs, rhs;
    std::size_t leaves = 1;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

/// Fully parenthesised grammar:
///   expr := leaf | '(' expr op expr ')'    op := + - * /
///   leaf := NAME ':' (A|B|C)               NAME := [a-z][a-z0-9]*
/// Blanks between tokens are ignored.
Expr parse_expr(std::string_view text);
std::string to_string(const Expr& e);

/// nullopt is ILL_TYPED.
std::optional<AbcType> type_of(const Expr& e, SchemeKind scheme = SchemeKind::ABC);
std::string type_name(std::optional<AbcType> t);

// --- quaternion units ------------------------------------------------------

enum class Axis : std::uint8_t { One, I, J, K };

struct QuaternionUnit {
    int sign = 1;  // +1 or -1
    Axis axis = Axis::One;

    friend bool operator==(const QuaternionUnit&, const QuaternionUnit&) = default;
};

QuaternionUnit operator*(QuaternionUnit a, QuaternionUnit b);
std::string to_string(QuaternionUnit q);

/// A -> i, B -> j, C -> k; every operation becomes quaternion multiplication.
QuaternionUnit quaternion_of(const Expr& e);
/// The unit a well-typed expression of type t must map to (up to sign).
Axis axis_of(AbcType t);

// --- parities ----------------------------------------------------------------

enum class Parity : std::uint8_t { Even, Odd };
using ParityProfile = std::map<std::string, Parity>;

ParityProfile parity_profile(const Expr& e);

// --- rearrangements ----------------------------------------------------------

inline constexpr std::size_t kMaxRearrangeLeaves = 8;

/// Every tree with the same leaf multiset: all Catalan(L-1) shapes times all
/// distinct leaf orders. The infix sequence of operations is kept (typing does
/// not look at which operation a node carries). Shapes vary slowest; leaf
/// orders run lexicographically. Throws GuardError above kMaxRearrangeLeaves.
void for_each_rearrangement(const Expr& e, const std::function<void(const Expr&)>& fn);
std::vector<Expr> rearrangements(const Expr& e);

std::uint64_t catalan(unsigned k);

struct Lemma1Options {
    std::size_t max_leaves = 6;
    /// Group expressions by per-variable occurrence parity instead of exact
    /// leaf multiset (b may trade two copies of one variable for two of another).
    bool parity_relaxed = false;
    /// Leaf alphabet; defaults to x:A, y:B, z:C.
    std::vector<Leaf> alphabet;
};

struct Lemma1Counterexample {
    std::string first, second;
    AbcType first_type, second_type;
};

struct Lemma1Report {
    std::size_t max_leaves = 0;
    bool parity_relaxed = false;
    std::uint64_t expressions = 0;       // trees enumerated (all typings)
    std::uint64_t valid_expressions = 0; // trees with an ABC type
    std::uint64_t classes = 0;           // rearrangement classes visited
    std::uint64_t comparisons = 0;       // valid (a, b) pairs covered
    std::vector<Lemma1Counterexample> counterexamples;
    std::vector<std::string> quaternion_mismatches;

    bool holds() const { return counterexamples.empty() && quaternion_mismatches.empty(); }
};

/// Exhaustive check that no valid expression rearranges into a valid
/// expression of a different type, plus the type/quaternion correspondence on
/// every enumerated tree.
Lemma1Report verify_lemma1(const Lemma1Options& options);

}  // namespace abct
