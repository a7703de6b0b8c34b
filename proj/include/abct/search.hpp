#pragma once

// Exhaustive searches over ABC embeddings and over two-variable typed
// expressions modulo 2.
//
// An embedding candidate is an injective assignment of cipher values to the
// roles A0..A(n-1), B0.., C0.. . Its constrained cells are the cells the
// homomorphism condition forces under that codebook. Two candidates are
// compatible when no cell is forced to two different values, and overlap when
// their constrained-cell index sets intersect. Candidates whose constrained
// cells are identical (the three cyclic rotations A->B->C->A of one role
// vector always are) are the same embedding.

#include "abct/core.hpp"
#include "abct/expr.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace abct {

/// ADD and MUL: the default operation set for embedding searches.
inline constexpr std::array<OpKind, 2> kEmbeddingOps{OpKind::Add, OpKind::Mul};

struct ConstrainedCell {
    OpKind op;
    Cipher lhs, rhs, value;

    friend bool operator==(const ConstrainedCell&, const ConstrainedCell&) = default;
    friend auto operator<=>(const ConstrainedCell&, const ConstrainedCell&) = default;
};

struct CellRef {
    OpKind op;
    Cipher lhs, rhs;

    friend bool operator==(const CellRef&, const CellRef&) = default;
    friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

class CandidateEmbedding {
public:
    CandidateEmbedding(Residue n, std::uint32_t size, std::vector<Cipher> roles);
    static CandidateEmbedding from_codebook(const Codebook& cb);

    Residue modulus() const { return n_; }
    std::uint32_t size() const { return size_; }
    /// A0..A(n-1), B0..B(n-1), C0..C(n-1)
    const std::vector<Cipher>& roles() const { return roles_; }

    Codebook codebook() const;
    std::vector<ConstrainedCell> constrained_cells(std::span<const OpKind> ops = kEmbeddingOps) const;

    /// Role vector rotated A->B->C->A (same constrained cells).
    CandidateEmbedding rotated() const;
    /// Lexicographically least of the three rotations.
    CandidateEmbedding canonical() const;

    friend bool operator==(const CandidateEmbedding&, const CandidateEmbedding&) = default;
    friend auto operator<=>(const CandidateEmbedding&, const CandidateEmbedding&) = default;

private:
    Residue n_;
    std::uint32_t size_;
    std::vector<Cipher> roles_;
};

std::string to_string(const CandidateEmbedding& e);

/// S! / (S - 3n)!, or nullopt on 64-bit overflow.
std::optional<std::uint64_t> count_candidates(Residue n, std::uint32_t size);

inline constexpr std::uint64_t kCandidateGuard = 1'000'000'000ull;
inline constexpr std::uint32_t kMaxSearchSize = 255;

struct EnumerateOptions {
    /// Keep only candidates with A0 = 0; every other value of A0 gives the
    /// same count by relabelling, so multiplier = S.
    bool symmetry = false;
    std::optional<std::uint64_t> limit{};
};

struct CandidateList {
    std::vector<CandidateEmbedding> candidates;  // lexicographic by role vector
    std::uint64_t total = 0;                     // full count, before reduction and limit
    std::uint64_t multiplier = 1;
    bool truncated = false;
};

/// Throws GuardError when the (reduced) count exceeds kCandidateGuard and no limit is set.
CandidateList enumerate_candidates(Residue n, std::uint32_t size, const EnumerateOptions& options = {});

struct Conflict {
    OpKind op;
    Cipher lhs, rhs, first, second;
};

struct Compatibility {
    bool compatible = true;
    bool same_embedding = false;
    std::optional<Conflict> conflict;  // witness when incompatible
};

Compatibility compatibility(const CandidateEmbedding& a, const CandidateEmbedding& b,
                            std::span<const OpKind> ops = kEmbeddingOps);

struct OverlapResult {
    bool overlapping = false;
    std::vector<CellRef> shared_cells;
};

OverlapResult overlap(const CandidateEmbedding& a, const CandidateEmbedding& b,
                      std::span<const OpKind> ops = kEmbeddingOps);

/// Distinct embeddings (canonical role vectors, ascending) whose constrained
/// cells all agree with the table.
std::vector<CandidateEmbedding> embeddings_in(const TableSet& ts, Residue n,
                                              std::span<const OpKind> ops = kEmbeddingOps);

struct PairSearchOptions {
    std::vector<OpKind> ops{kEmbeddingOps.begin(), kEmbeddingOps.end()};
    unsigned workers = 1;
    std::size_t hit_limit = 64;
    std::optional<std::uint64_t> limit{};  // candidate limit
};

struct PairHit {
    CandidateEmbedding first, second;
    std::vector<CellRef> shared_cells;
};

struct PairSearchReport {
    Residue modulus = 0;
    std::uint32_t size = 0;
    std::vector<OpKind> ops;
    std::uint64_t candidates = 0;
    std::uint64_t pairs_scanned = 0;
    std::uint64_t same_embedding_pairs = 0;
    std::uint64_t compatible_pairs = 0;            // distinct embeddings, over role-vector pairs
    std::uint64_t overlapping_compatible_pairs = 0;
    std::uint64_t compatible_embedding_pairs = 0;  // both members canonical
    std::uint64_t overlapping_embedding_pairs = 0;
    std::vector<PairHit> hits;  // first hit_limit overlapping compatible embedding pairs
    bool truncated = false;
};

inline constexpr std::uint64_t kMaxPairCandidates = 100'000;

/// Scans every unordered pair of candidates. Throws GuardError above
/// kMaxPairCandidates candidates unless a limit is given.
PairSearchReport search_overlapping_pairs(Residue n, std::uint32_t size, const PairSearchOptions& options = {});

struct CliqueBounds {
    /// Candidates considered for the clique (after pinning and rotation dedup).
    std::uint64_t max_candidates = 60'000;
    /// Branch-and-bound node budget (deterministic).
    std::uint64_t max_nodes = 2'000'000'000ull;
    /// Wall-clock budget in seconds; 0 disables it.
    double time_budget = 0;
    /// Pin one clique member to the least candidate; exact because relabelling
    /// the cipherspace acts transitively on candidates and preserves compatibility.
    bool symmetry = true;
    std::vector<OpKind> ops{kEmbeddingOps.begin(), kEmbeddingOps.end()};
    unsigned workers = 1;
};

struct CliqueReport {
    Residue modulus = 0;
    std::uint32_t size = 0;
    std::uint64_t vertices = 0;   // candidates in the graph actually searched
    std::uint64_t edges = 0;
    std::size_t max_size = 0;
    std::vector<CandidateEmbedding> witness;  // a maximum set; any prefix witnesses a smaller size
    bool witness_overlapping = false;         // does the witness contain an overlapping pair
    /// Largest set containing at least one overlapping pair (0 when no
    /// overlapping compatible pair exists).
    std::size_t max_overlapping_size = 0;
    std::uint64_t nodes = 0;
    bool partial = false;  // a bound was hit; max_size is a lower bound
};

CliqueReport max_compatible_set(Residue n, std::uint32_t size, const CliqueBounds& bounds = {});
/// Maximum clique over an explicit candidate set (no symmetry reduction).
CliqueReport max_compatible_set(std::span<const CandidateEmbedding> candidates, const CliqueBounds& bounds = {});

// --- constant-valued expressions modulo 2 --------------------------------------------

/// (type, truth table over (x, y) in {0,1}^2, occurrence parities of x and y).
/// Truth-table bit x + 2y holds the value at (x, y).
struct SignatureState {
    AbcType type = AbcType::A;
    std::uint8_t truth = 0;
    bool x_odd = false;
    bool y_odd = false;

    int index() const { return (static_cast<int>(type) * 16 + truth) * 4 + (x_odd ? 2 : 0) + (y_odd ? 1 : 0); }
    static SignatureState from_index(int i);
    bool constant() const { return truth == 0x0 || truth == 0xF; }

    friend bool operator==(const SignatureState&, const SignatureState&) = default;
};

inline constexpr int kSignatureStates = 3 * 16 * 4;

std::string to_string(const SignatureState& s);
SignatureState signature_of(const Expr& e);  // leaves must be x:A and y:B, ops + and *

struct ClosureReport {
    std::vector<SignatureState> reachable;  // ascending index
    std::vector<Expr> witnesses;            // parallel to reachable, a smallest expression each
    std::vector<std::size_t> min_ops;       // parallel to reachable
    std::vector<SignatureState> constant_hits;
    std::size_t iterations = 0;

    /// Constant-valued expressions with x odd and y even (the open case).
    std::vector<SignatureState> open_class_hits() const;
};

/// Least fixpoint from x:A and y:B under + and * modulo 2 with ABC typing.
ClosureReport signature_closure();

inline constexpr std::size_t kMaxConstantSearchOps = 24;

struct ConstantExprReport {
    std::size_t max_ops = 0;
    std::vector<std::size_t> states_by_ops;     // states realised with exactly k operations
    std::vector<SignatureState> reachable;      // union over k <= max_ops, ascending index
    std::vector<Expr> witnesses;                // one smallest expression per constant state
    std::vector<SignatureState> witness_states; // parallel to witnesses
};

ConstantExprReport enumerate_constant_exprs(std::size_t max_ops);

}  // namespace abct
