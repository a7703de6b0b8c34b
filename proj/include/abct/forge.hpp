#pragma once

// Table construction: codebook layouts, the seeded fills, the two-embedding
// ("dual") construction and the keyed functional tables.

#include "abct/core.hpp"

#include <cstdint>
#include <vector>

namespace abct {

enum class Layout : std::uint8_t {
    Blocked,  // class blocks in order over the labels 1..S; n = 2 ABC gives A={1,2}, B={3,4}, C={5,6}
    Strided,  // c codes (c div k) with type (c mod k), k = #classes (+1 with padding)
    Random,   // seeded uniform placement of every role
};

std::string_view to_string(Layout l);
std::optional<Layout> parse_layout(std::string_view s);

Codebook build_codebook(Residue n, std::uint32_t m, SchemeKind scheme, std::uint64_t seed, Layout layout);

enum class FillKind : std::uint8_t { SafeRandom, Dual, RawRandom };

struct FillPolicy {
    FillKind kind = FillKind::SafeRandom;
    int variant = 0;  // Dual only, 0..7
    std::uint64_t seed = 0;
};

/// Upper bound on repair sweeps of the safe fill.
inline constexpr int kMaxRepairSweeps = 1000;

/// Constrained cells from the codebook, free cells by policy.
///
/// SafeRandom fills each same-class block cell with a value outside that
/// class, keeps self cells x-x and x/x off every encryption of 0 and 1
/// respectively, draws the remaining free cells over the whole cipherspace,
/// and then re-draws free cells until check_no_accidental_pairs passes.
/// Dual delegates to build_dual. Throws Error when repair fails.
TableSet build_tables(const Codebook& cb, const FillPolicy& policy);

/// Safe fill around the constrained cells of several codebooks at once.
/// The same-class blocks are those of `cbs.front()`.
TableSet build_tables_multi(std::span<const Codebook> cbs, std::uint64_t seed, Provenance provenance);

/// Second 1-bit embedding occupying the off-diagonal blocks left free by the
/// primary: A2 on A1's values, B2 on C1's, C2 on B1's. Bit 0/1/2 of `variant`
/// swaps the 0/1 assignment inside the A/B/C pair; variant 0 keeps the primary order.
Codebook dual_codebook(const Codebook& primary, int variant);

/// The same block swap for any modulus, keeping the primary's order in each block.
Codebook block_swap_codebook(const Codebook& primary);

struct DualBuild {
    TableSet tables;
    Codebook secondary;
};

DualBuild build_dual(const Codebook& primary, int variant, std::uint64_t seed);

/// Keyed bijection on [0, S): a 4-round balanced Feistel network on the
/// smallest even bit width covering S, cycle-walking out-of-range outputs.
class KeyedPermutation {
public:
    static constexpr int kRounds = 4;

    KeyedPermutation(std::uint32_t domain, std::uint64_t seed);

    std::uint32_t domain() const { return domain_; }
    int bits() const { return bits_; }

    std::uint32_t forward(std::uint32_t x) const;
    std::uint32_t inverse(std::uint32_t y) const;

private:
    std::uint32_t feistel(std::uint32_t x) const;
    std::uint32_t feistel_inverse(std::uint32_t y) const;

    std::uint32_t domain_;
    int bits_;
    std::uint32_t half_mask_;
    std::array<std::uint64_t, kRounds> keys_{};
};

struct KeyedBuild {
    TableSet tables;  // functional
    Codebook codebook;
};

/// Keyed construction over S = 4n: plaintext slot 4x + t encodes value x with
/// type t (0 A, 1 B, 2 C, 3 X) and the permutation maps slots to ciphers.
/// Free cells are mix64 of (op, lhs, rhs, seed) reduced to [0, S).
KeyedBuild build_keyed(Residue n, std::uint64_t seed);

struct AccidentalPair {
    OpKind op;
    Cipher x;
    Cipher y;  // x == y for a fixed point

    friend bool operator==(const AccidentalPair&, const AccidentalPair&) = default;
};

/// Every unordered pair {x, y} (x == y included) whose four ADD (or four MUL)
/// combinations all land back in {x, y}. Empty means pass.
std::vector<AccidentalPair> check_no_accidental_pairs(const TableSet& ts);

}  // namespace abct
