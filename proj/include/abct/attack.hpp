#pragma once

// Algebraic attacks on an encrypted ALU. The attacker procedures see only a
// black-box ALU; the codebook is used by the judge alone, to pick admissible
// starting observations and to decide whether each claim is right.

#include "abct/core.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abct {

enum class AttackKind : std::uint8_t { Doubling, SelfSub, SelfDiv, Lagrange, AbDefeat };
inline constexpr std::array<AttackKind, 5> kAllAttacks{AttackKind::Doubling, AttackKind::SelfSub,
                                                       AttackKind::SelfDiv, AttackKind::Lagrange,
                                                       AttackKind::AbDefeat};

enum class Verdict : std::uint8_t { Reliable, Unreliable, NoClaim };

std::string_view to_string(AttackKind k);
std::string_view to_string(Verdict v);
std::optional<AttackKind> parse_attack(std::string_view s);

/// Plain constant each attack is after: 0, 0, 1, 1, 1.
Residue attack_target(AttackKind k);

struct AluCall {
    OpKind op;
    Cipher lhs, rhs, result;
};

/// What the attacker is allowed to hold: the table, and a log of its own calls.
class BlackBoxAlu {
public:
    explicit BlackBoxAlu(const TableSet& ts) : ts_(ts) {}

    Cipher operator()(OpKind op, Cipher lhs, Cipher rhs);
    const std::vector<AluCall>& transcript() const { return log_; }

private:
    const TableSet& ts_;
    std::vector<AluCall> log_;
};

namespace attacker {

/// Doubles until a value repeats; claims it only if it is a fixed point.
std::optional<Cipher> doubling(BlackBoxAlu& alu, Cipher start);
Cipher self_sub(BlackBoxAlu& alu, Cipher c);
Cipher self_div(BlackBoxAlu& alu, Cipher c);
Cipher lagrange(BlackBoxAlu& alu, Cipher c, unsigned squarings);
/// (c1*c2)/(c2*c1) and (c2*c1)/(c1*c2).
std::pair<Cipher, Cipher> ab_defeat(BlackBoxAlu& alu, Cipher c1, Cipher c2);

}  // namespace attacker

struct AttackOutcome {
    AttackKind kind = AttackKind::Doubling;
    std::vector<AluCall> transcript;        // run on the first admissible observation
    std::vector<Cipher> observation;        // that observation
    std::vector<Cipher> claimed;            // its claim(s); empty when no claim was made
    Verdict verdict = Verdict::NoClaim;
    std::vector<Cipher> witness;            // first observation whose claim is wrong or missing
    std::uint64_t admissible = 0;
    std::uint64_t failures = 0;
};

/// Runs the attack from every admissible observation and judges it.
///
/// RELIABLE: every admissible observation yields a claim that decrypts to the
/// target. UNRELIABLE: some observation yields a wrong claim or none at all.
/// NO_CLAIM: there is no admissible observation.
///
/// Admissible observations: every coded value (DOUBLING, SELF_SUB); coded
/// values with a unit plain value (SELF_DIV, LAGRANGE); validly typed operand
/// pairs whose plain values are both units (AB_DEFEAT). For AB_DEFEAT each
/// quotient must decrypt to 1 in the type of its leading operand.
/// LAGRANGE needs n = 2^w with w >= 3 and squares w - 1 times.
AttackOutcome run_attack(const TableSet& ts, const Codebook& cb, AttackKind kind);

/// AB_DEFEAT with the transcript taken on a chosen observed pair.
AttackOutcome run_ab_defeat(const TableSet& ts, const Codebook& cb, std::pair<Cipher, Cipher> observed);

/// LAGRANGE needs n = 2^w, w >= 3; every other attack applies to any modulus.
bool attack_applicable(Residue n, AttackKind kind);

struct MatrixCell {
    bool applicable = true;
    std::vector<Verdict> per_seed;

    /// Common verdict of all seeds, or nullopt when seeds disagree.
    std::optional<Verdict> aggregate() const;
};

struct MatrixRow {
    SchemeKind scheme;
    std::array<MatrixCell, 5> cells;  // indexed by AttackKind
};

struct AttackMatrix {
    Residue modulus = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<MatrixRow> rows;  // plain, ab, abc
};

inline constexpr std::uint32_t kMaxMatrixSize = 1u << 10;

/// Plain (raw fill: every typed cell is constrained), AB and ABC (safe fill)
/// tables with a random layout per seed, every attack on each.
AttackMatrix attack_matrix(Residue n, std::span<const std::uint64_t> seeds, unsigned workers = 1);

}  // namespace abct
