#pragma once

// A TableSet used as an encrypted ALU.

#include "abct/core.hpp"
#include "abct/expr.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace abct {

/// Table lookup. No typing is enforced: any operand pair in the cipherspace
/// is accepted, the way a published ALU can be probed by anyone.
Cipher apply(const TableSet& ts, OpKind op, Cipher lhs, Cipher rhs);

using PlainEnv = std::map<std::string, Residue>;
using CipherEnv = std::map<std::string, Cipher>;

/// Encrypts every leaf under its declared type and evaluates through the
/// table. Throws on ill-typed expressions (for cb's scheme) and unbound names.
Cipher eval_expr(const TableSet& ts, const Codebook& cb, const PlainEnv& env, const Expr& e);

/// Same evaluation with the leaves already encrypted (attacker view).
Cipher eval_cipher(const TableSet& ts, const CipherEnv& env, const Expr& e);

/// Reference value of e modulo n, or nullopt when some division has a non-unit divisor.
std::optional<Residue> plain_value(const Expr& e, const PlainEnv& env, Residue n);

struct Violation {
    std::size_t codebook = 0;
    OpKind op = OpKind::Add;
    Cipher lhs = 0, rhs = 0, expected = 0, found = 0;
};

struct HomomorphismReport {
    std::uint64_t cells_checked = 0;
    std::vector<Violation> violations;

    bool pass() const { return violations.empty(); }
};

/// Checks every constrained cell of every codebook.
HomomorphismReport check_homomorphism(const TableSet& ts, std::span<const Codebook> cbs);
HomomorphismReport check_homomorphism(const TableSet& ts, const Codebook& cb);

/// Checks `per_op` uniformly drawn constrained cells for each operation.
HomomorphismReport sample_homomorphism(const TableSet& ts, const Codebook& cb, std::uint64_t per_op,
                                       std::uint64_t seed);

}  // namespace abct
