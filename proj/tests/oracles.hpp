#pragma once

// Test-side oracles: literal golden tables and brute-force references that do
// not call into the library code they check.

#include "abct/core.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

// 1-bit tables over labels 1..6, codebook A={1,2}, B={3,4}, C={5,6}.
// 0 marks a free cell. Indexed [row-1][col-1].
using Grid = std::array<std::array<int, 6>, 6>;

inline constexpr Grid kGoldenAdd{{
    {0, 0, 5, 6, 0, 0},
    {0, 0, 6, 5, 0, 0},
    {0, 0, 0, 0, 1, 2},
    {0, 0, 0, 0, 2, 1},
    {3, 4, 0, 0, 0, 0},
    {4, 3, 0, 0, 0, 0},
}};

inline constexpr Grid kGoldenMul{{
    {0, 0, 5, 5, 0, 0},
    {0, 0, 5, 6, 0, 0},
    {0, 0, 0, 0, 1, 1},
    {0, 0, 0, 0, 1, 2},
    {3, 3, 0, 0, 0, 0},
    {3, 4, 0, 0, 0, 0},
}};

// The filled tables with the second embedding, as printed (diagonal ranges as 0).
inline constexpr Grid kGoldenDualAdd{{
    {0, 0, 5, 6, 3, 4},
    {0, 0, 6, 5, 4, 3},
    {5, 6, 0, 0, 1, 2},
    {6, 5, 0, 0, 2, 1},
    {3, 4, 1, 2, 0, 0},
    {4, 3, 2, 1, 0, 0},
}};

inline constexpr Grid kGoldenDualMulPrinted{{
    {0, 0, 5, 5, 4, 3},
    {0, 0, 5, 6, 4, 4},
    {6, 5, 0, 0, 1, 1},
    {5, 5, 0, 0, 1, 2},
    {3, 3, 2, 2, 0, 0},
    {3, 4, 2, 1, 0, 0},
}};

// Allowed ranges for the diagonal blocks: A block [3-6], B block {5,6,1,2}, C block [1-4].
inline bool golden_diagonal_allowed(int row, int value) {
    if (row <= 2) return value >= 3 && value <= 6;
    if (row <= 4) return value == 5 || value == 6 || value == 1 || value == 2;
    return value >= 1 && value <= 4;
}

// Golden second codebook: A2 0->2,1->1; B2 0->5,1->6; C2 0->4,1->3.
inline const std::array<std::array<std::uint32_t, 2>, 3> kGoldenSecondary{{{2, 1}, {5, 6}, {4, 3}}};

/// Division by brute force: the unique z with z*y = x (mod n), if y is a unit.
inline std::optional<std::uint32_t> brute_div(std::uint32_t x, std::uint32_t y, std::uint32_t n) {
    std::optional<std::uint32_t> inv;
    for (std::uint32_t z = 0; z < n; ++z)
        if ((std::uint64_t{z} * y) % n == 1 % n) inv = z;
    if (!inv) return std::nullopt;
    return static_cast<std::uint32_t>((std::uint64_t{x} * *inv) % n);
}

inline std::optional<std::uint32_t> brute_op(abct::OpKind op, std::uint32_t x, std::uint32_t y, std::uint32_t n) {
    switch (op) {
    case abct::OpKind::Add: return (x + y) % n;
    case abct::OpKind::Sub: return (x + n - y) % n;
    case abct::OpKind::Mul: return static_cast<std::uint32_t>((std::uint64_t{x} * y) % n);
    case abct::OpKind::Div: return brute_div(x, y, n);
    }
    return std::nullopt;
}

/// ABC typing as a literal table; 'X' for no result.
inline char abc_rule(char a, char b) {
    static const std::map<std::pair<char, char>, char> rule{{{'A', 'B'}, 'C'}, {{'B', 'C'}, 'A'}, {{'C', 'A'}, 'B'}};
    const auto it = rule.find({a, b});
    return it == rule.end() ? 'X' : it->second;
}

/// x^(2^k) mod 2^w by repeated squaring in 64-bit arithmetic (w <= 32).
inline std::uint64_t square_k_times(std::uint64_t x, unsigned k, unsigned w) {
    const std::uint64_t mask = (w == 64) ? ~0ull : ((1ull << w) - 1);
    for (unsigned i = 0; i < k; ++i) x = (x * x) & mask;
    return x & mask;
}

/// Independent mini-evaluator for random two-variable expressions mod 2.
struct Mod2Expr {
    // postfix program: 'x', 'y', '+', '*'
    std::string program;
    char type = 'A';
    int xs = 0, ys = 0;

    int eval(int x, int y) const {
        std::vector<int> st;
        for (char c : program) {
            if (c == 'x') st.push_back(x);
            else if (c == 'y') st.push_back(y);
            else {
                const int b = st.back();
                st.pop_back();
                const int a = st.back();
                st.pop_back();
                st.push_back(c == '+' ? (a ^ b) : (a & b));
            }
        }
        return st.back();
    }
    int truth() const {
        int t = 0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) t |= eval(x, y) << (x + 2 * y);
        return t;
    }
    std::string infix() const {
        std::vector<std::string> st;
        for (char c : program) {
            if (c == 'x') st.push_back("x:A");
            else if (c == 'y') st.push_back("y:B");
            else {
                std::string b = st.back();
                st.pop_back();
                std::string a = st.back();
                st.pop_back();
                st.push_back("(" + a + (c == '+' ? " + " : " * ") + b + ")");
            }
        }
        return st.back();
    }
};

inline int type_slot(char t) { return t == 'A' ? 0 : t == 'B' ? 1 : 2; }

inline void operand_types(char type, char& l, char& r) {
    l = type == 'C' ? 'A' : type == 'A' ? 'B' : 'C';
    r = type == 'C' ? 'B' : type == 'A' ? 'C' : 'A';
}

/// exists[k][t]: some x:A/y:B expression of type t has exactly k operations.
inline std::vector<std::array<bool, 3>> typed_sizes(int max_ops) {
    std::vector<std::array<bool, 3>> ex(static_cast<std::size_t>(max_ops) + 1, {false, false, false});
    ex[0] = {true, true, false};
    for (int k = 1; k <= max_ops; ++k)
        for (char t : {'A', 'B', 'C'}) {
            char l, r;
            operand_types(t, l, r);
            for (int i = 0; i < k; ++i)
                if (ex[i][type_slot(l)] && ex[k - 1 - i][type_slot(r)]) ex[k][type_slot(t)] = true;
        }
    return ex;
}

/// Uniform-split random expression of the given type with exactly `ops`
/// operations; the caller checks that such an expression exists.
inline Mod2Expr random_typed(std::mt19937_64& rng, char type, int ops, const std::vector<std::array<bool, 3>>& ex) {
    Mod2Expr e;
    e.type = type;
    if (ops == 0) {
        if (type == 'A') e.program = "x", e.xs = 1;
        else e.program = "y", e.ys = 1;
        return e;
    }
    char l, r;
    operand_types(type, l, r);
    std::vector<int> splits;
    for (int i = 0; i < ops; ++i)
        if (ex[i][type_slot(l)] && ex[ops - 1 - i][type_slot(r)]) splits.push_back(i);
    const int left = splits[rng() % splits.size()];
    const Mod2Expr a = random_typed(rng, l, left, ex), b = random_typed(rng, r, ops - 1 - left, ex);
    e.program = a.program + b.program + ((rng() & 1) ? '+' : '*');
    e.xs = a.xs + b.xs;
    e.ys = a.ys + b.ys;
    return e;
}

}  // namespace oracle
