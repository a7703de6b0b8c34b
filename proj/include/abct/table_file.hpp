#pragma once

// Line-oriented text format for a TableSet and (optionally) its codebook.
//
//   ABCTBL 1
//   modulus <n>
//   padding <m>
//   scheme <plain|ab|abc>
//   origin <o>                 (only when the cipherspace does not start at 0)
//   provenance <fill> <seed>
//   codebook A <c0> ... <cn-1> (one line per coding class; omitted when redacted)
//   op add
//   <S rows of S values>
//   op sub / op mul / op div   (same shape)

#include "abct/core.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace abct {

struct TableHeader {
    Residue modulus = 0;
    std::uint32_t padding = 0;
    SchemeKind scheme = SchemeKind::ABC;

    std::uint32_t size() const { return static_cast<std::uint32_t>(class_count(scheme) * modulus + padding); }
    friend bool operator==(const TableHeader&, const TableHeader&) = default;
};

struct TableFile {
    TableHeader header;
    TableSet tables;
    std::optional<Codebook> codebook;  // absent in the attacker's view
};

class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

TableFile make_table_file(TableSet tables, Codebook cb);

/// Deterministic text. Needs stored tables.
std::string serialize(const TableFile& f, bool redact = false);
std::string serialize(const TableSet& ts, const Codebook& cb, bool redact = false);

/// Strict parse; throws FormatError with the offending line number.
TableFile parse_table_file(std::string_view text);

TableFile read_table_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace abct
