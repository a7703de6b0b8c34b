#include "abct/table_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace abct {

namespace {

constexpr std::string_view kMagic = "ABCTBL 1";

std::string_view op_keyword(OpKind op) {
    switch (op) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    }
    return "?";
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    std::size_t line() const { return line_; }

    std::string_view next(const char* what) {
        if (pos_ >= text_.size()) throw FormatError(std::string("unexpected end of file, expected ") + what, line_ + 1);
        const std::size_t nl = text_.find('\n', pos_);
        if (nl == std::string_view::npos) throw FormatError("missing final newline", line_ + 1);
        std::string_view l = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        ++line_;
        return l;
    }

    bool done() const { return pos_ >= text_.size(); }

    std::optional<std::string_view> peek() const {
        if (done()) return std::nullopt;
        const std::size_t nl = text_.find('\n', pos_);
        return text_.substr(pos_, nl == std::string_view::npos ? std::string_view::npos : nl - pos_);
    }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(what, line_); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

std::vector<std::string_view> split(std::string_view l, const LineReader& r) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t sp = l.find(' ', start);
        const std::string_view tok = l.substr(start, sp == std::string_view::npos ? std::string_view::npos : sp - start);
        if (tok.empty()) r.fail("fields must be separated by single spaces");
        out.push_back(tok);
        if (sp == std::string_view::npos) break;
        start = sp + 1;
    }
    return out;
}

std::uint64_t number(std::string_view tok, const LineReader& r, std::uint64_t max = UINT32_MAX) {
    std::uint64_t v = 0;
    if (tok.empty() || (tok.size() > 1 && tok[0] == '0')) r.fail("bad number '" + std::string(tok) + "'");
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) r.fail("bad number '" + std::string(tok) + "'");
    if (v > max) r.fail("number out of range: " + std::string(tok));
    return v;
}

std::uint64_t keyed_value(LineReader& r, std::string_view key, std::uint64_t max = UINT32_MAX) {
    const auto f = split(r.next(key.data()), r);
    if (f.size() != 2 || f[0] != key) r.fail("expected '" + std::string(key) + " <value>'");
    return number(f[1], r, max);
}

}  // namespace

TableFile make_table_file(TableSet tables, Codebook cb) {
    if (tables.size() != cb.size() || tables.origin() != cb.origin())
        throw Error("codebook and tables disagree on the cipherspace");
    TableHeader h{cb.modulus(), cb.padding(), cb.scheme()};
    return TableFile{h, std::move(tables), std::move(cb)};
}

std::string serialize(const TableFile& f, bool redact) {
    const TableSet& ts = f.tables;
    if (!ts.materialized()) throw Error("serialization needs stored tables; materialize first");
    if (f.header.size() != ts.size()) throw Error("header does not match the table size");
    std::ostringstream out;
    out << kMagic << '\n';
    out << "modulus " << f.header.modulus << '\n';
    out << "padding " << f.header.padding << '\n';
    out << "scheme " << to_string(f.header.scheme) << '\n';
    if (ts.origin() != 0) out << "origin " << ts.origin() << '\n';
    out << "provenance " << ts.provenance().fill << ' ' << ts.provenance().seed << '\n';
    if (f.codebook && !redact) {
        for (AbcType t : coding_classes(f.header.scheme)) {
            out << "codebook " << to_string(t);
            for (Cipher c : f.codebook->coding(t)) out << ' ' << c;
            out << '\n';
        }
    }
    const Cipher o = ts.origin();
    for (OpKind op : kAllOps) {
        out << "op " << op_keyword(op) << '\n';
        for (Cipher a = o; a < o + ts.size(); ++a) {
            for (Cipher b = o; b < o + ts.size(); ++b) {
                if (b != o) out << ' ';
                out << ts.at(op, a, b);
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string serialize(const TableSet& ts, const Codebook& cb, bool redact) {
    return serialize(make_table_file(ts, cb), redact);
}

TableFile parse_table_file(std::string_view text) {
    LineReader r(text);
    if (r.next("format tag") != kMagic) r.fail("expected 'ABCTBL 1'");
    TableHeader h;
    h.modulus = static_cast<Residue>(keyed_value(r, "modulus"));
    if (h.modulus < 1) r.fail("modulus must be positive");
    h.padding = static_cast<std::uint32_t>(keyed_value(r, "padding"));
    {
        const auto f = split(r.next("scheme"), r);
        if (f.size() != 2 || f[0] != "scheme") r.fail("expected 'scheme <plain|ab|abc>'");
        const auto s = parse_scheme(f[1]);
        if (!s) r.fail("unknown scheme '" + std::string(f[1]) + "'");
        h.scheme = *s;
    }
    const std::uint64_t size = class_count(h.scheme) * std::uint64_t{h.modulus} + h.padding;
    if (size > TableSet::kMaxMaterialized) r.fail("cipherspace of " + std::to_string(size) + " exceeds the table size guard");

    Cipher origin = 0;
    if (r.peek() && r.peek()->starts_with("origin ")) origin = static_cast<Cipher>(keyed_value(r, "origin", 1u << 30));

    Provenance prov;
    {
        const auto f = split(r.next("provenance"), r);
        if (f.size() != 3 || f[0] != "provenance") r.fail("expected 'provenance <fill> <seed>'");
        prov.fill = std::string(f[1]);
        prov.seed = number(f[2], r, UINT64_MAX);
    }

    std::optional<Codebook> cb;
    if (r.peek() && r.peek()->starts_with("codebook ")) {
        std::vector<std::vector<Cipher>> maps;
        std::vector<bool> used(size, false);
        for (AbcType t : coding_classes(h.scheme)) {
            const auto f = split(r.next("codebook"), r);
            if (f.size() < 2 || f[0] != "codebook" || f[1] != to_string(t))
                r.fail("expected 'codebook " + std::string(to_string(t)) + " ...'");
            if (f.size() != 2 + h.modulus) r.fail("codebook line needs exactly " + std::to_string(h.modulus) + " values");
            std::vector<Cipher> m;
            for (std::size_t k = 2; k < f.size(); ++k) {
                const auto c = number(f[k], r);
                if (c < origin || c - origin >= size) r.fail("codebook value " + std::string(f[k]) + " outside cipherspace");
                if (used[c - origin]) r.fail("codebook value " + std::string(f[k]) + " used twice");
                used[c - origin] = true;
                m.push_back(static_cast<Cipher>(c));
            }
            maps.push_back(std::move(m));
        }
        try {
            cb.emplace(h.modulus, h.padding, h.scheme, std::move(maps), origin);
        } catch (const GuardError&) {
            throw;
        } catch (const Error& e) {
            r.fail(std::string("invalid codebook: ") + e.what());
        }
    }

    TableSet ts(static_cast<std::uint32_t>(size), origin, prov);
    for (OpKind op : kAllOps) {
        const std::string expect = "op " + std::string(op_keyword(op));
        if (r.next(expect.c_str()) != expect) r.fail("expected '" + expect + "'");
        for (Cipher a = origin; a < origin + size; ++a) {
            const auto f = split(r.next("table row"), r);
            if (f.size() != size) r.fail("row needs exactly " + std::to_string(size) + " values");
            for (std::size_t k = 0; k < f.size(); ++k) {
                const std::uint64_t v = number(f[k], r);
                if (v < origin || v >= origin + size) r.fail("cell value " + std::to_string(v) + " outside the cipherspace");
                ts.set(op, a, origin + static_cast<Cipher>(k), static_cast<Cipher>(v));
            }
        }
    }
    if (!r.done()) throw FormatError("trailing content after the div table", r.line() + 1);
    return TableFile{h, std::move(ts), std::move(cb)};
}

TableFile read_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table_file(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace abct
