#pragma once

// Ranked alphabets, trees and one-hole contexts, plus their text syntax:
//   tree    := ident | ident '(' tree (',' tree)* ')'
//   context := same grammar over the alphabet extended with _HOLE (rank 0)

#include <cassert>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wta {

using SymbolId = int;

/// Label used for the hole leaf of a context.  Never a valid alphabet symbol.
inline constexpr SymbolId kHole = -1;

struct AlphabetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class RankedAlphabet {
public:
    struct Symbol {
        std::string name;
        int rank = 0;
    };

    RankedAlphabet() = default;

    explicit RankedAlphabet(std::vector<Symbol> symbols) {
        for (auto& s : symbols) add_symbol(s.name, s.rank);
    }

    SymbolId add_symbol(const std::string& name, int rank) {
        if (rank < 0) throw AlphabetError("negative rank for symbol " + name);
        if (by_name_.count(name))
            throw AlphabetError("duplicate symbol " + name);
        SymbolId id = static_cast<SymbolId>(symbols_.size());
        symbols_.push_back(Symbol{name, rank});
        by_name_.emplace(name, id);
        return id;
    }

    std::size_t size() const { return symbols_.size(); }
    const Symbol& symbol(SymbolId id) const { return symbols_.at(static_cast<std::size_t>(id)); }
    int rank(SymbolId id) const { return symbol(id).rank; }
    const std::string& name(SymbolId id) const { return symbol(id).name; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    /// Returns -2 when the name is unknown (kHole = -1 is reserved).
    SymbolId find(std::string_view name) const {
        auto it = by_name_.find(std::string(name));
        return it == by_name_.end() ? -2 : it->second;
    }

    bool has_nullary() const {
        for (auto& s : symbols_)
            if (s.rank == 0) return true;
        return false;
    }

    int max_rank() const {
        int r = 0;
        for (auto& s : symbols_) r = std::max(r, s.rank);
        return r;
    }

    bool operator==(const RankedAlphabet& other) const {
        if (symbols_.size() != other.symbols_.size()) return false;
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i].name != other.symbols_[i].name ||
                symbols_[i].rank != other.symbols_[i].rank)
                return false;
        return true;
    }

private:
    std::vector<Symbol> symbols_;
    std::map<std::string, SymbolId> by_name_;
};

/// Node-labeled ranked term.  A context is a Tree with exactly one kHole leaf.
struct Tree {
    SymbolId label = kHole;
    std::vector<Tree> children;

    Tree() = default;
    explicit Tree(SymbolId l) : label(l) {}
    Tree(SymbolId l, std::vector<Tree> cs) : label(l), children(std::move(cs)) {}

    bool operator==(const Tree& other) const {
        return label == other.label && children == other.children;
    }
    bool operator!=(const Tree& other) const { return !(*this == other); }
};

/// Child indices counted from 1, matching the child_i convention.
using NodeAddress = std::vector<int>;

inline Tree hole() { return Tree(kHole); }

inline std::size_t tree_size(const Tree& t) {
    std::size_t n = 1;
    for (auto& c : t.children) n += tree_size(c);
    return n;
}

inline std::size_t tree_height(const Tree& t) {
    std::size_t h = 0;
    for (auto& c : t.children) h = std::max(h, 1 + tree_height(c));
    return h;
}

inline std::size_t count_holes(const Tree& t) {
    if (t.label == kHole) return 1;
    std::size_t n = 0;
    for (auto& c : t.children) n += count_holes(c);
    return n;
}

inline bool is_context(const Tree& t) { return count_holes(t) == 1; }

inline const Tree* subtree_at(const Tree& t, const NodeAddress& addr) {
    const Tree* cur = &t;
    for (int i : addr) {
        if (i < 1 || static_cast<std::size_t>(i) > cur->children.size()) return nullptr;
        cur = &cur->children[static_cast<std::size_t>(i - 1)];
    }
    return cur;
}

/// Plugs t into the unique hole of context c.
inline Tree apply_context(const Tree& c, const Tree& t) {
    if (c.label == kHole) return t;
    Tree out(c.label);
    out.children.reserve(c.children.size());
    for (auto& ch : c.children) out.children.push_back(apply_context(ch, t));
    return out;
}

/// compose_contexts(C, C')[t] = C[C'[t]].
inline Tree compose_contexts(const Tree& c, const Tree& cprime) {
    return apply_context(c, cprime);
}

inline Tree context_power(const Tree& c, std::size_t n) {
    Tree out = hole();
    for (std::size_t i = 0; i < n; ++i) out = apply_context(c, out);
    return out;
}

// ---------------------------------------------------------------------------
// Text syntax

struct ParseError : std::runtime_error {
    enum class Kind { Syntax, UnknownSymbol, ArityMismatch };
    Kind kind;
    std::size_t pos;  // byte offset into the input

    ParseError(Kind k, std::size_t p, const std::string& msg)
        : std::runtime_error(msg + " (at offset " + std::to_string(p) + ")"),
          kind(k),
          pos(p) {}
};

namespace detail {

inline bool ident_char(char ch) {
    return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
           (ch >= '0' && ch <= '9') || ch == '_' || ch == '\'' || ch == '@';
}

struct TermParser {
    std::string_view text;
    std::size_t pos = 0;
    const RankedAlphabet& alphabet;
    bool allow_hole;

    void skip_ws() {
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        if (pos == start)
            throw ParseError(ParseError::Kind::Syntax, pos, "expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    Tree term() {
        std::size_t start = pos;
        skip_ws();
        start = pos;
        std::string name = ident();
        SymbolId sym;
        if (allow_hole && name == "_HOLE") {
            sym = kHole;
        } else {
            sym = alphabet.find(name);
            if (sym == -2)
                throw ParseError(ParseError::Kind::UnknownSymbol, start,
                                 "unknown symbol '" + name + "'");
        }
        Tree t(sym);
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            while (true) {
                t.children.push_back(term());
                skip_ws();
                if (pos < text.size() && text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < text.size() && text[pos] == ')') {
                    ++pos;
                    break;
                }
                throw ParseError(ParseError::Kind::Syntax, pos, "expected ',' or ')'");
            }
        }
        int expected = (sym == kHole) ? 0 : alphabet.rank(sym);
        if (static_cast<int>(t.children.size()) != expected)
            throw ParseError(ParseError::Kind::ArityMismatch, start,
                             "symbol '" + name + "' expects " + std::to_string(expected) +
                                 " children, got " + std::to_string(t.children.size()));
        return t;
    }
};

}  // namespace detail

inline Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet) {
    detail::TermParser p{text, 0, alphabet, /*allow_hole=*/false};
    Tree t = p.term();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError(ParseError::Kind::Syntax, p.pos, "trailing input after term");
    return t;
}

inline Tree parse_context(std::string_view text, const RankedAlphabet& alphabet) {
    detail::TermParser p{text, 0, alphabet, /*allow_hole=*/true};
    Tree t = p.term();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError(ParseError::Kind::Syntax, p.pos, "trailing input after term");
    std::size_t holes = count_holes(t);
    if (holes != 1)
        throw ParseError(ParseError::Kind::Syntax, 0,
                         "context must contain exactly one _HOLE, found " + std::to_string(holes));
    return t;
}

inline void print_tree(std::string& out, const Tree& t, const RankedAlphabet& alphabet) {
    if (t.label == kHole)
        out += "_HOLE";
    else
        out += alphabet.name(t.label);
    if (!t.children.empty()) {
        out += '(';
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            if (i) out += ',';
            print_tree(out, t.children[i], alphabet);
        }
        out += ')';
    }
}

inline std::string print_tree(const Tree& t, const RankedAlphabet& alphabet) {
    std::string out;
    print_tree(out, t, alphabet);
    return out;
}

/// Strict total order: size first, then root symbol index, then children.
inline bool tree_less(const Tree& a, const Tree& b) {
    std::size_t sa = tree_size(a), sb = tree_size(b);
    if (sa != sb) return sa < sb;
    if (a.label != b.label) return a.label < b.label;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (tree_less(a.children[i], b.children[i])) return true;
        if (tree_less(b.children[i], a.children[i])) return false;
    }
    return false;
}

}  // namespace wta
