#pragma once

// MSO-set-query counting reduced to ambiguity: marked alphabets Sigma x
// {0,1}^l, unambiguity checking, and the B_F run-counting construction.

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/growth.hpp"
#include "wta/oracle.hpp"

namespace wta {

struct InvalidAddress : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotUnambiguous : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Alphabet of symbols (a, b) for a in base and b in {0,1}^l, spelled a@b
/// with b written most-significant-bit first (coordinate 1 first).
struct MarkedAlphabet {
    RankedAlphabet base;
    int ell = 1;
    RankedAlphabet marked;

    static MarkedAlphabet make(const RankedAlphabet& base, int ell) {
        if (ell < 1 || ell > 16) throw AlphabetError("mark arity out of range");
        MarkedAlphabet m;
        m.base = base;
        m.ell = ell;
        for (SymbolId a = 0; a < static_cast<SymbolId>(base.size()); ++a) {
            for (unsigned bits = 0; bits < (1u << ell); ++bits) {
                std::string name = base.name(a) + "@";
                for (int i = ell - 1; i >= 0; --i) name += ((bits >> i) & 1u) ? '1' : '0';
                m.marked.add_symbol(name, base.rank(a));
            }
        }
        return m;
    }

    std::size_t num_decorations() const { return std::size_t(1) << ell; }
    SymbolId marked_id(SymbolId a, unsigned bits) const {
        return a * static_cast<SymbolId>(num_decorations()) + static_cast<SymbolId>(bits);
    }
    SymbolId base_of(SymbolId m) const { return m / static_cast<SymbolId>(num_decorations()); }
    unsigned bits_of(SymbolId m) const {
        return static_cast<unsigned>(m) % static_cast<unsigned>(num_decorations());
    }
    /// Bit of coordinate i (1-based) in a decoration value.
    bool coordinate(unsigned bits, int i) const { return (bits >> (ell - i)) & 1u; }
};

namespace detail {
inline void mark_rec(const MarkedAlphabet& m, const Tree& t,
                     const std::vector<std::set<NodeAddress>>& sets, NodeAddress& addr,
                     Tree& out) {
    unsigned bits = 0;
    for (int i = 0; i < m.ell; ++i)
        if (sets[static_cast<std::size_t>(i)].count(addr)) bits |= 1u << (m.ell - 1 - i);
    out.label = m.marked_id(t.label, bits);
    out.children.resize(t.children.size());
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        addr.push_back(static_cast<int>(i + 1));
        mark_rec(m, t.children[i], sets, addr, out.children[i]);
        addr.pop_back();
    }
}
}  // namespace detail

/// Decorates t with l node sets: coordinate i+1 of a node's label is 1 iff
/// the node's address is in sets[i].
inline Tree mark(const MarkedAlphabet& m, const Tree& t,
                 const std::vector<std::set<NodeAddress>>& sets) {
    if (static_cast<int>(sets.size()) != m.ell)
        throw InvalidAddress("expected exactly l node sets");
    for (auto& s : sets)
        for (auto& addr : s)
            if (!subtree_at(t, addr)) throw InvalidAddress("node address outside the tree");
    Tree out;
    NodeAddress addr;
    detail::mark_rec(m, t, sets, addr, out);
    return out;
}

/// Projects a marked tree back to its first coordinate.
inline Tree unmark(const MarkedAlphabet& m, const Tree& t) {
    Tree out(m.base_of(t.label));
    out.children.reserve(t.children.size());
    for (auto& c : t.children) out.children.push_back(unmark(m, c));
    return out;
}

/// True iff no input tree has two or more accepting runs.  Refuted by an
/// ambiguous co-accessible state, or by two distinct pair-accessible
/// accepting states.
inline bool check_unambiguous(const WTA& a) {
    int n = a.num_states();
    std::vector<bool> amb = ambiguous_states(a);
    std::vector<bool> coacc = coaccessible_states(a);
    for (int q = 0; q < n; ++q)
        if (amb[static_cast<std::size_t>(q)] && coacc[static_cast<std::size_t>(q)]) return false;
    if (n > 0) {
        ProductSpace ps(a, 2);
        for (int q1 = 0; q1 < n; ++q1)
            for (int q2 = 0; q2 < n; ++q2)
                if (q1 != q2 && a.accepting[static_cast<std::size_t>(q1)] != 0 &&
                    a.accepting[static_cast<std::size_t>(q2)] != 0 &&
                    ps.accessible(static_cast<std::int64_t>(q1) * n + q2))
                    return false;
    }
    return true;
}

/// The run-counting automaton over the base alphabet: its ambiguity on t
/// equals the number of decorations P with mark(t,P) accepted by a_f.
inline WTA build_bf(const WTA& a_f, const MarkedAlphabet& m) {
    if (!(a_f.alphabet == m.marked))
        throw AlphabetMismatch("query automaton is not over the given marked alphabet");
    if (!check_unambiguous(a_f)) throw NotUnambiguous("query automaton is ambiguous");

    int nq = a_f.num_states();
    int nbase = static_cast<int>(m.base.size());
    int ndec = static_cast<int>(m.num_decorations());
    WTA b;
    b.alphabet = m.base;
    // state (q, a, bits) packed as (q * nbase + a) * ndec + bits
    for (int q = 0; q < nq; ++q)
        for (int a = 0; a < nbase; ++a)
            for (int bits = 0; bits < ndec; ++bits) {
                SymbolId ma = m.marked_id(a, static_cast<unsigned>(bits));
                int id = b.add_state("(" + a_f.states[static_cast<std::size_t>(q)] + "," +
                                     m.marked.name(ma) + ")");
                if (a_f.accepting[static_cast<std::size_t>(q)] != 0) b.set_accepting(id, 1);
            }
    auto state_id = [&](int q, SymbolId a, int bits) { return (q * nbase + a) * ndec + bits; };

    // For each A_F transition over (a, bits), one B_F transition per choice
    // of child decorations; child states carry the A_F child state.
    for (auto& t : a_f.transitions) {
        SymbolId base_letter = m.base_of(t.letter);
        int bits = static_cast<int>(m.bits_of(t.letter));
        int rank = static_cast<int>(t.children.size());
        std::vector<int> dec(static_cast<std::size_t>(rank), 0);
        std::vector<SymbolId> letter_choice(static_cast<std::size_t>(rank), 0);
        std::function<void(int)> rec = [&](int i) {
            if (i == rank) {
                std::vector<int> cs(static_cast<std::size_t>(rank));
                for (int j = 0; j < rank; ++j)
                    cs[static_cast<std::size_t>(j)] =
                        state_id(t.children[static_cast<std::size_t>(j)],
                                 letter_choice[static_cast<std::size_t>(j)],
                                 dec[static_cast<std::size_t>(j)]);
                b.add_transition(std::move(cs), base_letter,
                                 state_id(t.target, base_letter, bits), 1);
                return;
            }
            for (SymbolId a = 0; a < nbase; ++a)
                for (int d = 0; d < ndec; ++d) {
                    letter_choice[static_cast<std::size_t>(i)] = a;
                    dec[static_cast<std::size_t>(i)] = d;
                    rec(i + 1);
                }
        };
        rec(0);
    }
    return b;
}

inline GrowthReport query_growth(const WTA& a_f, const MarkedAlphabet& m,
                                 bool with_witness = true) {
    return analyze(build_bf(a_f, m), with_witness);
}

/// Ground truth for Claim 3.3: number of decorations P of t (all 2^{l |t|})
/// whose marking is accepted by a_f.
inline Value brute_query_count(const WTA& a_f, const MarkedAlphabet& m, const Tree& t) {
    std::size_t nodes = tree_size(t);
    std::size_t total_bits = nodes * static_cast<std::size_t>(m.ell);
    if (total_bits > 24) throw CapExceeded("too many markings to enumerate");

    // Decorate nodes in preorder from one packed bit assignment.
    std::function<Tree(const Tree&, std::uint64_t&, std::uint64_t)> decorate =
        [&](const Tree& node, std::uint64_t& pos, std::uint64_t assignment) -> Tree {
        unsigned bits = static_cast<unsigned>((assignment >> pos) &
                                              ((std::uint64_t(1) << m.ell) - 1));
        pos += static_cast<std::uint64_t>(m.ell);
        Tree out(m.marked_id(node.label, bits));
        out.children.reserve(node.children.size());
        for (auto& c : node.children) out.children.push_back(decorate(c, pos, assignment));
        return out;
    };
    Value count = 0;
    for (std::uint64_t assignment = 0; assignment < (std::uint64_t(1) << total_bits);
         ++assignment) {
        std::uint64_t pos = 0;
        Tree marked = decorate(t, pos, assignment);
        if (value(a_f, marked).accepting > 0) count += 1;
    }
    return count;
}

}  // namespace wta
