#pragma once

// N-weighted bottom-up tree automata: exact evaluation, accessibility via
// Horn-style saturation, shallow digraphs, trimming, products and the
// quadratic ambiguous-state test.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wta/core.hpp"
#include "wta/digraph.hpp"

namespace wta {

using Value = boost::multiprecision::cpp_int;

struct AlphabetMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotTrimmed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidRun : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AutomatonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Transition {
    std::vector<int> children;  // states, in order; size == rank(letter)
    SymbolId letter = 0;
    int target = 0;
    std::uint64_t weight = 1;

    bool operator==(const Transition& o) const {
        return children == o.children && letter == o.letter && target == o.target;
    }
};

struct WeightedTreeAutomaton {
    RankedAlphabet alphabet;
    std::vector<std::string> states;
    std::vector<Transition> transitions;
    // accepting[q] == 0 means non-accepting; otherwise the accepting weight.
    std::vector<std::uint64_t> accepting;

    int num_states() const { return static_cast<int>(states.size()); }
    bool empty() const { return states.empty(); }

    int add_state(const std::string& name) {
        states.push_back(name);
        accepting.push_back(0);
        return num_states() - 1;
    }

    void add_transition(std::vector<int> children, SymbolId letter, int target,
                        std::uint64_t weight = 1) {
        transitions.push_back(Transition{std::move(children), letter, target, weight});
    }

    void set_accepting(int q, std::uint64_t weight = 1) {
        accepting[static_cast<std::size_t>(q)] = weight;
    }

    bool all_weights_one() const {
        for (auto& t : transitions)
            if (t.weight != 1) return false;
        for (auto w : accepting)
            if (w > 1) return false;
        return true;
    }

    void validate() const {
        for (auto& t : transitions) {
            if (t.letter < 0 || static_cast<std::size_t>(t.letter) >= alphabet.size())
                throw AutomatonError("transition with unknown letter");
            if (static_cast<int>(t.children.size()) != alphabet.rank(t.letter))
                throw AutomatonError("transition arity does not match letter " +
                                     alphabet.name(t.letter));
            if (t.weight < 1) throw AutomatonError("transition weight must be >= 1");
            if (t.target < 0 || t.target >= num_states())
                throw AutomatonError("transition target out of range");
            for (int c : t.children)
                if (c < 0 || c >= num_states()) throw AutomatonError("transition child out of range");
        }
        for (std::size_t i = 0; i < transitions.size(); ++i)
            for (std::size_t j = i + 1; j < transitions.size(); ++j)
                if (transitions[i] == transitions[j])
                    throw AutomatonError("duplicate transition");
    }
};

using WTA = WeightedTreeAutomaton;

// ---------------------------------------------------------------------------
// Evaluation (exact, arbitrary precision)

struct ValueVector {
    std::vector<Value> by_state;
    Value accepting = 0;
};

namespace detail {

inline void check_alphabet(const WTA& a, const Tree& t) {
    if (t.label == kHole || t.label < 0 || static_cast<std::size_t>(t.label) >= a.alphabet.size())
        throw AlphabetMismatch("tree label outside the automaton's alphabet");
    if (static_cast<int>(t.children.size()) != a.alphabet.rank(t.label))
        throw AlphabetMismatch("tree arity mismatch");
    for (auto& c : t.children) check_alphabet(a, c);
}

// Bottom-up DP.  `hole_seed` (when set) is the per-state vector for kHole
// leaves, which turns the DP into context evaluation.
inline std::vector<Value> eval_states(const WTA& a, const Tree& t, bool unit_weights,
                                      const std::vector<Value>* hole_seed) {
    if (t.label == kHole) {
        if (!hole_seed) throw AlphabetMismatch("unexpected hole in tree");
        return *hole_seed;
    }
    std::vector<std::vector<Value>> child_vals;
    child_vals.reserve(t.children.size());
    for (auto& c : t.children) child_vals.push_back(eval_states(a, c, unit_weights, hole_seed));

    std::vector<Value> out(static_cast<std::size_t>(a.num_states()), Value(0));
    for (auto& tr : a.transitions) {
        if (tr.letter != t.label) continue;
        Value v = unit_weights ? Value(1) : Value(tr.weight);
        bool zero = false;
        for (std::size_t i = 0; i < tr.children.size() && !zero; ++i) {
            const Value& cv = child_vals[i][static_cast<std::size_t>(tr.children[i])];
            if (cv == 0)
                zero = true;
            else
                v *= cv;
        }
        if (!zero) out[static_cast<std::size_t>(tr.target)] += v;
    }
    return out;
}

}  // namespace detail

inline ValueVector value(const WTA& a, const Tree& t) {
    detail::check_alphabet(a, t);
    ValueVector out;
    out.by_state = detail::eval_states(a, t, /*unit_weights=*/false, nullptr);
    for (int q = 0; q < a.num_states(); ++q)
        if (a.accepting[static_cast<std::size_t>(q)] != 0)
            out.accepting += out.by_state[static_cast<std::size_t>(q)] *
                             Value(a.accepting[static_cast<std::size_t>(q)]);
    return out;
}

/// Number of accepting runs = value with every weight forced to 1.
inline Value count_accepting_runs(const WTA& a, const Tree& t) {
    detail::check_alphabet(a, t);
    std::vector<Value> runs = detail::eval_states(a, t, /*unit_weights=*/true, nullptr);
    Value total = 0;
    for (int q = 0; q < a.num_states(); ++q)
        if (a.accepting[static_cast<std::size_t>(q)] != 0)
            total += runs[static_cast<std::size_t>(q)];
    return total;
}

/// Sum of run weights over context c with `from` at the hole, per root state.
inline std::vector<Value> context_values_from(const WTA& a, const Tree& c, int from,
                                              bool unit_weights = false) {
    std::vector<Value> seed(static_cast<std::size_t>(a.num_states()), Value(0));
    seed[static_cast<std::size_t>(from)] = 1;
    return detail::eval_states(a, c, unit_weights, &seed);
}

// ---------------------------------------------------------------------------
// Accessibility via Horn saturation (worklist + per-transition countdowns)

struct SimpleTransition {
    std::vector<int> children;
    int target;
};

inline std::vector<bool> horn_accessible(int num_states,
                                         const std::vector<SimpleTransition>& transitions) {
    std::vector<bool> acc(static_cast<std::size_t>(num_states), false);
    std::vector<int> countdown(transitions.size());
    // occurrences[q] = list of transition ids, once per child slot labeled q
    std::vector<std::vector<int>> occurrences(static_cast<std::size_t>(num_states));
    std::vector<int> worklist;

    for (std::size_t i = 0; i < transitions.size(); ++i) {
        countdown[i] = static_cast<int>(transitions[i].children.size());
        for (int c : transitions[i].children)
            occurrences[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
        if (countdown[i] == 0 && !acc[static_cast<std::size_t>(transitions[i].target)]) {
            acc[static_cast<std::size_t>(transitions[i].target)] = true;
            worklist.push_back(transitions[i].target);
        }
    }
    while (!worklist.empty()) {
        int q = worklist.back();
        worklist.pop_back();
        for (int ti : occurrences[static_cast<std::size_t>(q)]) {
            if (--countdown[static_cast<std::size_t>(ti)] == 0) {
                int tgt = transitions[static_cast<std::size_t>(ti)].target;
                if (!acc[static_cast<std::size_t>(tgt)]) {
                    acc[static_cast<std::size_t>(tgt)] = true;
                    worklist.push_back(tgt);
                }
            }
        }
    }
    return acc;
}

inline std::vector<bool> accessible_states(const WTA& a) {
    std::vector<SimpleTransition> ts;
    ts.reserve(a.transitions.size());
    for (auto& t : a.transitions) ts.push_back(SimpleTransition{t.children, t.target});
    return horn_accessible(a.num_states(), ts);
}

// ---------------------------------------------------------------------------
// Shallow digraph, co-accessibility, trimming

/// Edge (q', q) iff q' reaches q through some shallow context: all children
/// other than the hole child must be accessible.
inline Digraph shallow_digraph(const WTA& a) {
    std::vector<bool> acc = accessible_states(a);
    Digraph g(static_cast<std::size_t>(a.num_states()));
    for (auto& t : a.transitions) {
        int inaccessible = -1, num_inaccessible = 0;
        for (std::size_t i = 0; i < t.children.size(); ++i)
            if (!acc[static_cast<std::size_t>(t.children[i])]) {
                ++num_inaccessible;
                inaccessible = static_cast<int>(i);
            }
        if (num_inaccessible == 0) {
            for (int c : t.children) g.add_edge(c, t.target);
        } else if (num_inaccessible == 1) {
            g.add_edge(t.children[static_cast<std::size_t>(inaccessible)], t.target);
        }
    }
    return g;
}

inline std::vector<bool> coaccessible_states(const WTA& a) {
    Digraph g = shallow_digraph(a);
    // Backward reachability from accepting states.
    std::vector<std::vector<std::int64_t>> radj(g.num_vertices);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
        for (std::int64_t w : g.adj[v]) radj[static_cast<std::size_t>(w)].push_back(static_cast<std::int64_t>(v));
    std::vector<bool> coacc(static_cast<std::size_t>(a.num_states()), false);
    std::vector<int> worklist;
    for (int q = 0; q < a.num_states(); ++q)
        if (a.accepting[static_cast<std::size_t>(q)] != 0) {
            coacc[static_cast<std::size_t>(q)] = true;
            worklist.push_back(q);
        }
    while (!worklist.empty()) {
        int q = worklist.back();
        worklist.pop_back();
        for (std::int64_t p : radj[static_cast<std::size_t>(q)])
            if (!coacc[static_cast<std::size_t>(p)]) {
                coacc[static_cast<std::size_t>(p)] = true;
                worklist.push_back(static_cast<int>(p));
            }
    }
    return coacc;
}

struct TrimResult {
    WTA automaton;
    std::vector<int> kept;      // old state ids, in order
    std::vector<int> old_to_new;  // -1 when removed
};

inline TrimResult trim_with_map(const WTA& a) {
    std::vector<bool> acc = accessible_states(a);
    std::vector<bool> coacc = coaccessible_states(a);
    TrimResult r;
    r.automaton.alphabet = a.alphabet;
    r.old_to_new.assign(static_cast<std::size_t>(a.num_states()), -1);
    for (int q = 0; q < a.num_states(); ++q) {
        if (acc[static_cast<std::size_t>(q)] && coacc[static_cast<std::size_t>(q)]) {
            r.old_to_new[static_cast<std::size_t>(q)] =
                r.automaton.add_state(a.states[static_cast<std::size_t>(q)]);
            r.kept.push_back(q);
            if (a.accepting[static_cast<std::size_t>(q)] != 0)
                r.automaton.set_accepting(r.old_to_new[static_cast<std::size_t>(q)],
                                          a.accepting[static_cast<std::size_t>(q)]);
        }
    }
    for (auto& t : a.transitions) {
        if (r.old_to_new[static_cast<std::size_t>(t.target)] < 0) continue;
        bool ok = true;
        std::vector<int> cs;
        cs.reserve(t.children.size());
        for (int c : t.children) {
            int nc = r.old_to_new[static_cast<std::size_t>(c)];
            if (nc < 0) {
                ok = false;
                break;
            }
            cs.push_back(nc);
        }
        if (ok)
            r.automaton.add_transition(std::move(cs), t.letter,
                                       r.old_to_new[static_cast<std::size_t>(t.target)], t.weight);
    }
    return r;
}

inline WTA trim(const WTA& a) { return trim_with_map(a).automaton; }

inline bool is_trim(const WTA& a) {
    std::vector<bool> acc = accessible_states(a);
    std::vector<bool> coacc = coaccessible_states(a);
    for (int q = 0; q < a.num_states(); ++q)
        if (!acc[static_cast<std::size_t>(q)] || !coacc[static_cast<std::size_t>(q)]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Products

/// Materialized binary product.  Weights are dropped (all 1) and the
/// accepting set is left empty; callers supply their own accessibility.
inline WTA product(const WTA& a, const WTA& b) {
    if (!(a.alphabet == b.alphabet)) throw AlphabetMismatch("product over different alphabets");
    WTA p;
    p.alphabet = a.alphabet;
    for (int i = 0; i < a.num_states(); ++i)
        for (int j = 0; j < b.num_states(); ++j)
            p.add_state("(" + a.states[static_cast<std::size_t>(i)] + "," +
                        b.states[static_cast<std::size_t>(j)] + ")");
    auto pack = [&](int i, int j) { return i * b.num_states() + j; };
    for (auto& ta : a.transitions)
        for (auto& tb : b.transitions) {
            if (ta.letter != tb.letter) continue;
            std::vector<int> cs(ta.children.size());
            for (std::size_t i = 0; i < ta.children.size(); ++i)
                cs[i] = pack(ta.children[i], tb.children[i]);
            p.add_transition(std::move(cs), ta.letter, pack(ta.target, tb.target), 1);
        }
    return p;
}

/// Dense k-fold product space (k in {1,2,3}) with tuple accessibility and
/// implicit shallow-digraph successors.  Tuples are packed in base n.
class ProductSpace {
public:
    struct Edge {
        std::int64_t to = 0;
        SymbolId letter = 0;
        int hole_pos = 0;                 // 0-based child index of the hole
        std::array<int, 3> trans = {-1, -1, -1};  // transition ids per copy
        bool eps = false;
    };

    ProductSpace(const WTA& a, int k) : a_(a), k_(k), n_(a.num_states()) {
        total_ = 1;
        for (int i = 0; i < k_; ++i) {
            if (total_ > (std::int64_t(1) << 40) / std::max<std::int64_t>(n_, 1))
                throw AutomatonError("product space too large");
            total_ *= std::max<std::int64_t>(n_, 1);
        }
        if (n_ == 0) total_ = 0;
        build_index();
        saturate();
    }

    std::int64_t total() const { return total_; }
    int copies() const { return k_; }

    std::int64_t pack(const std::array<int, 3>& s) const {
        std::int64_t v = 0;
        for (int i = 0; i < k_; ++i) v = v * n_ + s[static_cast<std::size_t>(i)];
        return v;
    }
    std::array<int, 3> unpack(std::int64_t v) const {
        std::array<int, 3> s{0, 0, 0};
        for (int i = k_ - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = static_cast<int>(v % n_);
            v /= n_;
        }
        return s;
    }

    bool accessible(std::int64_t v) const { return acc_[static_cast<std::size_t>(v)]; }
    const std::vector<bool>& accessible_set() const { return acc_; }

    /// Shallow-digraph successors (side child tuples must be accessible).
    /// With `barbell_eps` and k == 3, also the (q,q',q') -> (q,q,q') edges.
    void successors(std::int64_t v, bool barbell_eps, std::vector<std::int64_t>& out) const {
        out.clear();
        std::array<int, 3> s = unpack(v);
        successor_edges_impl(s, barbell_eps, nullptr, &out);
    }

    void successor_edges(std::int64_t v, bool barbell_eps, std::vector<Edge>& out) const {
        out.clear();
        std::array<int, 3> s = unpack(v);
        successor_edges_impl(s, barbell_eps, &out, nullptr);
    }

private:
    // CSR bucket: ids grouped by state, ids_[off_[s] .. off_[s+1]).
    struct Csr {
        std::vector<std::int32_t> off;
        std::vector<std::int32_t> ids;
    };
    struct Span {
        const std::int32_t* begin = nullptr;
        const std::int32_t* end = nullptr;
    };

    const WTA& a_;
    int k_;
    std::int64_t n_;
    std::int64_t total_ = 0;
    // [letter][pos]: transition ids bucketed by children[pos]
    std::vector<std::vector<Csr>> by_child_;
    std::vector<std::vector<std::int32_t>> leaf_;  // [letter] -> rank-0 transition ids
    std::vector<bool> acc_;

    Span child_span(std::size_t letter, std::size_t pos, std::size_t state) const {
        const Csr& c = by_child_[letter][pos];
        return Span{c.ids.data() + c.off[state], c.ids.data() + c.off[state + 1]};
    }

    void build_index() {
        std::size_t nl = a_.alphabet.size();
        by_child_.assign(nl, {});
        leaf_.assign(nl, {});
        for (std::size_t l = 0; l < nl; ++l)
            by_child_[l].assign(
                static_cast<std::size_t>(a_.alphabet.rank(static_cast<SymbolId>(l))), Csr{});
        // counting pass, then placement
        for (auto& per_letter : by_child_)
            for (Csr& c : per_letter) c.off.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (const Transition& t : a_.transitions)
            for (std::size_t p = 0; p < t.children.size(); ++p)
                ++by_child_[static_cast<std::size_t>(t.letter)][p]
                           .off[static_cast<std::size_t>(t.children[p]) + 1];
        for (auto& per_letter : by_child_)
            for (Csr& c : per_letter) {
                for (std::size_t s = 1; s < c.off.size(); ++s) c.off[s] += c.off[s - 1];
                c.ids.resize(static_cast<std::size_t>(c.off.back()));
            }
        std::vector<std::vector<std::vector<std::int32_t>>> next(nl);
        for (std::size_t l = 0; l < nl; ++l) {
            next[l].assign(by_child_[l].size(), {});
            for (std::size_t p = 0; p < by_child_[l].size(); ++p)
                next[l][p].assign(by_child_[l][p].off.begin(), by_child_[l][p].off.end() - 1);
        }
        for (std::size_t ti = 0; ti < a_.transitions.size(); ++ti) {
            const Transition& t = a_.transitions[ti];
            if (t.children.empty()) {
                leaf_[static_cast<std::size_t>(t.letter)].push_back(static_cast<std::int32_t>(ti));
            } else {
                for (std::size_t p = 0; p < t.children.size(); ++p) {
                    std::size_t l = static_cast<std::size_t>(t.letter);
                    std::size_t s = static_cast<std::size_t>(t.children[p]);
                    by_child_[l][p].ids[static_cast<std::size_t>(next[l][p][s]++)] =
                        static_cast<std::int32_t>(ti);
                }
            }
        }
    }

    template <typename Fn>
    void for_combos(const std::array<Span, 3>& lists, Fn&& fn) const {
        std::array<int, 3> combo{-1, -1, -1};
        if (k_ == 1) {
            for (const std::int32_t* p0 = lists[0].begin; p0 != lists[0].end; ++p0) {
                combo[0] = *p0;
                fn(combo);
            }
        } else if (k_ == 2) {
            for (const std::int32_t* p0 = lists[0].begin; p0 != lists[0].end; ++p0)
                for (const std::int32_t* p1 = lists[1].begin; p1 != lists[1].end; ++p1) {
                    combo[0] = *p0;
                    combo[1] = *p1;
                    fn(combo);
                }
        } else {
            for (const std::int32_t* p0 = lists[0].begin; p0 != lists[0].end; ++p0)
                for (const std::int32_t* p1 = lists[1].begin; p1 != lists[1].end; ++p1)
                    for (const std::int32_t* p2 = lists[2].begin; p2 != lists[2].end; ++p2) {
                        combo[0] = *p0;
                        combo[1] = *p1;
                        combo[2] = *p2;
                        fn(combo);
                    }
        }
    }

    std::int64_t combo_child_tuple(const std::array<int, 3>& combo, std::size_t pos) const {
        std::array<int, 3> s{0, 0, 0};
        for (int i = 0; i < k_; ++i)
            s[static_cast<std::size_t>(i)] =
                a_.transitions[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])]
                    .children[pos];
        return pack(s);
    }

    std::int64_t combo_target_tuple(const std::array<int, 3>& combo) const {
        std::array<int, 3> s{0, 0, 0};
        for (int i = 0; i < k_; ++i)
            s[static_cast<std::size_t>(i)] =
                a_.transitions[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])].target;
        return pack(s);
    }

    void saturate() {
        acc_.assign(static_cast<std::size_t>(total_), false);
        std::vector<std::int64_t> worklist;
        auto mark = [&](std::int64_t v) {
            if (!acc_[static_cast<std::size_t>(v)]) {
                acc_[static_cast<std::size_t>(v)] = true;
                worklist.push_back(v);
            }
        };
        std::array<Span, 3> lists{};
        for (std::size_t l = 0; l < a_.alphabet.size(); ++l) {
            if (a_.alphabet.rank(static_cast<SymbolId>(l)) != 0) continue;
            Span all{leaf_[l].data(), leaf_[l].data() + leaf_[l].size()};
            for (int i = 0; i < k_; ++i) lists[static_cast<std::size_t>(i)] = all;
            for_combos(lists, [&](const std::array<int, 3>& combo) { mark(combo_target_tuple(combo)); });
        }
        while (!worklist.empty()) {
            std::int64_t v = worklist.back();
            worklist.pop_back();
            std::array<int, 3> s = unpack(v);
            for (std::size_t l = 0; l < a_.alphabet.size(); ++l) {
                int rank = a_.alphabet.rank(static_cast<SymbolId>(l));
                for (int pos = 0; pos < rank; ++pos) {
                    for (int i = 0; i < k_; ++i)
                        lists[static_cast<std::size_t>(i)] =
                            child_span(l, static_cast<std::size_t>(pos),
                                       static_cast<std::size_t>(s[static_cast<std::size_t>(i)]));
                    for_combos(lists, [&](const std::array<int, 3>& combo) {
                        for (int p = 0; p < rank; ++p)
                            if (p != pos &&
                                !acc_[static_cast<std::size_t>(
                                    combo_child_tuple(combo, static_cast<std::size_t>(p)))])
                                return;
                        mark(combo_target_tuple(combo));
                    });
                }
            }
        }
    }

    void successor_edges_impl(const std::array<int, 3>& s, bool barbell_eps,
                              std::vector<Edge>* edges, std::vector<std::int64_t>* ids) const {
        std::array<Span, 3> lists{};
        for (std::size_t l = 0; l < a_.alphabet.size(); ++l) {
            int rank = a_.alphabet.rank(static_cast<SymbolId>(l));
            for (int pos = 0; pos < rank; ++pos) {
                for (int i = 0; i < k_; ++i)
                    lists[static_cast<std::size_t>(i)] =
                        child_span(l, static_cast<std::size_t>(pos),
                                   static_cast<std::size_t>(s[static_cast<std::size_t>(i)]));
                for_combos(lists, [&](const std::array<int, 3>& combo) {
                    for (int p = 0; p < rank; ++p)
                        if (p != pos &&
                            !acc_[static_cast<std::size_t>(
                                combo_child_tuple(combo, static_cast<std::size_t>(p)))])
                            return;
                    std::int64_t tgt = combo_target_tuple(combo);
                    if (ids) ids->push_back(tgt);
                    if (edges)
                        edges->push_back(Edge{tgt, static_cast<SymbolId>(l), pos, combo, false});
                });
            }
        }
        if (barbell_eps && k_ == 3 && s[1] == s[2] && s[0] != s[1]) {
            // (q, q', q') -> (q, q, q')
            std::array<int, 3> t{s[0], s[0], s[1]};
            std::int64_t tgt = pack(t);
            if (ids) ids->push_back(tgt);
            if (edges) edges->push_back(Edge{tgt, 0, 0, {-1, -1, -1}, true});
        }
    }
};

/// Minimal common witness trees for accessible k-tuples, by size-ordered
/// saturation (hypergraph Dijkstra).  Intended for witness-scale automata.
class ProductWitness {
public:
    ProductWitness(const WTA& a, int k) : a_(a), k_(k), n_(a.num_states()) {
        compute();
    }

    bool has(std::int64_t tuple) const { return entries_.count(tuple) != 0; }

    Tree tree(std::int64_t tuple) const {
        auto it = entries_.find(tuple);
        if (it == entries_.end())
            throw AutomatonError("no witness tree for requested tuple");
        const Entry& e = it->second;
        Tree t(e.letter);
        t.children.reserve(e.children.size());
        for (std::int64_t c : e.children) t.children.push_back(tree(c));
        return t;
    }

    std::int64_t pack(const std::array<int, 3>& s) const {
        std::int64_t v = 0;
        for (int i = 0; i < k_; ++i) v = v * n_ + s[static_cast<std::size_t>(i)];
        return v;
    }

private:
    struct Entry {
        std::int64_t size = 0;
        SymbolId letter = 0;
        std::vector<std::int64_t> children;
        bool done = false;
    };
    const WTA& a_;
    int k_;
    std::int64_t n_;
    std::unordered_map<std::int64_t, Entry> entries_;

    std::int64_t trans_tuple_pack(const std::array<int, 3>& combo, int child_pos) const {
        std::array<int, 3> s{0, 0, 0};
        for (int i = 0; i < k_; ++i) {
            const Transition& t =
                a_.transitions[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])];
            s[static_cast<std::size_t>(i)] = child_pos < 0 ? t.target : t.children[static_cast<std::size_t>(child_pos)];
        }
        return pack(s);
    }

    void compute() {
        // by_child[letter][pos][state], leaf[letter]: same index as ProductSpace.
        std::size_t nl = a_.alphabet.size();
        std::vector<std::vector<std::vector<std::vector<int>>>> by_child(nl);
        std::vector<std::vector<int>> leaf(nl);
        for (std::size_t l = 0; l < nl; ++l)
            by_child[l].assign(static_cast<std::size_t>(a_.alphabet.rank(static_cast<SymbolId>(l))),
                               std::vector<std::vector<int>>(static_cast<std::size_t>(n_)));
        for (std::size_t ti = 0; ti < a_.transitions.size(); ++ti) {
            const Transition& t = a_.transitions[ti];
            if (t.children.empty())
                leaf[static_cast<std::size_t>(t.letter)].push_back(static_cast<int>(ti));
            else
                for (std::size_t p = 0; p < t.children.size(); ++p)
                    by_child[static_cast<std::size_t>(t.letter)][p]
                            [static_cast<std::size_t>(t.children[p])]
                                .push_back(static_cast<int>(ti));
        }

        using Item = std::pair<std::int64_t, std::int64_t>;  // (size, tuple)
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;

        auto relax = [&](std::int64_t tuple, std::int64_t size, SymbolId letter,
                         std::vector<std::int64_t> children) {
            auto it = entries_.find(tuple);
            if (it == entries_.end() || (!it->second.done && size < it->second.size)) {
                Entry& e = entries_[tuple];
                e.size = size;
                e.letter = letter;
                e.children = std::move(children);
                e.done = false;
                pq.push({size, tuple});
            }
        };

        auto try_combo = [&](SymbolId letter, int rank, const std::array<int, 3>& combo) {
            std::int64_t size = 1;
            std::vector<std::int64_t> children;
            children.reserve(static_cast<std::size_t>(rank));
            for (int p = 0; p < rank; ++p) {
                std::int64_t ct = trans_tuple_pack(combo, p);
                auto it = entries_.find(ct);
                if (it == entries_.end() || !it->second.done) return;
                size += it->second.size;
                children.push_back(ct);
            }
            relax(trans_tuple_pack(combo, -1), size, letter, std::move(children));
        };

        std::array<const std::vector<int>*, 3> lists{nullptr, nullptr, nullptr};
        auto for_combos = [&](auto&& fn) {
            std::array<int, 3> combo{-1, -1, -1};
            if (k_ == 1) {
                for (int t0 : *lists[0]) { combo[0] = t0; fn(combo); }
            } else if (k_ == 2) {
                for (int t0 : *lists[0])
                    for (int t1 : *lists[1]) { combo[0] = t0; combo[1] = t1; fn(combo); }
            } else {
                for (int t0 : *lists[0])
                    for (int t1 : *lists[1])
                        for (int t2 : *lists[2]) {
                            combo[0] = t0; combo[1] = t1; combo[2] = t2;
                            fn(combo);
                        }
            }
        };

        for (std::size_t l = 0; l < nl; ++l) {
            if (a_.alphabet.rank(static_cast<SymbolId>(l)) != 0) continue;
            for (int i = 0; i < k_; ++i) lists[static_cast<std::size_t>(i)] = &leaf[l];
            for_combos([&](const std::array<int, 3>& combo) {
                try_combo(static_cast<SymbolId>(l), 0, combo);
            });
        }

        while (!pq.empty()) {
            auto [size, tuple] = pq.top();
            pq.pop();
            Entry& e = entries_[tuple];
            if (e.done || e.size != size) continue;
            e.done = true;
            std::array<int, 3> s{0, 0, 0};
            {
                std::int64_t v = tuple;
                for (int i = k_ - 1; i >= 0; --i) {
                    s[static_cast<std::size_t>(i)] = static_cast<int>(v % n_);
                    v /= n_;
                }
            }
            for (std::size_t l = 0; l < nl; ++l) {
                int rank = a_.alphabet.rank(static_cast<SymbolId>(l));
                for (int pos = 0; pos < rank; ++pos) {
                    for (int i = 0; i < k_; ++i)
                        lists[static_cast<std::size_t>(i)] =
                            &by_child[l][static_cast<std::size_t>(pos)]
                                     [static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
                    for_combos([&](const std::array<int, 3>& combo) {
                        try_combo(static_cast<SymbolId>(l), rank, combo);
                    });
                }
            }
        }
        // Drop entries that never finalized (shouldn't happen).
        for (auto it = entries_.begin(); it != entries_.end();)
            it = it->second.done ? std::next(it) : entries_.erase(it);
    }
};

// ---------------------------------------------------------------------------
// Pair accessibility and ambiguous states

/// (q, q') pair-accessible iff a common tree admits a run to q and one to q'.
inline std::vector<bool> pair_accessible(const WTA& a) {
    ProductSpace ps(a, 2);
    return ps.accessible_set();  // indexed by q * n + q'
}

inline int ambiguity_pair_state(const WTA& a, int q, int p) { return q * a.num_states() + p; }
inline int ambiguity_hash_state(const WTA& a, int q) {
    return a.num_states() * a.num_states() + q;
}

/// Seidl's quadratic-size product-like automaton: states (q,q') packed as
/// q*n+q' and (q,#) packed as n*n+q.  (q,#) accessible in the result iff q
/// is ambiguous (some tree has two distinct runs to q).  Weights 1, no
/// accepting states.
inline WTA ambiguity_automaton(const WTA& a) {
    int n = a.num_states();
    WTA ext;
    ext.alphabet = a.alphabet;
    for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p)
            ext.add_state("(" + a.states[static_cast<std::size_t>(q)] + "," +
                          a.states[static_cast<std::size_t>(p)] + ")");
    for (int q = 0; q < n; ++q) ext.add_state("(" + a.states[static_cast<std::size_t>(q)] + ",#)");
    auto pair_id = [&](int q, int p) { return ambiguity_pair_state(a, q, p); };
    auto hash_id = [&](int q) { return ambiguity_hash_state(a, q); };

    // Group transitions by letter for the pairwise rules.
    std::map<SymbolId, std::vector<const Transition*>> by_letter;
    for (auto& t : a.transitions) by_letter[t.letter].push_back(&t);

    for (auto& [letter, group] : by_letter) {
        for (const Transition* t1 : group)
            for (const Transition* t2 : group) {
                std::vector<int> cs(t1->children.size());
                for (std::size_t i = 0; i < cs.size(); ++i)
                    cs[i] = pair_id(t1->children[i], t2->children[i]);
                // Plain product rule: tracks pair accessibility.
                ext.add_transition(cs, letter, pair_id(t1->target, t2->target));
                // Two distinct transitions into the same target: two runs.
                if (t1 != t2 && t1->target == t2->target)
                    ext.add_transition(std::move(cs), letter, hash_id(t1->target));
            }
    }
    // Ambiguity below propagates through any transition.
    for (auto& t : a.transitions) {
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            std::vector<int> cs(t.children.size());
            for (std::size_t j = 0; j < t.children.size(); ++j)
                cs[j] = (j == i) ? hash_id(t.children[j]) : pair_id(t.children[j], t.children[j]);
            ext.add_transition(std::move(cs), t.letter, hash_id(t.target));
        }
    }
    return ext;
}

inline std::vector<bool> ambiguous_states(const WTA& a) {
    int n = a.num_states();
    std::vector<bool> acc = accessible_states(ambiguity_automaton(a));
    std::vector<bool> out(static_cast<std::size_t>(n), false);
    for (int q = 0; q < n; ++q)
        out[static_cast<std::size_t>(q)] = acc[static_cast<std::size_t>(ambiguity_hash_state(a, q))];
    return out;
}

// ---------------------------------------------------------------------------
// Runs (explicit, for oracle checks and critical-node extraction)

/// A run stores one state per node, in preorder (root first, children
/// left-to-right, depth first).
struct Run {
    std::vector<int> states;

    int root_state() const { return states.at(0); }
};

namespace detail {
inline bool valid_run_rec(const WTA& a, const Tree& t, const Run& r, std::size_t& idx) {
    if (idx >= r.states.size()) return false;
    int q = r.states[idx++];
    std::vector<int> cs;
    cs.reserve(t.children.size());
    std::size_t child_start = idx;
    (void)child_start;
    for (auto& c : t.children) {
        if (idx >= r.states.size()) return false;
        cs.push_back(r.states[idx]);
        if (!valid_run_rec(a, c, r, idx)) return false;
    }
    for (auto& tr : a.transitions)
        if (tr.letter == t.label && tr.target == q && tr.children == cs) return true;
    return false;
}
}  // namespace detail

inline bool valid_run(const WTA& a, const Tree& t, const Run& r) {
    if (r.states.size() != tree_size(t)) return false;
    std::size_t idx = 0;
    return detail::valid_run_rec(a, t, r, idx);
}

/// Preorder index of the node at `addr`, or -1 when out of range.
inline long preorder_index(const Tree& t, const NodeAddress& addr) {
    const Tree* cur = &t;
    long idx = 0;
    for (int i : addr) {
        if (i < 1 || static_cast<std::size_t>(i) > cur->children.size()) return -1;
        ++idx;  // step past cur
        for (int j = 0; j < i - 1; ++j)
            idx += static_cast<long>(tree_size(cur->children[static_cast<std::size_t>(j)]));
        cur = &cur->children[static_cast<std::size_t>(i - 1)];
    }
    return idx;
}

// ---------------------------------------------------------------------------
// Shortest witness paths in product shallow digraphs

inline std::optional<std::vector<ProductSpace::Edge>> bfs_path(const ProductSpace& ps,
                                                               std::int64_t from, std::int64_t to,
                                                               bool barbell_eps) {
    if (from == to) return std::vector<ProductSpace::Edge>{};
    std::unordered_map<std::int64_t, std::pair<std::int64_t, ProductSpace::Edge>> parent;
    std::vector<std::int64_t> frontier{from}, next;
    parent.emplace(from, std::make_pair(from, ProductSpace::Edge{}));
    std::vector<ProductSpace::Edge> edges;
    while (!frontier.empty()) {
        next.clear();
        for (std::int64_t v : frontier) {
            ps.successor_edges(v, barbell_eps, edges);
            for (auto& e : edges) {
                if (parent.count(e.to)) continue;
                parent.emplace(e.to, std::make_pair(v, e));
                if (e.to == to) {
                    std::vector<ProductSpace::Edge> path;
                    std::int64_t cur = to;
                    while (cur != from) {
                        auto& pr = parent.at(cur);
                        path.push_back(pr.second);
                        cur = pr.first;
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                next.push_back(e.to);
            }
        }
        frontier.swap(next);
    }
    return std::nullopt;
}

/// Materializes the shallow context of a non-eps product edge: the letter
/// with the hole at hole_pos and common witness trees on the side children.
inline Tree edge_context(const WTA& a, const ProductSpace::Edge& e, const ProductWitness& pw,
                         int k) {
    if (e.eps) throw AutomatonError("eps edges carry no context");
    int rank = a.alphabet.rank(e.letter);
    Tree c(e.letter);
    c.children.reserve(static_cast<std::size_t>(rank));
    for (int p = 0; p < rank; ++p) {
        if (p == e.hole_pos) {
            c.children.push_back(hole());
        } else {
            std::array<int, 3> s{0, 0, 0};
            for (int i = 0; i < k; ++i)
                s[static_cast<std::size_t>(i)] =
                    a.transitions[static_cast<std::size_t>(e.trans[static_cast<std::size_t>(i)])]
                        .children[static_cast<std::size_t>(p)];
            c.children.push_back(pw.tree(pw.pack(s)));
        }
    }
    return c;
}

/// Composes the shallow contexts of a path (hole side first) into one
/// context; eps edges contribute nothing.
inline Tree path_context(const WTA& a, const std::vector<ProductSpace::Edge>& path,
                         const ProductWitness& pw, int k) {
    Tree c = hole();
    for (auto& e : path) {
        if (e.eps) continue;
        c = compose_contexts(edge_context(a, e, pw, k), c);
    }
    return c;
}

}  // namespace wta
