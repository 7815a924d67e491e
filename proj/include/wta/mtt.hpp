#pragma once

// Macro tree transducers: total deterministic evaluation by second-order
// substitution, branch sets of output trees, and the hat construction that
// turns output height into output size of a branch-producing MTT.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wta/core.hpp"

namespace wta {

struct MttError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutputSizeCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AnnotationExplosion : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MttCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MacroTreeTransducer {
    struct Rhs {
        enum class Kind { Output, Call, Param };
        Kind kind = Kind::Output;
        SymbolId letter = -1;  // Output: output-alphabet symbol
        int state = -1;        // Call: callee state
        int var = -1;          // Call: input child index (0-based); Param: index (0-based)
        std::vector<Rhs> children;  // Output: rank(letter); Call: rank(state) arguments

        static Rhs output(SymbolId l, std::vector<Rhs> cs = {}) {
            Rhs r;
            r.kind = Kind::Output;
            r.letter = l;
            r.children = std::move(cs);
            return r;
        }
        static Rhs call(int q, int xi, std::vector<Rhs> args = {}) {
            Rhs r;
            r.kind = Kind::Call;
            r.state = q;
            r.var = xi;
            r.children = std::move(args);
            return r;
        }
        static Rhs param(int j) {
            Rhs r;
            r.kind = Kind::Param;
            r.var = j;
            return r;
        }
    };

    RankedAlphabet input;   // Sigma
    RankedAlphabet output;  // Gamma
    std::vector<std::string> state_names;
    std::vector<int> state_ranks;
    int root_state = 0;  // must have rank 0
    // rules[q][a]: total — one RHS per (state, input letter)
    std::vector<std::vector<Rhs>> rules;

    int num_states() const { return static_cast<int>(state_names.size()); }

    int add_state(const std::string& name, int rank) {
        state_names.push_back(name);
        state_ranks.push_back(rank);
        return num_states() - 1;
    }

    const Rhs& rhs(int q, SymbolId a) const {
        return rules.at(static_cast<std::size_t>(q)).at(static_cast<std::size_t>(a));
    }

    void validate() const {
        if (state_names.empty()) throw MttError("transducer has no states");
        if (state_ranks[static_cast<std::size_t>(root_state)] != 0)
            throw MttError("root state must have rank 0");
        if (rules.size() != state_names.size()) throw MttError("rules missing for some state");
        for (int q = 0; q < num_states(); ++q) {
            if (rules[static_cast<std::size_t>(q)].size() != input.size())
                throw MttError("rules of state " + state_names[static_cast<std::size_t>(q)] +
                               " do not cover the input alphabet");
            for (SymbolId a = 0; a < static_cast<SymbolId>(input.size()); ++a)
                validate_rhs(rhs(q, a), input.rank(a), state_ranks[static_cast<std::size_t>(q)]);
        }
    }

private:
    void validate_rhs(const Rhs& r, int input_rank, int param_rank) const {
        switch (r.kind) {
            case Rhs::Kind::Output:
                if (r.letter < 0 || static_cast<std::size_t>(r.letter) >= output.size())
                    throw MttError("RHS uses an unknown output letter");
                if (static_cast<int>(r.children.size()) != output.rank(r.letter))
                    throw MttError("RHS output arity mismatch for " + output.name(r.letter));
                break;
            case Rhs::Kind::Call:
                if (r.state < 0 || r.state >= num_states())
                    throw MttError("RHS calls an unknown state");
                if (r.var < 0 || r.var >= input_rank)
                    throw MttError("RHS input variable out of range");
                if (static_cast<int>(r.children.size()) !=
                    state_ranks[static_cast<std::size_t>(r.state)])
                    throw MttError("RHS call argument count mismatch");
                break;
            case Rhs::Kind::Param:
                if (r.var < 0 || r.var >= param_rank) throw MttError("RHS parameter out of range");
                if (!r.children.empty()) throw MttError("parameters have rank 0");
                break;
        }
        for (auto& c : r.children) validate_rhs(c, input_rank, param_rank);
    }
};

using MTT = MacroTreeTransducer;

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

// Values q<t> are trees over Gamma plus parameter leaves, encoded with
// negative labels (kHole = -1 stays reserved).
inline SymbolId param_label(int j) { return -2 - j; }
inline bool is_param_label(SymbolId l) { return l <= -2; }
inline int param_index(SymbolId l) { return -2 - l; }

class MttEvaluator {
public:
    MttEvaluator(const MTT& m, std::size_t cap) : m_(m), budget_(cap) {}

    Tree eval_root(const Tree& t) {
        const Tree& body = value(m_.root_state, t);
        Tree out = copy_counted(body);
        if (has_param(out)) throw MttError("root value contains parameters");
        return out;
    }

private:
    const MTT& m_;
    std::size_t budget_;
    std::map<std::pair<int, const Tree*>, Tree> memo_;

    void spend(std::size_t n = 1) {
        if (budget_ < n) throw OutputSizeCap("output size cap exceeded during evaluation");
        budget_ -= n;
    }

    static bool has_param(const Tree& t) {
        if (is_param_label(t.label)) return true;
        for (auto& c : t.children)
            if (has_param(c)) return true;
        return false;
    }

    Tree copy_counted(const Tree& t) {
        spend();
        Tree out(t.label);
        out.children.reserve(t.children.size());
        for (auto& c : t.children) out.children.push_back(copy_counted(c));
        return out;
    }

    const Tree& value(int q, const Tree& node) {
        if (node.label < 0 || static_cast<std::size_t>(node.label) >= m_.input.size())
            throw MttError("input tree not over the transducer's input alphabet");
        auto key = std::make_pair(q, &node);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Tree v = expand(m_.rhs(q, node.label), node);
        return memo_.emplace(std::move(key), std::move(v)).first->second;
    }

    Tree expand(const MTT::Rhs& r, const Tree& node) {
        switch (r.kind) {
            case MTT::Rhs::Kind::Output: {
                spend();
                Tree out(r.letter);
                out.children.reserve(r.children.size());
                for (auto& c : r.children) out.children.push_back(expand(c, node));
                return out;
            }
            case MTT::Rhs::Kind::Param:
                spend();
                return Tree(param_label(r.var));
            case MTT::Rhs::Kind::Call: {
                std::vector<Tree> args;
                args.reserve(r.children.size());
                for (auto& c : r.children) args.push_back(expand(c, node));
                const Tree& body = value(r.state, node.children.at(static_cast<std::size_t>(r.var)));
                return substitute(body, args);
            }
        }
        throw MttError("unreachable");
    }

    Tree substitute(const Tree& body, const std::vector<Tree>& args) {
        if (is_param_label(body.label))
            return args.at(static_cast<std::size_t>(param_index(body.label)));
        spend();
        Tree out(body.label);
        out.children.reserve(body.children.size());
        for (auto& c : body.children) out.children.push_back(substitute(c, args));
        return out;
    }
};

}  // namespace detail

inline constexpr std::size_t kDefaultOutputCap = 1'000'000;

/// Value of the transducer on t (the root state's value), over Gamma.
inline Tree mtt_eval(const MTT& m, const Tree& t, std::size_t output_cap = kDefaultOutputCap) {
    detail::MttEvaluator ev(m, output_cap);
    return ev.eval_root(t);
}

// ---------------------------------------------------------------------------
// Branch alphabets and branches of output trees

struct BranchAlphabet {
    RankedAlphabet hat;              // one rank-1 symbol per positive-rank output letter + cross
    SymbolId cross = -1;             // rank-0 terminator
    std::vector<SymbolId> hat_of;    // per Gamma symbol; -1 for rank-0 letters
    std::vector<SymbolId> gamma_of;  // per hat symbol; -1 for cross
};

inline BranchAlphabet make_branch_alphabet(const RankedAlphabet& gamma) {
    BranchAlphabet ba;
    ba.hat_of.assign(gamma.size(), -1);
    for (SymbolId a = 0; a < static_cast<SymbolId>(gamma.size()); ++a) {
        if (gamma.rank(a) == 0) continue;
        std::string name = gamma.name(a) + "^";
        while (ba.hat.find(name) != -2) name += "^";
        ba.hat_of[static_cast<std::size_t>(a)] = ba.hat.add_symbol(name, 1);
        ba.gamma_of.push_back(a);
    }
    std::string cname = "✠";  // the cross terminator
    while (ba.hat.find(cname) != -2) cname += "'";
    ba.cross = ba.hat.add_symbol(cname, 0);
    ba.gamma_of.push_back(-1);
    return ba;
}

namespace detail {
inline void branches_rec(const BranchAlphabet& ba, const Tree& t, std::vector<SymbolId>& prefix,
                         std::vector<Tree>& out) {
    // Every node contributes the branch "prefix down to here, then cross".
    Tree b(ba.cross);
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) b = Tree(*it, {std::move(b)});
    out.push_back(std::move(b));
    if (t.children.empty()) return;
    prefix.push_back(ba.hat_of[static_cast<std::size_t>(t.label)]);
    for (auto& c : t.children) branches_rec(ba, c, prefix, out);
    prefix.pop_back();
}
}  // namespace detail

inline bool tree_set_less(const Tree& a, const Tree& b) { return tree_less(a, b); }

/// All branches of t, sorted and deduplicated, as unary trees over the hat
/// alphabet terminated by the cross symbol.
inline std::vector<Tree> branches(const BranchAlphabet& ba, const Tree& t) {
    std::vector<Tree> out;
    std::vector<SymbolId> prefix;
    detail::branches_rec(ba, t, prefix, out);
    std::sort(out.begin(), out.end(), tree_set_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Branches of right-hand sides (Def 6.2) and the hat construction

/// One state of the branch transducer: q^cross (alpha = -1, rank 0) or
/// q^{y_{alpha+1}} (alpha >= 0, rank 1).
struct HatState {
    int base = -1;
    int alpha = -1;
    std::string name;
    int rank() const { return alpha < 0 ? 0 : 1; }
};

struct HatConstruction {
    const MTT* base = nullptr;
    BranchAlphabet ba;
    std::vector<HatState> states;              // Q', also the annotation slots
    std::vector<std::vector<int>> state_id;    // [q][alpha+1] -> Q' index
    int root = -1;                             // q0^cross
    // options[a][slot]: the admissible values of rho_{q,alpha} for input
    // letter a, where slot = state_id[q][alpha+1].  Branch RHS trees use:
    // Output nodes over the hat alphabet, Call nodes with Q' states, Param
    // leaves with the original y index.
    std::vector<std::vector<std::vector<MTT::Rhs>>> options;

    boost::multiprecision::cpp_int annotation_count(SymbolId a) const {
        boost::multiprecision::cpp_int n = 1;
        for (auto& opts : options[static_cast<std::size_t>(a)]) n *= opts.size();
        return n;
    }
};

namespace detail {

inline bool rhs_less(const MTT::Rhs& a, const MTT::Rhs& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.letter != b.letter) return a.letter < b.letter;
    if (a.state != b.state) return a.state < b.state;
    if (a.var != b.var) return a.var < b.var;
    if (a.children.size() != b.children.size()) return a.children.size() < b.children.size();
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (rhs_less(a.children[i], b.children[i])) return true;
        if (rhs_less(b.children[i], a.children[i])) return false;
    }
    return false;
}

inline bool rhs_equal(const MTT::Rhs& a, const MTT::Rhs& b) {
    return !rhs_less(a, b) && !rhs_less(b, a);
}

/// Leaf of a (unary) branch; classifies y_i-branches vs cross-branches.
inline const MTT::Rhs& branch_leaf(const MTT::Rhs& b) {
    const MTT::Rhs* cur = &b;
    while (!cur->children.empty()) cur = &cur->children[0];
    return *cur;
}

inline void rhs_branches_rec(const MTT& m, const HatConstruction& h, const MTT::Rhs& r,
                             std::vector<MTT::Rhs>& out) {
    // Every subterm contributes the bare cross branch; emitted by the caller
    // exactly once at top level, so here we only emit non-trivial heads.
    switch (r.kind) {
        case MTT::Rhs::Kind::Param:
            out.push_back(MTT::Rhs::param(r.var));
            break;
        case MTT::Rhs::Kind::Output: {
            if (r.children.empty()) break;
            SymbolId hat = h.ba.hat_of[static_cast<std::size_t>(r.letter)];
            for (auto& c : r.children) {
                std::vector<MTT::Rhs> sub{MTT::Rhs::output(h.ba.cross)};
                rhs_branches_rec(m, h, c, sub);
                for (auto& b : sub) out.push_back(MTT::Rhs::output(hat, {std::move(b)}));
            }
            break;
        }
        case MTT::Rhs::Kind::Call: {
            out.push_back(MTT::Rhs::call(h.state_id[static_cast<std::size_t>(r.state)][0], r.var));
            for (std::size_t j = 0; j < r.children.size(); ++j) {
                std::vector<MTT::Rhs> sub{MTT::Rhs::output(h.ba.cross)};
                rhs_branches_rec(m, h, r.children[j], sub);
                int qy = h.state_id[static_cast<std::size_t>(r.state)][j + 1];
                for (auto& b : sub) out.push_back(MTT::Rhs::call(qy, r.var, {std::move(b)}));
            }
            break;
        }
    }
}

}  // namespace detail

/// All branches of an RHS tree per Def 6.2, deduplicated and canonically
/// ordered.  Requires the hat skeleton (for Q' ids and the hat alphabet).
inline std::vector<MTT::Rhs> rhs_branches(const MTT& m, const HatConstruction& h,
                                          const MTT::Rhs& r) {
    std::vector<MTT::Rhs> out{MTT::Rhs::output(h.ba.cross)};
    detail::rhs_branches_rec(m, h, r, out);
    std::sort(out.begin(), out.end(), detail::rhs_less);
    out.erase(std::unique(out.begin(), out.end(), detail::rhs_equal), out.end());
    return out;
}

/// True iff the branch is a y-branch with the given parameter index; pass
/// alpha = -1 to test for a cross-branch.
inline bool branch_has_class(const MTT::Rhs& b, int alpha) {
    const MTT::Rhs& leaf = detail::branch_leaf(b);
    bool is_param = leaf.kind == MTT::Rhs::Kind::Param;
    if (alpha < 0) return !is_param;
    return is_param && leaf.var == alpha;
}

inline HatConstruction hat(const MTT& m,
                           const boost::multiprecision::cpp_int& annotation_cap =
                               boost::multiprecision::cpp_int(1) << 40) {
    HatConstruction h;
    h.base = &m;
    h.ba = make_branch_alphabet(m.output);
    h.state_id.assign(static_cast<std::size_t>(m.num_states()), {});
    for (int q = 0; q < m.num_states(); ++q) {
        HatState s;
        s.base = q;
        s.alpha = -1;
        s.name = m.state_names[static_cast<std::size_t>(q)] + "^✠";
        h.state_id[static_cast<std::size_t>(q)].push_back(static_cast<int>(h.states.size()));
        h.states.push_back(s);
        for (int j = 0; j < m.state_ranks[static_cast<std::size_t>(q)]; ++j) {
            HatState sy;
            sy.base = q;
            sy.alpha = j;
            sy.name = m.state_names[static_cast<std::size_t>(q)] + "^y" + std::to_string(j + 1);
            h.state_id[static_cast<std::size_t>(q)].push_back(static_cast<int>(h.states.size()));
            h.states.push_back(sy);
        }
    }
    h.root = h.state_id[static_cast<std::size_t>(m.root_state)][0];

    h.options.assign(m.input.size(), {});
    for (SymbolId a = 0; a < static_cast<SymbolId>(m.input.size()); ++a) {
        h.options[static_cast<std::size_t>(a)].resize(h.states.size());
        for (std::size_t slot = 0; slot < h.states.size(); ++slot) {
            const HatState& s = h.states[slot];
            std::vector<MTT::Rhs> all = rhs_branches(m, h, m.rhs(s.base, a));
            std::vector<MTT::Rhs> picked;
            for (auto& b : all)
                if (branch_has_class(b, s.alpha)) picked.push_back(b);
            if (s.alpha >= 0) {
                // rho_{q,y_i} may also be the bare cross
                picked.push_back(MTT::Rhs::output(h.ba.cross));
                std::sort(picked.begin(), picked.end(), detail::rhs_less);
                picked.erase(std::unique(picked.begin(), picked.end(), detail::rhs_equal),
                             picked.end());
            }
            h.options[static_cast<std::size_t>(a)][slot] = std::move(picked);
        }
        if (h.annotation_count(a) > annotation_cap)
            throw AnnotationExplosion("annotated alphabet too large for letter " +
                                      m.input.name(a));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Annotated trees and evaluation of the branch transducer

/// Input tree of the branch transducer: a base letter plus one option index
/// per annotation slot (Q' state).
struct AnnotatedTree {
    SymbolId letter = 0;
    std::vector<int> choice;  // size = |Q'|
    std::vector<AnnotatedTree> children;
};

/// A value of the branch transducer: a label sequence over hat letters
/// followed by either the cross terminator or the single parameter y1.
struct BranchValue {
    std::vector<SymbolId> labels;
    bool ends_param = false;

    std::size_t size() const { return labels.size() + 1; }

    bool operator==(const BranchValue& o) const {
        return ends_param == o.ends_param && labels == o.labels;
    }
    bool operator<(const BranchValue& o) const {
        if (ends_param != o.ends_param) return ends_param < o.ends_param;
        return labels < o.labels;
    }
};

inline Tree branch_value_tree(const BranchAlphabet& ba, const BranchValue& v) {
    if (v.ends_param) throw MttError("parameter-terminated value is not a closed branch");
    Tree t(ba.cross);
    for (auto it = v.labels.rbegin(); it != v.labels.rend(); ++it) t = Tree(*it, {std::move(t)});
    return t;
}

namespace detail {

/// Expands a branch RHS against already-computed child values.  `child_vals`
/// supplies, per input child, the value of every Q' state.
inline void expand_branch(const HatConstruction& h, const MTT::Rhs& r,
                          const std::vector<const std::vector<BranchValue>*>& child_vals,
                          BranchValue& out) {
    switch (r.kind) {
        case MTT::Rhs::Kind::Output:
            if (r.letter == h.ba.cross) {
                out.ends_param = false;
                return;
            }
            out.labels.push_back(r.letter);
            expand_branch(h, r.children[0], child_vals, out);
            return;
        case MTT::Rhs::Kind::Param:
            out.ends_param = true;
            return;
        case MTT::Rhs::Kind::Call: {
            const BranchValue& v =
                (*child_vals[static_cast<std::size_t>(r.var)])[static_cast<std::size_t>(r.state)];
            out.labels.insert(out.labels.end(), v.labels.begin(), v.labels.end());
            if (!v.ends_param) {
                out.ends_param = false;
                return;  // argument (if any) is discarded
            }
            if (r.children.empty())
                throw MttError("parameter-terminated value from a rank-0 branch state");
            expand_branch(h, r.children[0], child_vals, out);
            return;
        }
    }
}

inline std::vector<BranchValue> eval_hat_node(const HatConstruction& h, const AnnotatedTree& t) {
    std::vector<std::vector<BranchValue>> kids;
    kids.reserve(t.children.size());
    for (auto& c : t.children) kids.push_back(eval_hat_node(h, c));
    std::vector<const std::vector<BranchValue>*> kid_ptrs;
    for (auto& k : kids) kid_ptrs.push_back(&k);
    std::vector<BranchValue> vals(h.states.size());
    for (std::size_t slot = 0; slot < h.states.size(); ++slot) {
        const MTT::Rhs& rhs = h.options[static_cast<std::size_t>(t.letter)][slot]
                                       [static_cast<std::size_t>(t.choice[slot])];
        expand_branch(h, rhs, kid_ptrs, vals[slot]);
    }
    return vals;
}

}  // namespace detail

/// Value of branch-transducer state q^alpha on an annotated tree.
inline BranchValue eval_hat(const HatConstruction& h, int hat_state, const AnnotatedTree& t) {
    return detail::eval_hat_node(h, t)[static_cast<std::size_t>(hat_state)];
}

/// Every annotated tree projecting to t, within a count cap.
inline std::vector<AnnotatedTree> all_annotations(const HatConstruction& h, const Tree& t,
                                                  std::size_t cap = 1'000'000) {
    std::vector<std::vector<AnnotatedTree>> kids;
    for (auto& c : t.children) kids.push_back(all_annotations(h, c, cap));

    std::vector<AnnotatedTree> out;
    AnnotatedTree cur;
    cur.letter = t.label;
    cur.choice.assign(h.states.size(), 0);
    cur.children.resize(t.children.size());
    std::function<void(std::size_t)> pick_children = [&](std::size_t i) {
        if (i == kids.size()) {
            // enumerate the choice vector
            std::function<void(std::size_t)> pick_slot = [&](std::size_t slot) {
                if (slot == h.states.size()) {
                    out.push_back(cur);
                    if (out.size() > cap)
                        throw MttCapExceeded("too many annotations to enumerate");
                    return;
                }
                std::size_t nopts =
                    h.options[static_cast<std::size_t>(t.label)][slot].size();
                for (std::size_t o = 0; o < nopts; ++o) {
                    cur.choice[slot] = static_cast<int>(o);
                    pick_slot(slot + 1);
                }
            };
            pick_slot(0);
            return;
        }
        for (auto& k : kids[i]) {
            cur.children[i] = k;
            pick_children(i + 1);
        }
    };
    pick_children(0);
    return out;
}

// ---------------------------------------------------------------------------
// Height lemma verification

struct HeightLemmaReport {
    bool membership = false;   // every annotated value is a branch of the output
    bool max_matches = false;  // max annotated value size == output height + 1
    std::size_t output_height = 0;
    std::size_t max_branch_size = 0;
    std::size_t distinct_tuples = 0;  // DP state count, for diagnostics

    bool ok() const { return membership && max_matches; }
};

namespace detail {

using ValueTuple = std::vector<BranchValue>;

/// Exact set of reachable per-state value tuples over all annotations of t.
/// Sound because a node's tuple depends only on its own annotation and its
/// children's tuples.
inline std::set<ValueTuple> hat_value_tuples(const HatConstruction& h, const Tree& t,
                                             std::size_t cap, std::size_t& dp_states) {
    std::vector<std::set<ValueTuple>> kids;
    for (auto& c : t.children) kids.push_back(hat_value_tuples(h, c, cap, dp_states));

    std::set<ValueTuple> out;
    std::vector<const ValueTuple*> chosen(kids.size());
    std::function<void(std::size_t)> pick = [&](std::size_t i) {
        if (i == kids.size()) {
            std::vector<const std::vector<BranchValue>*> kid_ptrs(chosen.begin(), chosen.end());
            // enumerate annotation slots, computing each component directly
            ValueTuple tuple(h.states.size());
            std::function<void(std::size_t)> slot_rec = [&](std::size_t slot) {
                if (slot == h.states.size()) {
                    out.insert(tuple);
                    if (out.size() > cap)
                        throw MttCapExceeded("value-tuple DP exceeds the configured cap");
                    return;
                }
                for (auto& opt : h.options[static_cast<std::size_t>(t.label)][slot]) {
                    tuple[slot] = BranchValue{};
                    expand_branch(h, opt, kid_ptrs, tuple[slot]);
                    slot_rec(slot + 1);
                }
            };
            slot_rec(0);
            return;
        }
        for (auto& tup : kids[i]) {
            chosen[i] = &tup;
            pick(i + 1);
        }
    };
    pick(0);
    dp_states += out.size();
    return out;
}

}  // namespace detail

inline HeightLemmaReport verify_height_lemma(const MTT& m, const Tree& t,
                                             std::size_t output_cap = kDefaultOutputCap,
                                             std::size_t dp_cap = 200'000) {
    HatConstruction h = hat(m);
    Tree out = mtt_eval(m, t, output_cap);
    std::vector<Tree> bs = branches(h.ba, out);
    std::set<Tree, bool (*)(const Tree&, const Tree&)> branch_set(tree_set_less);
    for (auto& b : bs) branch_set.insert(b);

    HeightLemmaReport rep;
    rep.output_height = tree_height(out);
    rep.membership = true;

    std::size_t dp_states = 0;
    std::set<detail::ValueTuple> tuples = detail::hat_value_tuples(h, t, dp_cap, dp_states);
    rep.distinct_tuples = dp_states;
    for (auto& tup : tuples) {
        const BranchValue& v = tup[static_cast<std::size_t>(h.root)];
        if (v.ends_param) {
            rep.membership = false;
            continue;
        }
        rep.max_branch_size = std::max(rep.max_branch_size, v.size());
        if (!branch_set.count(branch_value_tree(h.ba, v))) rep.membership = false;
    }
    rep.max_matches = (rep.max_branch_size == rep.output_height + 1);
    return rep;
}

}  // namespace wta
