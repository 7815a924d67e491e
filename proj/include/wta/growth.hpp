#pragma once

// Growth analysis: heavy-cycle detection (scalar / center / side), barbell
// pairs, the degree fixed point, growth verdicts and machine-checkable
// witness families (heavy-cycle contexts and pumping patterns).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/digraph.hpp"

namespace wta {

struct HeavyCyclePresent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WitnessReconstructionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class HeavyKind { ScalarHeavy, CenterAmbiguous, SideAmbiguous };

struct HeavyCycleEvidence {
    HeavyKind kind = HeavyKind::ScalarHeavy;
    int state = -1;  // the q with q =>_C q for the reconstructed C

    // ScalarHeavy: transition id, spine child index, and (unless the
    // transition itself has weight >= 2) the index of a scalar-heavy side
    // child providing the weight.
    int transition = -1;
    int spine = -1;
    int heavy_side = -1;

    // CenterAmbiguous: off-diagonal pair in the same SCC as (state,state).
    int pair_q1 = -1, pair_q2 = -1;

    // SideAmbiguous, condition T1.2: `transition`/`spine` as above plus the
    // off-spine child index whose state is ambiguous.
    int off_spine = -1;

    // SideAmbiguous, condition T1.1: two distinct transitions over the same
    // letter, spine index `spine`, cycling through the diagonal (state,state).
    bool t11 = false;
    int transition2 = -1;
};

struct BarbellSet {
    // Ordered pairs (q1, q2) with q1 != q2 and q1 => q2, sorted.
    std::vector<std::pair<int, int>> pairs;

    bool contains(int q1, int q2) const {
        return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(q1, q2));
    }
};

struct DegreeMap {
    std::vector<int> deg;
    int iterations = 0;  // rounds that changed some value

    int max_degree() const {
        int m = 0;
        for (int d : deg) m = std::max(m, d);
        return m;
    }
};

/// Pumping pattern: a tree over the alphabet extended with rank-1 loop nodes
/// carrying a barbell context.
struct PumpingPattern {
    struct Node {
        bool loop = false;
        SymbolId letter = kHole;  // when !loop
        Tree context;             // when loop: C with q' => _C q
        std::vector<Node> children;
    };
    Node root;
    int root_state = -1;

    static int count_loops(const Node& n) {
        int c = n.loop ? 1 : 0;
        for (auto& ch : n.children) c += count_loops(ch);
        return c;
    }
    int degree() const { return count_loops(root); }
};

namespace detail {
inline Tree pump_node(std::size_t n, const PumpingPattern::Node& node) {
    if (node.loop) {
        Tree inner = pump_node(n, node.children.at(0));
        Tree out = std::move(inner);
        for (std::size_t i = 0; i < n; ++i) out = apply_context(node.context, out);
        return out;
    }
    Tree out(node.letter);
    out.children.reserve(node.children.size());
    for (auto& ch : node.children) out.children.push_back(pump_node(n, ch));
    return out;
}
}  // namespace detail

inline Tree pump(std::size_t n, const PumpingPattern& p) { return detail::pump_node(n, p.root); }

struct GrowthReport {
    enum class Verdict { Empty, Polynomial, Exponential };
    Verdict verdict = Verdict::Empty;
    int degree = 0;  // meaningful for Polynomial
    std::optional<HeavyCycleEvidence> heavy;
    std::optional<DegreeMap> degrees;
    std::optional<PumpingPattern> pattern;      // maximal-degree pattern
    std::optional<Tree> accept_context;         // C' from pattern root to acceptance
    WTA trimmed;
    int original_states = 0;
    int trimmed_states = 0;
};

// ---------------------------------------------------------------------------
// Detectors

namespace detail {

inline void require_trim(const WTA& a) {
    if (!is_trim(a)) throw NotTrimmed("operation requires a trim automaton");
}

/// States reachable (at the root of some tree) by a run of weight >= 2.
/// Also records, per marked state, how the mark arose: either a weight >= 2
/// transition (heavy_child = -1) or a transition with a scalar-heavy child.
struct ScalarHeavyInfo {
    std::vector<bool> heavy;
    std::vector<int> via_transition;  // transition id that marked the state
    std::vector<int> via_child;       // index of the scalar-heavy child, or -1
};

inline ScalarHeavyInfo scalar_heavy_states(const WTA& a) {
    int n = a.num_states();
    ScalarHeavyInfo info;
    info.heavy.assign(static_cast<std::size_t>(n), false);
    info.via_transition.assign(static_cast<std::size_t>(n), -1);
    info.via_child.assign(static_cast<std::size_t>(n), -1);

    std::vector<int> worklist;
    auto mark = [&](int q, int ti, int child) {
        if (!info.heavy[static_cast<std::size_t>(q)]) {
            info.heavy[static_cast<std::size_t>(q)] = true;
            info.via_transition[static_cast<std::size_t>(q)] = ti;
            info.via_child[static_cast<std::size_t>(q)] = child;
            worklist.push_back(q);
        }
    };
    for (std::size_t ti = 0; ti < a.transitions.size(); ++ti)
        if (a.transitions[ti].weight >= 2) mark(a.transitions[ti].target, static_cast<int>(ti), -1);
    // Transitions indexed by child state for propagation.
    std::vector<std::vector<std::pair<int, int>>> by_child(static_cast<std::size_t>(n));
    for (std::size_t ti = 0; ti < a.transitions.size(); ++ti)
        for (std::size_t c = 0; c < a.transitions[ti].children.size(); ++c)
            by_child[static_cast<std::size_t>(a.transitions[ti].children[c])].push_back(
                {static_cast<int>(ti), static_cast<int>(c)});
    while (!worklist.empty()) {
        int q = worklist.back();
        worklist.pop_back();
        for (auto [ti, c] : by_child[static_cast<std::size_t>(q)])
            mark(a.transitions[static_cast<std::size_t>(ti)].target, ti, c);
    }
    return info;
}

}  // namespace detail

inline std::optional<HeavyCycleEvidence> detect_scalar_heavy(const WTA& a) {
    detail::require_trim(a);
    detail::ScalarHeavyInfo sh = detail::scalar_heavy_states(a);
    SccResult comp = scc(shallow_digraph(a));
    for (std::size_t ti = 0; ti < a.transitions.size(); ++ti) {
        const Transition& t = a.transitions[ti];
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            if (!comp.same_component(t.children[i], t.target)) continue;
            int heavy_side = -1;
            bool ok = t.weight >= 2;
            for (std::size_t j = 0; !ok && j < t.children.size(); ++j)
                if (j != i && sh.heavy[static_cast<std::size_t>(t.children[j])]) {
                    ok = true;
                    heavy_side = static_cast<int>(j);
                }
            if (ok) {
                HeavyCycleEvidence ev;
                ev.kind = HeavyKind::ScalarHeavy;
                ev.state = t.target;
                ev.transition = static_cast<int>(ti);
                ev.spine = static_cast<int>(i);
                ev.heavy_side = heavy_side;
                return ev;
            }
        }
    }
    return std::nullopt;
}

inline std::optional<HeavyCycleEvidence> detect_center_ambiguous(const WTA& a) {
    detail::require_trim(a);
    int n = a.num_states();
    if (n == 0) return std::nullopt;
    ProductSpace ps(a, 2);
    SccResult comp = scc_implicit(ps.total(), [&](std::int64_t v, std::vector<std::int64_t>& out) {
        ps.successors(v, false, out);
    });
    // Per component: a diagonal vertex and an off-diagonal vertex, if any.
    std::vector<std::int64_t> diag(comp.count, -1), off(comp.count, -1);
    for (std::int64_t v = 0; v < ps.total(); ++v) {
        std::int32_t c = comp.comp[static_cast<std::size_t>(v)];
        if (v / n == v % n) {
            if (diag[static_cast<std::size_t>(c)] < 0) diag[static_cast<std::size_t>(c)] = v;
        } else {
            if (off[static_cast<std::size_t>(c)] < 0) off[static_cast<std::size_t>(c)] = v;
        }
    }
    for (std::size_t c = 0; c < comp.count; ++c) {
        if (diag[c] >= 0 && off[c] >= 0) {
            HeavyCycleEvidence ev;
            ev.kind = HeavyKind::CenterAmbiguous;
            ev.state = static_cast<int>(diag[c] / n);
            ev.pair_q1 = static_cast<int>(off[c] / n);
            ev.pair_q2 = static_cast<int>(off[c] % n);
            return ev;
        }
    }
    return std::nullopt;
}

inline std::optional<HeavyCycleEvidence> detect_side_ambiguous(const WTA& a) {
    detail::require_trim(a);
    int n = a.num_states();
    if (n == 0) return std::nullopt;

    // (T1.2): spine cycle with an ambiguous off-spine child.
    std::vector<bool> amb = ambiguous_states(a);
    SccResult comp1 = scc(shallow_digraph(a));
    for (std::size_t ti = 0; ti < a.transitions.size(); ++ti) {
        const Transition& t = a.transitions[ti];
        for (std::size_t j = 0; j < t.children.size(); ++j) {
            if (!comp1.same_component(t.children[j], t.target)) continue;
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (i == j || !amb[static_cast<std::size_t>(t.children[i])]) continue;
                HeavyCycleEvidence ev;
                ev.kind = HeavyKind::SideAmbiguous;
                ev.state = t.target;
                ev.transition = static_cast<int>(ti);
                ev.spine = static_cast<int>(j);
                ev.off_spine = static_cast<int>(i);
                return ev;
            }
        }
    }

    // (T1.1): two distinct transitions over the same letter whose spine pair
    // closes into a cycle through a diagonal of the pair shallow digraph.
    ProductSpace ps(a, 2);
    SccResult comp2 = scc_implicit(ps.total(), [&](std::int64_t v, std::vector<std::int64_t>& out) {
        ps.successors(v, false, out);
    });
    std::vector<std::int64_t> diag(comp2.count, -1);
    for (int q = 0; q < n; ++q) {
        std::int64_t v = static_cast<std::int64_t>(q) * n + q;
        std::int32_t c = comp2.comp[static_cast<std::size_t>(v)];
        if (diag[static_cast<std::size_t>(c)] < 0) diag[static_cast<std::size_t>(c)] = v;
    }
    std::map<SymbolId, std::vector<int>> by_letter;
    for (std::size_t ti = 0; ti < a.transitions.size(); ++ti)
        by_letter[a.transitions[ti].letter].push_back(static_cast<int>(ti));
    const std::vector<bool>& pacc = ps.accessible_set();
    for (auto& [letter, group] : by_letter) {
        for (int ti1 : group)
            for (int ti2 : group) {
                if (ti1 == ti2) continue;
                const Transition& t1 = a.transitions[static_cast<std::size_t>(ti1)];
                const Transition& t2 = a.transitions[static_cast<std::size_t>(ti2)];
                std::int64_t tgt = static_cast<std::int64_t>(t1.target) * n + t2.target;
                for (std::size_t i = 0; i < t1.children.size(); ++i) {
                    std::int64_t src = static_cast<std::int64_t>(t1.children[i]) * n + t2.children[i];
                    if (!comp2.same_component(src, tgt)) continue;
                    std::int32_t c = comp2.comp[static_cast<std::size_t>(src)];
                    if (diag[static_cast<std::size_t>(c)] < 0) continue;
                    bool sides_ok = true;
                    for (std::size_t j = 0; j < t1.children.size() && sides_ok; ++j)
                        if (j != i &&
                            !pacc[static_cast<std::size_t>(
                                static_cast<std::int64_t>(t1.children[j]) * n + t2.children[j])])
                            sides_ok = false;
                    if (!sides_ok) continue;
                    HeavyCycleEvidence ev;
                    ev.kind = HeavyKind::SideAmbiguous;
                    ev.t11 = true;
                    ev.state = static_cast<int>(diag[static_cast<std::size_t>(c)] / n);
                    ev.transition = ti1;
                    ev.transition2 = ti2;
                    ev.spine = static_cast<int>(i);
                    return ev;
                }
            }
    }
    return std::nullopt;
}

inline std::optional<HeavyCycleEvidence> has_heavy_cycle(const WTA& a) {
    if (auto ev = detect_scalar_heavy(a)) return ev;
    if (auto ev = detect_center_ambiguous(a)) return ev;
    if (auto ev = detect_side_ambiguous(a)) return ev;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Barbells

inline BarbellSet barbell_pairs(const WTA& a) {
    detail::require_trim(a);
    BarbellSet out;
    int n = a.num_states();
    if (n == 0) return out;
    ProductSpace ps(a, 3);
    SccResult comp = scc_implicit(ps.total(), [&](std::int64_t v, std::vector<std::int64_t>& out_) {
        ps.successors(v, true, out_);
    });
    // Components containing at least one non-eps edge.
    std::vector<bool> has_real(comp.count, false);
    {
        std::vector<std::int64_t> succ;
        for (std::int64_t v = 0; v < ps.total(); ++v) {
            std::int32_t c = comp.comp[static_cast<std::size_t>(v)];
            if (has_real[static_cast<std::size_t>(c)]) continue;
            ps.successors(v, false, succ);
            for (std::int64_t w : succ)
                if (comp.comp[static_cast<std::size_t>(w)] == c) {
                    has_real[static_cast<std::size_t>(c)] = true;
                    break;
                }
        }
    }
    auto pack3 = [&](int x, int y, int z) {
        return (static_cast<std::int64_t>(x) * n + y) * n + z;
    };
    for (int q1 = 0; q1 < n; ++q1)
        for (int q2 = 0; q2 < n; ++q2) {
            if (q1 == q2) continue;
            std::int64_t u = pack3(q1, q1, q2), w = pack3(q1, q2, q2);
            if (!comp.same_component(u, w)) continue;
            if (!has_real[static_cast<std::size_t>(comp.comp[static_cast<std::size_t>(u)])])
                continue;
            out.pairs.push_back({q1, q2});
        }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

// ---------------------------------------------------------------------------
// Degrees

inline DegreeMap degrees(const WTA& a, const BarbellSet& barbells) {
    detail::require_trim(a);
    int n = a.num_states();
    DegreeMap dm;
    dm.deg.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> barbell_sources(static_cast<std::size_t>(n));
    for (auto& [q1, q2] : barbells.pairs)
        barbell_sources[static_cast<std::size_t>(q2)].push_back(q1);

    for (int round = 0; round <= n; ++round) {
        bool changed = false;
        std::vector<int> next = dm.deg;
        for (auto& t : a.transitions) {
            long sum = 0;
            for (int c : t.children) sum += dm.deg[static_cast<std::size_t>(c)];
            if (sum > next[static_cast<std::size_t>(t.target)])
                next[static_cast<std::size_t>(t.target)] = static_cast<int>(sum);
        }
        for (int q = 0; q < n; ++q)
            for (int src : barbell_sources[static_cast<std::size_t>(q)])
                if (dm.deg[static_cast<std::size_t>(src)] + 1 > next[static_cast<std::size_t>(q)])
                    next[static_cast<std::size_t>(q)] = dm.deg[static_cast<std::size_t>(src)] + 1;
        if (next != dm.deg) {
            changed = true;
            dm.deg = std::move(next);
            ++dm.iterations;
        }
        if (!changed) return dm;
    }
    throw HeavyCyclePresent("degree fixed point did not converge in |states| rounds");
}

// ---------------------------------------------------------------------------
// Witness machinery

namespace detail {

/// Lazily constructed common-witness-tree provider for a k-fold product.
class LazyWitness {
public:
    LazyWitness(const WTA& a, int k) : a_(a), k_(k) {}
    const ProductWitness& get() const {
        if (!pw_) pw_.emplace(a_, k_);
        return *pw_;
    }
    int copies() const { return k_; }

private:
    const WTA& a_;
    int k_;
    mutable std::optional<ProductWitness> pw_;
};

/// BFS path in a product shallow digraph to the first vertex satisfying
/// `target`; returns the path and the vertex reached.
template <typename Pred>
std::optional<std::pair<std::vector<ProductSpace::Edge>, std::int64_t>> bfs_path_to(
    const ProductSpace& ps, std::int64_t from, bool barbell_eps, Pred&& target) {
    if (target(from)) return std::make_pair(std::vector<ProductSpace::Edge>{}, from);
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
                if (target(e.to)) {
                    std::vector<ProductSpace::Edge> path;
                    std::int64_t cur = e.to;
                    while (cur != from) {
                        auto& pr = parent.at(cur);
                        path.push_back(pr.second);
                        cur = pr.first;
                    }
                    std::reverse(path.begin(), path.end());
                    return std::make_pair(std::move(path), e.to);
                }
                next.push_back(e.to);
            }
        }
        frontier.swap(next);
    }
    return std::nullopt;
}

inline Tree lazy_edge_context(const WTA& a, const ProductSpace::Edge& e, const LazyWitness& lw) {
    if (e.eps) throw WitnessReconstructionFailed("eps edge has no context");
    int rank = a.alphabet.rank(e.letter);
    Tree c(e.letter);
    for (int p = 0; p < rank; ++p) {
        if (p == e.hole_pos) {
            c.children.push_back(hole());
        } else {
            std::array<int, 3> s{0, 0, 0};
            for (int i = 0; i < lw.copies(); ++i)
                s[static_cast<std::size_t>(i)] =
                    a.transitions[static_cast<std::size_t>(e.trans[static_cast<std::size_t>(i)])]
                        .children[static_cast<std::size_t>(p)];
            const ProductWitness& pw = lw.get();
            c.children.push_back(pw.tree(pw.pack(s)));
        }
    }
    return c;
}

inline Tree lazy_path_context(const WTA& a, const std::vector<ProductSpace::Edge>& path,
                              const LazyWitness& lw) {
    Tree c = hole();
    for (auto& e : path) {
        if (e.eps) continue;
        c = compose_contexts(lazy_edge_context(a, e, lw), c);
    }
    return c;
}

/// Context C with from ->_C to in the single-automaton shallow digraph.
inline Tree state_path_context(const WTA& a, const ProductSpace& ps1, const LazyWitness& lw1,
                               int from, int to) {
    auto path = bfs_path_to(ps1, from, false, [to](std::int64_t v) { return v == to; });
    if (!path) throw WitnessReconstructionFailed("no shallow path between states");
    return lazy_path_context(a, path->first, lw1);
}

/// Context C with from ->_C q_acc for some accepting q_acc.
inline Tree accepting_context(const WTA& a, const ProductSpace& ps1, const LazyWitness& lw1,
                              int from) {
    auto path = bfs_path_to(ps1, from, false, [&a](std::int64_t v) {
        return a.accepting[static_cast<std::size_t>(v)] != 0;
    });
    if (!path) throw WitnessReconstructionFailed("state is not co-accessible");
    return lazy_path_context(a, path->first, lw1);
}

/// A tree with a run of weight >= 2 to the given scalar-heavy state.
inline Tree scalar_heavy_tree(const WTA& a, const ScalarHeavyInfo& sh, const ProductWitness& pw1,
                              int q) {
    if (!sh.heavy[static_cast<std::size_t>(q)])
        throw WitnessReconstructionFailed("state is not scalar-heavy");
    const Transition& t =
        a.transitions[static_cast<std::size_t>(sh.via_transition[static_cast<std::size_t>(q)])];
    int hc = sh.via_child[static_cast<std::size_t>(q)];
    Tree out(t.letter);
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (static_cast<int>(i) == hc)
            out.children.push_back(scalar_heavy_tree(a, sh, pw1, t.children[i]));
        else
            out.children.push_back(pw1.tree(t.children[i]));
    }
    return out;
}

/// A tree with two distinct runs to the given ambiguous state, recovered
/// from a minimal witness of the ambiguity automaton's (q,#) state.
inline Tree ambiguous_tree(const WTA& a, int q) {
    WTA ext = ambiguity_automaton(a);
    ProductWitness pw(ext, 1);
    std::int64_t target = ambiguity_hash_state(a, q);
    if (!pw.has(target)) throw WitnessReconstructionFailed("state is not ambiguous");
    return pw.tree(target);
}

}  // namespace detail

/// Reconstructs (C, t, C') from detector evidence: q =>_C q (context value
/// >= 2), t has a run to q, and q ->_{C'} accepting.  Value on C'[C^n[t]]
/// then grows at least like 2^n.
struct ExpWitness {
    Tree cycle;    // C
    Tree base;     // t
    Tree accept;   // C'
    int state = -1;
};

inline ExpWitness exp_witness(const WTA& a, const HeavyCycleEvidence& ev) {
    detail::require_trim(a);
    int n = a.num_states();
    ProductSpace ps1(a, 1);
    detail::LazyWitness lw1(a, 1);
    ExpWitness w;
    w.state = ev.state;

    switch (ev.kind) {
        case HeavyKind::ScalarHeavy: {
            const Transition& t = a.transitions[static_cast<std::size_t>(ev.transition)];
            detail::ScalarHeavyInfo sh = detail::scalar_heavy_states(a);
            Tree step(t.letter);
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (static_cast<int>(i) == ev.spine)
                    step.children.push_back(hole());
                else if (static_cast<int>(i) == ev.heavy_side)
                    step.children.push_back(
                        detail::scalar_heavy_tree(a, sh, lw1.get(), t.children[i]));
                else
                    step.children.push_back(lw1.get().tree(t.children[i]));
            }
            // step: q_spine ->_step q with weight >= 2; close the cycle q -> q_spine.
            Tree back = detail::state_path_context(
                a, ps1, lw1, t.target, t.children[static_cast<std::size_t>(ev.spine)]);
            w.cycle = compose_contexts(step, back);
            break;
        }
        case HeavyKind::CenterAmbiguous: {
            ProductSpace ps2(a, 2);
            detail::LazyWitness lw2(a, 2);
            std::int64_t d = static_cast<std::int64_t>(ev.state) * n + ev.state;
            std::int64_t o = static_cast<std::int64_t>(ev.pair_q1) * n + ev.pair_q2;
            auto p1 = detail::bfs_path_to(ps2, d, false, [o](std::int64_t v) { return v == o; });
            auto p2 = detail::bfs_path_to(ps2, o, false, [d](std::int64_t v) { return v == d; });
            if (!p1 || !p2)
                throw WitnessReconstructionFailed("center-ambiguous cycle not reconstructible");
            Tree c1 = detail::lazy_path_context(a, p1->first, lw2);
            Tree c2 = detail::lazy_path_context(a, p2->first, lw2);
            w.cycle = compose_contexts(c2, c1);
            break;
        }
        case HeavyKind::SideAmbiguous: {
            if (!ev.t11) {
                const Transition& t = a.transitions[static_cast<std::size_t>(ev.transition)];
                Tree step(t.letter);
                for (std::size_t i = 0; i < t.children.size(); ++i) {
                    if (static_cast<int>(i) == ev.spine)
                        step.children.push_back(hole());
                    else if (static_cast<int>(i) == ev.off_spine)
                        step.children.push_back(detail::ambiguous_tree(a, t.children[i]));
                    else
                        step.children.push_back(lw1.get().tree(t.children[i]));
                }
                Tree back = detail::state_path_context(
                    a, ps1, lw1, t.target, t.children[static_cast<std::size_t>(ev.spine)]);
                w.cycle = compose_contexts(step, back);
            } else {
                const Transition& t1 = a.transitions[static_cast<std::size_t>(ev.transition)];
                const Transition& t2 = a.transitions[static_cast<std::size_t>(ev.transition2)];
                ProductSpace ps2(a, 2);
                detail::LazyWitness lw2(a, 2);
                // Distinguishing edge: (t1.children[i], t2.children[i]) -> (t1.tgt, t2.tgt)
                // realized by the two distinct transitions.
                Tree step(t1.letter);
                for (std::size_t j = 0; j < t1.children.size(); ++j) {
                    if (static_cast<int>(j) == ev.spine) {
                        step.children.push_back(hole());
                    } else {
                        const ProductWitness& pw2 = lw2.get();
                        step.children.push_back(pw2.tree(
                            pw2.pack({t1.children[j], t2.children[j], 0})));
                    }
                }
                std::int64_t d = static_cast<std::int64_t>(ev.state) * n + ev.state;
                std::int64_t src = static_cast<std::int64_t>(
                                       t1.children[static_cast<std::size_t>(ev.spine)]) *
                                       n +
                                   t2.children[static_cast<std::size_t>(ev.spine)];
                std::int64_t tgt = static_cast<std::int64_t>(t1.target) * n + t2.target;
                auto p1 =
                    detail::bfs_path_to(ps2, d, false, [src](std::int64_t v) { return v == src; });
                auto p2 =
                    detail::bfs_path_to(ps2, tgt, false, [d](std::int64_t v) { return v == d; });
                if (!p1 || !p2)
                    throw WitnessReconstructionFailed("side-ambiguous cycle not reconstructible");
                Tree c1 = detail::lazy_path_context(a, p1->first, lw2);
                Tree c2 = detail::lazy_path_context(a, p2->first, lw2);
                w.cycle = compose_contexts(c2, compose_contexts(step, c1));
            }
            break;
        }
    }
    w.base = lw1.get().tree(ev.state);
    w.accept = detail::accepting_context(a, ps1, lw1, ev.state);
    return w;
}

// ---------------------------------------------------------------------------
// Pumping patterns

namespace detail {

/// Barbell witness context for q1 => q2: shortest path from (q1,q1,q2) to
/// (q1,q2,q2) in the triple shallow digraph extended with eps edges; real
/// edges compose into the context.
inline Tree barbell_context(const WTA& a, const ProductSpace& ps3, const LazyWitness& lw3, int q1,
                            int q2) {
    int n = a.num_states();
    auto pack3 = [&](int x, int y, int z) {
        return (static_cast<std::int64_t>(x) * n + y) * n + z;
    };
    std::int64_t from = pack3(q1, q1, q2), to = pack3(q1, q2, q2);
    auto path = bfs_path_to(ps3, from, true, [to](std::int64_t v) { return v == to; });
    if (!path) throw WitnessReconstructionFailed("barbell pair has no witness path");
    Tree c = lazy_path_context(a, path->first, lw3);
    if (c.label == kHole)
        throw WitnessReconstructionFailed("barbell witness degenerated to the empty context");
    return c;
}

}  // namespace detail

struct PolyWitness {
    PumpingPattern pattern;
    Tree accept;  // C' from the pattern's root state to acceptance
};

inline PolyWitness poly_witness(const WTA& a, const DegreeMap& dm, const BarbellSet& barbells) {
    detail::require_trim(a);
    int n = a.num_states();
    if (n == 0) throw WitnessReconstructionFailed("empty automaton has no pattern");

    // Trigger saturation: round[q] = stage at which a degree-achieving
    // derivation for q becomes fully grounded.
    constexpr int kUnset = -1;
    std::vector<int> round(static_cast<std::size_t>(n), kUnset);
    // trigger_barbell[q] = source q' of a barbell trigger, else -1 and
    // trigger_trans[q] = id of a transition trigger.
    std::vector<int> trigger_barbell(static_cast<std::size_t>(n), -1);
    std::vector<int> trigger_trans(static_cast<std::size_t>(n), -1);
    for (int q = 0; q < n; ++q)
        if (dm.deg[static_cast<std::size_t>(q)] == 0) round[static_cast<std::size_t>(q)] = 0;
    for (int r = 1; r <= n; ++r) {
        bool changed = false;
        for (int q = 0; q < n; ++q) {
            if (round[static_cast<std::size_t>(q)] != kUnset) continue;
            for (auto& [q1, q2] : barbells.pairs) {
                if (q2 != q) continue;
                if (round[static_cast<std::size_t>(q1)] != kUnset &&
                    round[static_cast<std::size_t>(q1)] < r &&
                    dm.deg[static_cast<std::size_t>(q1)] + 1 == dm.deg[static_cast<std::size_t>(q)]) {
                    round[static_cast<std::size_t>(q)] = r;
                    trigger_barbell[static_cast<std::size_t>(q)] = q1;
                    changed = true;
                    break;
                }
            }
            if (round[static_cast<std::size_t>(q)] != kUnset) continue;
            for (std::size_t ti = 0; ti < a.transitions.size(); ++ti) {
                const Transition& t = a.transitions[ti];
                if (t.target != q) continue;
                long sum = 0;
                bool ok = true;
                for (int c : t.children) {
                    if (round[static_cast<std::size_t>(c)] == kUnset ||
                        round[static_cast<std::size_t>(c)] >= r) {
                        ok = false;
                        break;
                    }
                    sum += dm.deg[static_cast<std::size_t>(c)];
                }
                if (ok && sum == dm.deg[static_cast<std::size_t>(q)]) {
                    round[static_cast<std::size_t>(q)] = r;
                    trigger_trans[static_cast<std::size_t>(q)] = static_cast<int>(ti);
                    changed = true;
                    break;
                }
            }
        }
        if (!changed) break;
    }

    int root = 0;
    for (int q = 1; q < n; ++q)
        if (dm.deg[static_cast<std::size_t>(q)] > dm.deg[static_cast<std::size_t>(root)]) root = q;
    if (round[static_cast<std::size_t>(root)] == kUnset)
        throw WitnessReconstructionFailed("no grounded trigger chain for maximal-degree state");

    detail::LazyWitness lw1(a, 1), lw3(a, 3);
    std::optional<ProductSpace> ps3;
    std::map<std::pair<int, int>, Tree> barbell_ctx;
    auto context_for = [&](int q1, int q2) -> const Tree& {
        auto key = std::make_pair(q1, q2);
        auto it = barbell_ctx.find(key);
        if (it == barbell_ctx.end()) {
            if (!ps3) ps3.emplace(a, 3);
            it = barbell_ctx.emplace(key, detail::barbell_context(a, *ps3, lw3, q1, q2)).first;
        }
        return it->second;
    };

    std::function<PumpingPattern::Node(int)> build = [&](int q) -> PumpingPattern::Node {
        if (dm.deg[static_cast<std::size_t>(q)] == 0) {
            // A plain accepted-at-q tree as a degree-0 pattern.
            Tree t = lw1.get().tree(q);
            std::function<PumpingPattern::Node(const Tree&)> wrap =
                [&](const Tree& tr) -> PumpingPattern::Node {
                PumpingPattern::Node node;
                node.letter = tr.label;
                for (auto& c : tr.children) node.children.push_back(wrap(c));
                return node;
            };
            return wrap(t);
        }
        if (trigger_barbell[static_cast<std::size_t>(q)] >= 0) {
            int q1 = trigger_barbell[static_cast<std::size_t>(q)];
            PumpingPattern::Node node;
            node.loop = true;
            node.context = context_for(q1, q);
            node.children.push_back(build(q1));
            return node;
        }
        const Transition& t =
            a.transitions[static_cast<std::size_t>(trigger_trans[static_cast<std::size_t>(q)])];
        PumpingPattern::Node node;
        node.letter = t.letter;
        for (int c : t.children) node.children.push_back(build(c));
        return node;
    };

    PolyWitness w;
    w.pattern.root = build(root);
    w.pattern.root_state = root;
    ProductSpace ps1(a, 1);
    w.accept = detail::accepting_context(a, ps1, lw1, root);
    return w;
}

// ---------------------------------------------------------------------------
// Critical nodes

namespace detail {
inline void critical_rec(const WTA& a, const DegreeMap& dm, const Tree& t, const Run& r,
                         std::size_t& idx, NodeAddress& addr, std::set<NodeAddress>& out) {
    int q = r.states[idx++];
    std::vector<int> cs;
    cs.reserve(t.children.size());
    std::size_t probe = idx;
    for (auto& c : t.children) {
        cs.push_back(r.states[probe]);
        probe += tree_size(c);
    }
    long sum = 0;
    for (int c : cs) sum += dm.deg[static_cast<std::size_t>(c)];
    if (dm.deg[static_cast<std::size_t>(q)] > sum) out.insert(addr);
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        addr.push_back(static_cast<int>(i + 1));
        critical_rec(a, dm, t.children[i], r, idx, addr, out);
        addr.pop_back();
    }
}
}  // namespace detail

/// Addresses (child indices from 1) where the run's transition is critical:
/// deg(target) > sum of child degrees.
inline std::set<NodeAddress> critical_nodes(const WTA& a, const DegreeMap& dm, const Tree& t,
                                            const Run& r) {
    if (!valid_run(a, t, r)) throw InvalidRun("run does not match tree and automaton");
    std::set<NodeAddress> out;
    std::size_t idx = 0;
    NodeAddress addr;
    detail::critical_rec(a, dm, t, r, idx, addr, out);
    return out;
}

// ---------------------------------------------------------------------------
// Top-level analysis

inline GrowthReport analyze(const WTA& a, bool with_witness = true) {
    GrowthReport rep;
    rep.original_states = a.num_states();
    rep.trimmed = trim(a);
    rep.trimmed_states = rep.trimmed.num_states();
    if (rep.trimmed.num_states() == 0) {
        rep.verdict = GrowthReport::Verdict::Empty;
        return rep;
    }
    if (auto ev = has_heavy_cycle(rep.trimmed)) {
        rep.verdict = GrowthReport::Verdict::Exponential;
        rep.heavy = *ev;
        return rep;
    }
    BarbellSet bs = barbell_pairs(rep.trimmed);
    DegreeMap dm = degrees(rep.trimmed, bs);
    rep.verdict = GrowthReport::Verdict::Polynomial;
    rep.degree = dm.max_degree();
    if (with_witness) {
        PolyWitness pw = poly_witness(rep.trimmed, dm, bs);
        rep.pattern = std::move(pw.pattern);
        rep.accept_context = std::move(pw.accept);
    }
    rep.degrees = std::move(dm);
    return rep;
}

}  // namespace wta
