#pragma once

// Brute-force ground truth: exhaustive tree/context/run enumeration, growth
// curves and exhaustive heavy-cycle/barbell searches.  Dumb on purpose.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/growth.hpp"

namespace wta {

struct NoNullarySymbol : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::size_t kEnumCap = 2'000'000;  // total enumerated terms

// All (tree, context) pools per size.  A context is a Tree with one kHole.
struct EnumPools {
    // by_size[s] = all trees of size s (s >= 1), canonically sorted
    std::vector<std::vector<Tree>> trees;
    std::vector<std::vector<Tree>> contexts;
};

/// Appends to `out` every term of size `size` rooted at `sym`, where exactly
/// `holes` (0 or 1) of the whole term is a hole, drawing children from pools.
inline void enum_children(const RankedAlphabet& alphabet, const EnumPools& pools, SymbolId sym,
                          int size, bool with_hole, std::vector<Tree>& out) {
    int rank = alphabet.rank(sym);
    // compositions of size-1 into rank parts, each part >= 1
    std::vector<Tree> partial;
    std::vector<int> sizes(static_cast<std::size_t>(rank));
    std::function<void(int, int, int)> rec = [&](int pos, int remaining, int hole_child) {
        if (pos == rank) {
            if (remaining != 0) return;
            // cartesian product over chosen pools
            std::function<void(int)> pick = [&](int i) {
                if (i == rank) {
                    Tree t(sym);
                    t.children = partial;
                    out.push_back(std::move(t));
                    return;
                }
                const std::vector<std::vector<Tree>>& pool =
                    (i == hole_child) ? pools.contexts : pools.trees;
                int s = sizes[static_cast<std::size_t>(i)];
                if (static_cast<std::size_t>(s) >= pool.size()) return;
                for (const Tree& c : pool[static_cast<std::size_t>(s)]) {
                    partial.push_back(c);
                    pick(i + 1);
                    partial.pop_back();
                }
            };
            partial.clear();
            pick(0);
            return;
        }
        int min_rest = rank - pos - 1;
        for (int s = 1; s + min_rest <= remaining; ++s) {
            sizes[static_cast<std::size_t>(pos)] = s;
            rec(pos + 1, remaining - s, hole_child);
        }
    };
    if (!with_hole) {
        rec(0, size - 1, -1);
    } else {
        for (int hc = 0; hc < rank; ++hc) rec(0, size - 1, hc);
    }
}

inline EnumPools build_pools(const RankedAlphabet& alphabet, int max_size, bool need_contexts) {
    if (!alphabet.has_nullary())
        throw NoNullarySymbol("alphabet has no rank-0 symbol; no finite trees exist");
    if (max_size < 1) throw CapExceeded("maxSize must be >= 1");
    EnumPools pools;
    pools.trees.resize(static_cast<std::size_t>(max_size) + 1);
    pools.contexts.resize(static_cast<std::size_t>(max_size) + 1);
    std::size_t total = 0;
    for (int s = 1; s <= max_size; ++s) {
        if (need_contexts && s == 1) pools.contexts[1].push_back(hole());
        for (SymbolId sym = 0; sym < static_cast<SymbolId>(alphabet.size()); ++sym) {
            if (alphabet.rank(sym) == 0) {
                if (s == 1) pools.trees[1].push_back(Tree(sym));
                continue;
            }
            enum_children(alphabet, pools, sym, s, false, pools.trees[static_cast<std::size_t>(s)]);
            if (need_contexts)
                enum_children(alphabet, pools, sym, s, true,
                              pools.contexts[static_cast<std::size_t>(s)]);
        }
        std::sort(pools.trees[static_cast<std::size_t>(s)].begin(),
                  pools.trees[static_cast<std::size_t>(s)].end(), tree_less);
        std::sort(pools.contexts[static_cast<std::size_t>(s)].begin(),
                  pools.contexts[static_cast<std::size_t>(s)].end(), tree_less);
        total += pools.trees[static_cast<std::size_t>(s)].size() +
                 pools.contexts[static_cast<std::size_t>(s)].size();
        if (total > kEnumCap) throw CapExceeded("term enumeration exceeds the configured cap");
    }
    return pools;
}

}  // namespace detail

/// Every tree of size <= maxSize, each exactly once, size-then-lexicographic.
inline std::vector<Tree> enum_trees(const RankedAlphabet& alphabet, int max_size) {
    detail::EnumPools pools = detail::build_pools(alphabet, max_size, false);
    std::vector<Tree> out;
    for (auto& bucket : pools.trees)
        for (auto& t : bucket) out.push_back(t);
    return out;
}

/// Every one-hole context of size <= maxSize (the hole counts as a node).
inline std::vector<Tree> enum_contexts(const RankedAlphabet& alphabet, int max_size) {
    detail::EnumPools pools = detail::build_pools(alphabet, max_size, true);
    std::vector<Tree> out;
    for (auto& bucket : pools.contexts)
        for (auto& c : bucket) out.push_back(c);
    return out;
}

namespace detail {
// All runs of `a` on `t` (any root state), as (root state, preorder states).
inline std::vector<std::vector<int>> enum_runs_rec(const WTA& a, const Tree& t) {
    std::vector<std::vector<std::vector<int>>> child_runs;
    for (auto& c : t.children) child_runs.push_back(enum_runs_rec(a, c));
    std::vector<std::vector<int>> out;
    for (auto& tr : a.transitions) {
        if (tr.letter != t.label) continue;
        // pick one run per child whose root matches the transition
        std::vector<int> acc{tr.target};
        std::function<void(std::size_t)> pick = [&](std::size_t i) {
            if (i == t.children.size()) {
                out.push_back(acc);
                if (out.size() > kEnumCap) throw CapExceeded("run enumeration exceeds the cap");
                return;
            }
            for (auto& rs : child_runs[i]) {
                if (rs[0] != tr.children[i]) continue;
                std::size_t mark = acc.size();
                acc.insert(acc.end(), rs.begin(), rs.end());
                pick(i + 1);
                acc.resize(mark);
            }
        };
        pick(0);
    }
    return out;
}
}  // namespace detail

inline std::vector<Run> enum_runs(const WTA& a, const Tree& t) {
    detail::check_alphabet(a, t);
    std::vector<Run> out;
    for (auto& states : detail::enum_runs_rec(a, t)) out.push_back(Run{states});
    return out;
}

/// Sum of run weights over context c with `from` at the hole, `to` at root.
inline Value context_value(const WTA& a, const Tree& c, int from, int to) {
    return context_values_from(a, c, from)[static_cast<std::size_t>(to)];
}

struct GrowthCurve {
    // max_value_by_size[i] = max accepting value over trees of size <= i+1
    std::vector<Value> max_value_by_size;
};

inline GrowthCurve brute_growth(const WTA& a, int max_size) {
    detail::EnumPools pools = detail::build_pools(a.alphabet, max_size, false);
    GrowthCurve curve;
    Value running = 0;
    for (int s = 1; s <= max_size; ++s) {
        for (const Tree& t : pools.trees[static_cast<std::size_t>(s)]) {
            Value v = value(a, t).accepting;
            if (v > running) running = v;
        }
        curve.max_value_by_size.push_back(running);
    }
    return curve;
}

/// First (state, context) in canonical order with context value >= 2 from q
/// back to q, or nothing within the cap.
inline std::optional<std::pair<int, Tree>> brute_heavy(const WTA& a, int max_context_size) {
    std::vector<Tree> contexts = enum_contexts(a.alphabet, max_context_size);
    for (const Tree& c : contexts)
        for (int q = 0; q < a.num_states(); ++q)
            if (context_values_from(a, c, q)[static_cast<std::size_t>(q)] >= 2)
                return std::make_pair(q, c);
    return std::nullopt;
}

/// All (q1, q2), q1 != q2, with a single context C of size <= cap satisfying
/// q1 ->_C q1, q1 ->_C q2 and q2 ->_C q2.  Weights are ignored.
inline BarbellSet brute_barbells(const WTA& a, int max_context_size) {
    std::vector<Tree> contexts = enum_contexts(a.alphabet, max_context_size);
    int n = a.num_states();
    std::set<std::pair<int, int>> found;
    for (const Tree& c : contexts) {
        // reach[q'][q]: some run on c from q' (hole) to q (root)
        std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) {
            std::vector<Value> vals = context_values_from(a, c, q, /*unit_weights=*/true);
            reach[static_cast<std::size_t>(q)].resize(static_cast<std::size_t>(n));
            for (int p = 0; p < n; ++p)
                reach[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = vals[static_cast<std::size_t>(p)] > 0;
        }
        for (int q1 = 0; q1 < n; ++q1)
            for (int q2 = 0; q2 < n; ++q2)
                if (q1 != q2 && reach[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q1)] &&
                    reach[static_cast<std::size_t>(q1)][static_cast<std::size_t>(q2)] &&
                    reach[static_cast<std::size_t>(q2)][static_cast<std::size_t>(q2)])
                    found.insert({q1, q2});
    }
    BarbellSet out;
    out.pairs.assign(found.begin(), found.end());
    return out;
}

}  // namespace wta
