#pragma once

// Seeded generators: random small automata for the oracle-equivalence corpora,
// the chain/tower families used by the scaling checks, and random small MTTs.
// All draws go through one mt19937_64 so a seed pins the artifact exactly.

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/mtt.hpp"

namespace wta {

namespace detail {
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}
}  // namespace detail

/// Random automaton with <= max_states states over {a:2, b:1, c:0} and
/// weights in {1, 2}.  Not necessarily trim; may have empty language.
inline WTA gen_random_wta(std::uint64_t seed, int max_states = 4) {
    std::mt19937_64 rng(seed);
    WTA w;
    SymbolId a = w.alphabet.add_symbol("a", 2);
    SymbolId b = w.alphabet.add_symbol("b", 1);
    SymbolId c = w.alphabet.add_symbol("c", 0);
    int n = 1 + static_cast<int>(detail::draw(rng, static_cast<std::uint64_t>(max_states)));
    for (int q = 0; q < n; ++q) w.add_state("q" + std::to_string(q));

    std::set<std::tuple<std::vector<int>, SymbolId, int>> used;
    auto add = [&](std::vector<int> cs, SymbolId letter, int target) {
        if (!used.insert({cs, letter, target}).second) return;
        std::uint64_t weight = 1 + detail::draw(rng, 2);
        w.add_transition(std::move(cs), letter, target, weight);
    };

    std::uint64_t un = static_cast<std::uint64_t>(n);
    std::uint64_t n_c = 1 + detail::draw(rng, un);
    for (std::uint64_t i = 0; i < n_c; ++i)
        add({}, c, static_cast<int>(detail::draw(rng, un)));
    std::uint64_t n_b = detail::draw(rng, 2 * un + 1);
    for (std::uint64_t i = 0; i < n_b; ++i)
        add({static_cast<int>(detail::draw(rng, un))}, b,
            static_cast<int>(detail::draw(rng, un)));
    std::uint64_t n_a = detail::draw(rng, un + 1);
    for (std::uint64_t i = 0; i < n_a; ++i)
        add({static_cast<int>(detail::draw(rng, un)), static_cast<int>(detail::draw(rng, un))},
            a, static_cast<int>(detail::draw(rng, un)));

    for (int q = 0; q < n; ++q)
        if (detail::draw(rng, 2) == 0) w.set_accepting(q, 1 + detail::draw(rng, 2));
    return w;
}

/// Monotone chain over {b:1, c:0}: q_i has a self-loop and a step to q_{i+1},
/// accepting at the last state.  Polynomial of degree n-1 and trim.
inline WTA gen_chain(int n) {
    WTA w;
    SymbolId b = w.alphabet.add_symbol("b", 1);
    SymbolId c = w.alphabet.add_symbol("c", 0);
    for (int q = 0; q < n; ++q) w.add_state("q" + std::to_string(q));
    w.add_transition({}, c, 0);
    for (int q = 0; q < n; ++q) {
        w.add_transition({q}, b, q);
        if (q + 1 < n) w.add_transition({q}, b, q + 1);
    }
    w.set_accepting(n - 1);
    return w;
}

/// The tower family: one barbell q' => q_N feeding a cascade of binary
/// letters, so the ambiguity degree of q_0 doubles at every level (2^N).
inline WTA gen_tower(int levels) {
    WTA w;
    SymbolId a = w.alphabet.add_symbol("a", 2);
    SymbolId b = w.alphabet.add_symbol("b", 1);
    SymbolId c = w.alphabet.add_symbol("c", 0);
    int qp = w.add_state("q'");
    std::vector<int> q(static_cast<std::size_t>(levels) + 1);
    for (int i = levels; i >= 0; --i) q[static_cast<std::size_t>(i)] = w.add_state("q" + std::to_string(i));
    w.add_transition({}, c, qp);
    w.add_transition({qp}, b, qp);
    w.add_transition({qp}, b, q[static_cast<std::size_t>(levels)]);
    w.add_transition({q[static_cast<std::size_t>(levels)]}, b, q[static_cast<std::size_t>(levels)]);
    for (int i = levels; i >= 1; --i)
        w.add_transition({q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(i)]}, a,
                         q[static_cast<std::size_t>(i - 1)]);
    w.set_accepting(q[0]);
    return w;
}

/// Random total MTT: <= 2 states, parameter rank <= 1, each right-hand side
/// of size <= 5.  Input alphabet {z:0, s:1} (sometimes plus g:2); output
/// alphabet {a:2, b:1, c:0}.  The root state has rank 0.
inline MTT gen_random_mtt(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    MTT m;
    m.input.add_symbol("z", 0);
    m.input.add_symbol("s", 1);
    if (detail::draw(rng, 2) == 0) m.input.add_symbol("g", 2);
    SymbolId oa = m.output.add_symbol("a", 2);
    SymbolId ob = m.output.add_symbol("b", 1);
    SymbolId oc = m.output.add_symbol("c", 0);

    int nstates = 1 + static_cast<int>(detail::draw(rng, 2));
    m.add_state("q0", 0);
    if (nstates == 2) m.add_state("q1", static_cast<int>(detail::draw(rng, 2)));

    // size-bounded RHS; budget counts constructors, calls and parameters
    std::function<MTT::Rhs(int, int, int&)> gen_rhs = [&](int input_rank, int param_rank,
                                                          int& budget) -> MTT::Rhs {
        --budget;
        bool can_param = param_rank > 0;
        bool can_call = input_rank > 0 && budget >= m.state_ranks.back();
        if (budget <= 0) {
            if (can_param && detail::draw(rng, 2) == 0) return MTT::Rhs::param(0);
            return MTT::Rhs::output(oc);
        }
        std::uint64_t pick = detail::draw(rng, 6);
        if (can_param && pick == 0) return MTT::Rhs::param(0);
        if (can_call && pick <= 2) {
            int q = static_cast<int>(detail::draw(rng, static_cast<std::uint64_t>(nstates)));
            int xi = static_cast<int>(detail::draw(rng, static_cast<std::uint64_t>(input_rank)));
            std::vector<MTT::Rhs> args;
            for (int j = 0; j < m.state_ranks[static_cast<std::size_t>(q)]; ++j)
                args.push_back(gen_rhs(input_rank, param_rank, budget));
            return MTT::Rhs::call(q, xi, std::move(args));
        }
        if (pick <= 4 || budget < 2) {
            if (detail::draw(rng, 2) == 0) return MTT::Rhs::output(oc);
            return MTT::Rhs::output(ob, {gen_rhs(input_rank, param_rank, budget)});
        }
        std::vector<MTT::Rhs> cs;
        cs.push_back(gen_rhs(input_rank, param_rank, budget));
        cs.push_back(gen_rhs(input_rank, param_rank, budget));
        return MTT::Rhs::output(oa, std::move(cs));
    };

    std::function<int(const MTT::Rhs&)> rhs_size = [&](const MTT::Rhs& r) {
        int n = 1;
        for (auto& c : r.children) n += rhs_size(c);
        return n;
    };
    m.rules.assign(static_cast<std::size_t>(nstates), std::vector<MTT::Rhs>(m.input.size()));
    for (int q = 0; q < nstates; ++q)
        for (SymbolId l = 0; l < static_cast<SymbolId>(m.input.size()); ++l) {
            MTT::Rhs r;
            do {
                int budget = 1 + static_cast<int>(detail::draw(rng, 4));
                r = gen_rhs(m.input.rank(l), m.state_ranks[static_cast<std::size_t>(q)], budget);
            } while (rhs_size(r) > 5);
            m.rules[static_cast<std::size_t>(q)][static_cast<std::size_t>(l)] = std::move(r);
        }
    m.validate();
    return m;
}

}  // namespace wta
