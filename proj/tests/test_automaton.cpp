#include <catch2/catch_amalgamated.hpp>

#include "wta/automaton.hpp"
#include "wta/gen.hpp"
#include "wta/oracle.hpp"
#include "wta/textio.hpp"

using namespace wta;

static WTA weight2_loop() {
    return parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }");
}

TEST_CASE("value of the weight-2 loop is 2^n") {
    WTA a = weight2_loop();
    Tree t = parse_tree("b(b(b(b(b(c)))))", a.alphabet);
    CHECK(value(a, t).accepting == 32);
    CHECK(count_accepting_runs(a, t) == 1);
}

TEST_CASE("value multiplies the accepting weight") {
    WTA a = parse_automaton(
        "alphabet { c:0 }\nstates { q }\naccept { q:3 }\ntrans { () -c-> q : 5 }");
    CHECK(value(a, parse_tree("c", a.alphabet)).accepting == 15);
}

TEST_CASE("value sums over runs") {
    // two runs on b(c): via q and via p, both into the accepting state r
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q p r }\naccept { r }\n"
        "trans { () -c-> q  () -c-> p : 2  (q) -b-> r  (p) -b-> r : 3 }");
    Tree t = parse_tree("b(c)", a.alphabet);
    CHECK(value(a, t).accepting == 1 + 2 * 3);
    CHECK(count_accepting_runs(a, t) == 2);
}

// Sum over all runs of the minimal transition-weight product at each node.
// Ambiguous automata may realize one state sequence through several
// transitions, so instead of per-run weights we compare the value DP against
// an independent recursion over transitions.
static Value value_by_transitions(const WTA& a, const Tree& t, int target) {
    Value total = 0;
    for (auto& tr : a.transitions) {
        if (tr.letter != t.label || tr.target != target) continue;
        Value w = tr.weight;
        for (std::size_t i = 0; i < t.children.size(); ++i)
            w *= value_by_transitions(a, t.children[i], tr.children[i]);
        total += w;
    }
    return total;
}

TEST_CASE("value agrees with an independent recursion") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        WTA a = gen_random_wta(seed);
        for (const Tree& t : enum_trees(a.alphabet, 5)) {
            Value direct = 0;
            for (int q = 0; q < a.num_states(); ++q)
                direct +=
                    value_by_transitions(a, t, q) * a.accepting[static_cast<std::size_t>(q)];
            CHECK(direct == value(a, t).accepting);
        }
    }
}

TEST_CASE("enum_runs yields exactly the valid runs") {
    for (std::uint64_t seed = 31; seed <= 40; ++seed) {
        WTA a = gen_random_wta(seed);
        for (const Tree& t : enum_trees(a.alphabet, 4)) {
            std::vector<Run> runs = enum_runs(a, t);
            for (const Run& r : runs) REQUIRE(valid_run(a, t, r));
            if (a.all_weights_one()) {
                Value accepted = 0;
                for (const Run& r : runs)
                    if (a.accepting[static_cast<std::size_t>(r.states[0])] != 0) accepted += 1;
                CHECK(accepted == count_accepting_runs(a, t));
            }
        }
    }
}

TEST_CASE("context value DP matches the spec examples") {
    WTA loop = weight2_loop();
    int q = 0;
    CHECK(context_value(loop, parse_context("b(_HOLE)", loop.alphabet), q, q) == 2);
    CHECK(context_value(loop, parse_context("_HOLE", loop.alphabet), q, q) == 1);

    WTA tw = gen_tower(1);  // states q', q1, q0
    int qp = 0, q1 = 1;
    Tree b1 = parse_context("b(_HOLE)", tw.alphabet);
    Tree b2 = parse_context("b(b(_HOLE))", tw.alphabet);
    CHECK(context_value(tw, b1, qp, q1) == 1);
    CHECK(context_value(tw, b2, qp, q1) == 2);  // q'->q'->q1 and q'->q1->q1
}

TEST_CASE("trimming drops inaccessible and non-coaccessible states") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q dead sink }\naccept { q }\n"
        "trans { () -c-> q  (dead) -b-> q  (q) -b-> sink }");
    std::vector<bool> acc = accessible_states(a);
    CHECK(acc[0]);
    CHECK_FALSE(acc[1]);  // dead has no constructor
    CHECK(acc[2]);
    std::vector<bool> coacc = coaccessible_states(a);
    CHECK(coacc[0]);
    CHECK_FALSE(coacc[2]);  // sink never reaches acceptance
    WTA t = trim(a);
    CHECK(t.num_states() == 1);
    CHECK(t.states[0] == "q");
    CHECK(is_trim(t));
}

TEST_CASE("trim preserves values") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        WTA a = gen_random_wta(seed);
        WTA t = trim(a);
        for (const Tree& tr : enum_trees(a.alphabet, 5)) {
            CHECK(value(a, tr).accepting == value(t, tr).accepting);
        }
    }
}

TEST_CASE("shallow digraph uses the one-inaccessible-child rule") {
    // (p,q)-a->r with q inaccessible: only the edge q->r is added
    WTA a = parse_automaton(
        "alphabet { a:2 c:0 }\nstates { p q r }\naccept { r }\n"
        "trans { () -c-> p  (p,q) -a-> r }");
    Digraph g = shallow_digraph(a);
    auto has_edge = [&](int from, int to) {
        for (std::int64_t w : g.adj[static_cast<std::size_t>(from)])
            if (w == to) return true;
        return false;
    };
    CHECK(has_edge(1, 2));
    CHECK_FALSE(has_edge(0, 2));
}

TEST_CASE("shallow digraph adds all spine edges when children are accessible") {
    WTA a = parse_automaton(
        "alphabet { a:2 c:0 }\nstates { p q r }\naccept { r }\n"
        "trans { () -c-> p  () -c-> q  (p,q) -a-> r }");
    Digraph g = shallow_digraph(a);
    auto has_edge = [&](int from, int to) {
        for (std::int64_t w : g.adj[static_cast<std::size_t>(from)])
            if (w == to) return true;
        return false;
    };
    CHECK(has_edge(0, 2));
    CHECK(has_edge(1, 2));
}

TEST_CASE("ambiguous states via the product-like automaton") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q p r }\naccept { r }\n"
        "trans { () -c-> q  () -c-> p  (q) -b-> r  (p) -b-> r }");
    std::vector<bool> amb = ambiguous_states(a);
    CHECK_FALSE(amb[0]);
    CHECK_FALSE(amb[1]);
    CHECK(amb[2]);  // two runs on b(c) both end in r

    // deterministic automaton: nothing ambiguous
    WTA d = weight2_loop();
    std::vector<bool> amb2 = ambiguous_states(d);
    CHECK_FALSE(amb2[0]);
}

TEST_CASE("ambiguity against brute-force run counting") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        WTA a = trim(gen_random_wta(seed));
        if (a.num_states() == 0) continue;
        std::vector<bool> amb = ambiguous_states(a);
        std::vector<bool> expected(static_cast<std::size_t>(a.num_states()), false);
        for (const Tree& t : enum_trees(a.alphabet, 5)) {
            std::vector<int> count(static_cast<std::size_t>(a.num_states()), 0);
            for (const Run& r : enum_runs(a, t)) ++count[static_cast<std::size_t>(r.states[0])];
            for (int q = 0; q < a.num_states(); ++q)
                if (count[static_cast<std::size_t>(q)] >= 2)
                    expected[static_cast<std::size_t>(q)] = true;
        }
        // trees up to size 5 may miss witnesses, so only check one direction
        for (int q = 0; q < a.num_states(); ++q)
            if (expected[static_cast<std::size_t>(q)]) CHECK(amb[static_cast<std::size_t>(q)]);
    }
}

TEST_CASE("pair accessibility and minimal witness trees") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q p r }\naccept { r }\n"
        "trans { () -c-> q  () -c-> p  (q) -b-> r  (p) -b-> r }");
    std::vector<bool> pa = pair_accessible(a);
    int n = a.num_states();
    CHECK(pa[static_cast<std::size_t>(0 * n + 1)]);  // (q,p) on c
    CHECK(pa[static_cast<std::size_t>(2 * n + 2)]);  // (r,r) on b(c)
    CHECK_FALSE(pa[static_cast<std::size_t>(0 * n + 2)]);  // q and r never on one tree

    ProductWitness pw(a, 2);
    ProductSpace ps(a, 2);
    std::int64_t qp = 0 * n + 1;
    REQUIRE(pw.has(qp));
    CHECK(print_tree(pw.tree(qp), a.alphabet) == "c");
}

TEST_CASE("product automaton multiplies run counts") {
    // two accepting runs on b(b(c)): the p->q switch can happen at either b
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { p q }\naccept { q }\n"
        "trans { () -c-> p  (p) -b-> p  (p) -b-> q  (q) -b-> q }");
    WTA p = product(a, a);
    int n = a.num_states();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p.accepting[static_cast<std::size_t>(i * n + j)] =
                a.accepting[static_cast<std::size_t>(i)] && a.accepting[static_cast<std::size_t>(j)];
    Tree t = parse_tree("b(b(c))", a.alphabet);
    REQUIRE(count_accepting_runs(a, t) == 2);
    CHECK(value(p, t).accepting ==
          count_accepting_runs(a, t) * count_accepting_runs(a, t));
}

TEST_CASE("validate rejects malformed automata") {
    WTA a;
    a.alphabet.add_symbol("c", 0);
    a.add_state("q");
    a.add_transition({}, 0, 0, 1);
    a.set_accepting(0);
    CHECK_NOTHROW(a.validate());
    WTA bad = a;
    bad.transitions.push_back(Transition{{0}, 0, 0, 1});  // arity mismatch
    CHECK_THROWS_AS(bad.validate(), AutomatonError);
}
