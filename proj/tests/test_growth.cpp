#include <catch2/catch_amalgamated.hpp>

#include "wta/gen.hpp"
#include "wta/growth.hpp"
#include "wta/oracle.hpp"
#include "wta/textio.hpp"

using namespace wta;

static Value ipow(std::uint64_t b, std::uint64_t e) {
    Value v = 1;
    for (std::uint64_t i = 0; i < e; ++i) v *= b;
    return v;
}

TEST_CASE("scalar-heavy detection") {
    WTA loop = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }"));
    auto ev = detect_scalar_heavy(loop);
    REQUIRE(ev.has_value());
    CHECK(ev->kind == HeavyKind::ScalarHeavy);

    // weight-2 transition not on a cycle: no heavy cycle at all
    WTA off = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q : 2  (q) -b-> q }"));
    CHECK_FALSE(detect_scalar_heavy(off).has_value());
    CHECK_FALSE(has_heavy_cycle(off).has_value());

    for (int n : {1, 2, 3}) CHECK_FALSE(detect_scalar_heavy(trim(gen_tower(n))).has_value());
}

TEST_CASE("center-ambiguous detection") {
    WTA a = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q r }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> r  (r) -b-> q  (q) -b-> q }"));
    auto ev = detect_center_ambiguous(a);
    REQUIRE(ev.has_value());
    CHECK(ev->kind == HeavyKind::CenterAmbiguous);
    // ground truth: two runs on b(b(_HOLE)) from q to q
    CHECK(context_value(a, parse_context("b(b(_HOLE))", a.alphabet), 0, 0) >= 2);

    CHECK_FALSE(detect_center_ambiguous(trim(gen_tower(2))).has_value());
    // deterministic automaton
    WTA det = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\ntrans { () -c-> q  (q) -b-> q }"));
    CHECK_FALSE(detect_center_ambiguous(det).has_value());
}

TEST_CASE("side-ambiguous detection") {
    WTA a = trim(parse_automaton(
        "alphabet { a:2 b:1 c:0 }\nstates { q p r }\naccept { r }\n"
        "trans { () -c-> q  () -c-> p  (q) -b-> r  (p) -b-> r  (r,r) -a-> r }"));
    auto ev = detect_side_ambiguous(a);
    REQUIRE(ev.has_value());
    CHECK(ev->kind == HeavyKind::SideAmbiguous);
    // ground truth: the off-spine child of a(_HOLE, b(c)) is ambiguous
    CHECK(context_value(a, parse_context("a(_HOLE,b(c))", a.alphabet), 2, 2) >= 2);

    for (int n : {1, 2, 3}) CHECK_FALSE(detect_side_ambiguous(trim(gen_tower(n))).has_value());
}

TEST_CASE("heavy-cycle detectors on the tower family") {
    for (int n : {1, 2, 3, 4}) CHECK_FALSE(has_heavy_cycle(trim(gen_tower(n))).has_value());
}

TEST_CASE("detectors require a trim automaton") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q dead }\naccept { q }\n"
        "trans { () -c-> q  (dead) -b-> q }");
    CHECK_THROWS_AS(has_heavy_cycle(a), NotTrimmed);
    CHECK_THROWS_AS(barbell_pairs(a), NotTrimmed);
}

TEST_CASE("barbell pairs on the spec examples") {
    WTA t1 = trim(gen_tower(1));  // states q', q1, q0
    BarbellSet bs = barbell_pairs(t1);
    REQUIRE(bs.pairs.size() == 1);
    CHECK(t1.states[static_cast<std::size_t>(bs.pairs[0].first)] == "q'");
    CHECK(t1.states[static_cast<std::size_t>(bs.pairs[0].second)] == "q1");

    WTA pq = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { p q }\naccept { q }\n"
        "trans { () -c-> p  (p) -b-> p  (p) -b-> q  (q) -b-> q }"));
    BarbellSet bs2 = barbell_pairs(pq);
    REQUIRE(bs2.pairs.size() == 1);
    CHECK(pq.states[static_cast<std::size_t>(bs2.pairs[0].first)] == "p");
    CHECK(pq.states[static_cast<std::size_t>(bs2.pairs[0].second)] == "q");

    // deterministic automaton: no barbells
    WTA det = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\ntrans { () -c-> q  (q) -b-> q }"));
    CHECK(barbell_pairs(det).pairs.empty());
}

TEST_CASE("degrees on the tower family") {
    WTA t1 = trim(gen_tower(1));
    DegreeMap d1 = degrees(t1, barbell_pairs(t1));
    CHECK(d1.deg == std::vector<int>{0, 1, 2});  // q', q1, q0
    CHECK(d1.max_degree() == 2);
    CHECK(d1.iterations <= t1.num_states());

    WTA t2 = trim(gen_tower(2));
    DegreeMap d2 = degrees(t2, barbell_pairs(t2));
    CHECK(d2.deg == std::vector<int>{0, 1, 2, 4});  // q', q2, q1, q0
    CHECK(d2.max_degree() == 4);

    // barbell-free: all degrees zero
    WTA det = trim(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\ntrans { () -c-> q  (q) -b-> q }"));
    DegreeMap d0 = degrees(det, barbell_pairs(det));
    CHECK(d0.deg == std::vector<int>{0});
}

TEST_CASE("degree map satisfies the fixed-point inequalities") {
    for (std::uint64_t seed = 300; seed < 360; ++seed) {
        WTA a = trim(gen_random_wta(seed));
        if (a.num_states() == 0) continue;
        if (has_heavy_cycle(a)) continue;
        BarbellSet bs = barbell_pairs(a);
        DegreeMap dm = degrees(a, bs);
        CHECK(dm.iterations <= a.num_states());
        for (auto& [q1, q2] : bs.pairs)
            CHECK(dm.deg[static_cast<std::size_t>(q1)] + 1 <=
                  dm.deg[static_cast<std::size_t>(q2)]);
        for (auto& t : a.transitions) {
            int sum = 0;
            for (int c : t.children) sum += dm.deg[static_cast<std::size_t>(c)];
            CHECK(dm.deg[static_cast<std::size_t>(t.target)] >= sum);
        }
    }
}

TEST_CASE("analyze verdicts") {
    CHECK(analyze(parse_automaton("alphabet { b:1 c:0 }\nstates { q }\naccept { }\n"
                                  "trans { () -c-> q }"))
              .verdict == GrowthReport::Verdict::Empty);
    GrowthReport exp = analyze(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }"));
    CHECK(exp.verdict == GrowthReport::Verdict::Exponential);
    for (int n : {1, 2, 3, 4}) {
        GrowthReport rep = analyze(gen_tower(n), /*with_witness=*/false);
        CHECK(rep.verdict == GrowthReport::Verdict::Polynomial);
        CHECK(rep.degree == (1 << n));
    }
}

TEST_CASE("exponential witnesses pass the value check") {
    for (const char* text :
         {// scalar heavy
          "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
          "trans { () -c-> q  (q) -b-> q : 2 }",
          // center ambiguous
          "alphabet { b:1 c:0 }\nstates { q r }\naccept { q }\n"
          "trans { () -c-> q  (q) -b-> r  (r) -b-> q  (q) -b-> q }",
          // side ambiguous (T1.2)
          "alphabet { a:2 b:1 c:0 }\nstates { q p r }\naccept { r }\n"
          "trans { () -c-> q  () -c-> p  (q) -b-> r  (p) -b-> r  (r,r) -a-> r }"}) {
        WTA a = trim(parse_automaton(text));
        auto ev = has_heavy_cycle(a);
        REQUIRE(ev.has_value());
        ExpWitness w = exp_witness(a, *ev);
        CHECK(context_value(a, w.cycle, w.state, w.state) >= 2);
        for (std::uint64_t n : {1, 4, 8}) {
            Tree t = apply_context(w.accept, apply_context(context_power(w.cycle, n), w.base));
            CHECK(value(a, t).accepting >= ipow(2, n));
        }
    }
}

TEST_CASE("polynomial witnesses reach the degree lower bound") {
    for (int lv : {1, 2}) {
        WTA a = trim(gen_tower(lv));
        BarbellSet bs = barbell_pairs(a);
        DegreeMap dm = degrees(a, bs);
        PolyWitness w = poly_witness(a, dm, bs);
        int k = w.pattern.degree();
        CHECK(k == dm.max_degree());
        for (std::uint64_t n : {2, 3, 5}) {
            Tree t = apply_context(w.accept, pump(n, w.pattern));
            CHECK(count_accepting_runs(a, t) >= ipow(n, static_cast<std::uint64_t>(k)));
        }
    }
}

TEST_CASE("pump realizes Def 2.12") {
    WTA a = trim(gen_tower(1));
    BarbellSet bs = barbell_pairs(a);
    DegreeMap dm = degrees(a, bs);
    PolyWitness w = poly_witness(a, dm, bs);
    // degree 2 means two loop nodes; pump(3, .) repeats each context 3 times
    Tree t3 = pump(3, w.pattern);
    Tree t1 = pump(1, w.pattern);
    CHECK(tree_size(t3) > tree_size(t1));
    CHECK(w.pattern.degree() == 2);
}

TEST_CASE("critical nodes on the tower") {
    WTA a = trim(gen_tower(1));
    BarbellSet bs = barbell_pairs(a);
    DegreeMap dm = degrees(a, bs);
    Tree t = parse_tree("a(b(c),b(c))", a.alphabet);
    std::vector<Run> runs = enum_runs(a, t);
    int checked = 0;
    for (const Run& r : runs) {
        if (a.accepting[static_cast<std::size_t>(r.states[0])] == 0) continue;
        std::set<NodeAddress> crit = critical_nodes(a, dm, t, r);
        // the unique accepting run switches q' -> q1 at both b nodes
        CHECK(crit == std::set<NodeAddress>{{1}, {2}});
        CHECK(crit.size() <= static_cast<std::size_t>(dm.deg[static_cast<std::size_t>(r.states[0])]));
        ++checked;
    }
    CHECK(checked == 1);
}

TEST_CASE("critical node count is bounded by the root degree") {
    WTA a = trim(gen_tower(2));
    BarbellSet bs = barbell_pairs(a);
    DegreeMap dm = degrees(a, bs);
    for (const Tree& t : enum_trees(a.alphabet, 8))
        for (const Run& r : enum_runs(a, t))
            CHECK(critical_nodes(a, dm, t, r).size() <=
                  static_cast<std::size_t>(dm.deg[static_cast<std::size_t>(r.states[0])]));
}

TEST_CASE("critical_nodes rejects invalid runs") {
    WTA a = trim(gen_tower(1));
    DegreeMap dm = degrees(a, barbell_pairs(a));
    Tree t = parse_tree("a(b(c),b(c))", a.alphabet);
    Run bogus{std::vector<int>(tree_size(t), 0)};
    CHECK_THROWS_AS(critical_nodes(a, dm, t, bogus), InvalidRun);
}
