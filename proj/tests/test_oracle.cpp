#include <catch2/catch_amalgamated.hpp>

#include "wta/gen.hpp"
#include "wta/oracle.hpp"
#include "wta/textio.hpp"

using namespace wta;

static RankedAlphabet abc() {
    RankedAlphabet al;
    al.add_symbol("a", 2);
    al.add_symbol("b", 1);
    al.add_symbol("c", 0);
    return al;
}

static RankedAlphabet bc() {
    RankedAlphabet al;
    al.add_symbol("b", 1);
    al.add_symbol("c", 0);
    return al;
}

TEST_CASE("enum_trees basics") {
    RankedAlphabet just_c;
    just_c.add_symbol("c", 0);
    std::vector<Tree> ts = enum_trees(just_c, 3);
    REQUIRE(ts.size() == 1);
    CHECK(print_tree(ts[0], just_c) == "c");

    std::vector<Tree> chain = enum_trees(bc(), 3);
    REQUIRE(chain.size() == 3);
    CHECK(print_tree(chain[0], bc()) == "c");
    CHECK(print_tree(chain[1], bc()) == "b(c)");
    CHECK(print_tree(chain[2], bc()) == "b(b(c))");
}

TEST_CASE("enum_trees counts for the binary alphabet") {
    // sizes 1..4 over {a:2,b:1,c:0}: 1, 1, 2, 4 trees (8 total)
    RankedAlphabet al = abc();
    std::vector<Tree> ts = enum_trees(al, 4);
    CHECK(ts.size() == 8);
    std::vector<int> by_size(5, 0);
    for (auto& t : ts) ++by_size[tree_size(t)];
    CHECK(by_size == std::vector<int>{0, 1, 1, 2, 4});

    // independent recurrence: T(n) = [n==1] + T(n-1) + sum_{i+j=n-1} T(i)T(j)
    std::vector<long> T(13, 0);
    T[1] = 1;
    for (int n = 2; n <= 12; ++n) {
        T[n] = T[n - 1];
        for (int i = 1; i <= n - 2; ++i) T[n] += T[i] * T[n - 1 - i];
    }
    std::vector<Tree> big = enum_trees(al, 7);
    std::vector<long> counts(8, 0);
    for (auto& t : big) ++counts[tree_size(t)];
    for (int n = 1; n <= 7; ++n) CHECK(counts[n] == T[n]);
}

TEST_CASE("enum_trees is canonical and duplicate-free") {
    std::vector<Tree> ts = enum_trees(abc(), 6);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(tree_less(ts[i - 1], ts[i]));
    }
}

TEST_CASE("enum_contexts basics") {
    std::vector<Tree> cs = enum_contexts(bc(), 2);
    REQUIRE(cs.size() == 2);
    CHECK(print_tree(cs[0], bc()) == "_HOLE");
    CHECK(print_tree(cs[1], bc()) == "b(_HOLE)");

    CHECK(enum_contexts(bc(), 1).size() == 1);

    // size <= 3 over {a:2,b:1,c:0}, the hole counting as a node:
    // _HOLE; b(_HOLE); b(b(_HOLE)), a(_HOLE,c), a(c,_HOLE)
    std::vector<Tree> cs3 = enum_contexts(abc(), 3);
    CHECK(cs3.size() == 5);
    std::vector<std::string> printed;
    for (auto& c : cs3) printed.push_back(print_tree(c, abc()));
    CHECK(printed == std::vector<std::string>{"_HOLE", "b(_HOLE)", "a(_HOLE,c)", "a(c,_HOLE)",
                                              "b(b(_HOLE))"});
    for (auto& c : cs3) CHECK(count_holes(c) == 1);
}

TEST_CASE("enumeration requires a nullary symbol") {
    RankedAlphabet bad;
    bad.add_symbol("b", 1);
    CHECK_THROWS_AS(enum_trees(bad, 3), NoNullarySymbol);
}

TEST_CASE("brute growth curve of the weight-2 loop") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }");
    GrowthCurve curve = brute_growth(a, 6);
    REQUIRE(curve.max_value_by_size.size() == 6);
    for (int n = 1; n <= 6; ++n) {
        Value expect = 1;
        for (int i = 1; i < n; ++i) expect *= 2;
        CHECK(curve.max_value_by_size[static_cast<std::size_t>(n - 1)] == expect);
    }
}

TEST_CASE("brute growth of an unambiguous total automaton is all ones") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\ntrans { () -c-> q  (q) -b-> q }");
    for (const Value& v : brute_growth(a, 8).max_value_by_size) CHECK(v == 1);
}

TEST_CASE("brute heavy search") {
    WTA loop = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }");
    auto hv = brute_heavy(loop, 6);
    REQUIRE(hv.has_value());
    CHECK(hv->first == 0);
    CHECK(print_tree(hv->second, loop.alphabet) == "b(_HOLE)");

    CHECK_FALSE(brute_heavy(gen_tower(1), 6).has_value());
}

TEST_CASE("brute barbell search on the tower") {
    WTA t1 = gen_tower(1);  // states q' q1 q0
    BarbellSet bs = brute_barbells(t1, 6);
    REQUIRE(bs.pairs.size() == 1);
    CHECK(bs.pairs[0] == std::make_pair(0, 1));
    CHECK(bs.contains(0, 1));
    CHECK_FALSE(bs.contains(1, 0));
}

TEST_CASE("brute growth equals max accepting value over enum_trees") {
    for (std::uint64_t seed = 400; seed < 410; ++seed) {
        WTA a = gen_random_wta(seed);
        GrowthCurve curve = brute_growth(a, 5);
        Value best = 0;
        for (const Tree& t : enum_trees(a.alphabet, 5)) {
            Value v = value(a, t).accepting;
            if (v > best) best = v;
        }
        CHECK(curve.max_value_by_size.back() == best);
    }
}

TEST_CASE("generators are deterministic") {
    for (std::uint64_t seed : {0ull, 7ull, 12345ull}) {
        WTA a1 = gen_random_wta(seed);
        WTA a2 = gen_random_wta(seed);
        CHECK(print_automaton(a1) == print_automaton(a2));
        MTT m1 = gen_random_mtt(seed);
        MTT m2 = gen_random_mtt(seed);
        CHECK(print_mtt(m1) == print_mtt(m2));
    }
}
