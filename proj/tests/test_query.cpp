#include <catch2/catch_amalgamated.hpp>

#include "wta/gen.hpp"
#include "wta/oracle.hpp"
#include "wta/query.hpp"
#include "wta/textio.hpp"

using namespace wta;

static RankedAlphabet bc() {
    RankedAlphabet al;
    al.add_symbol("b", 1);
    al.add_symbol("c", 0);
    return al;
}

// accepts a marked tree iff exactly one node is marked
static WTA singleton_query() {
    return parse_automaton(
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { s0 s1 }\naccept { s1 }\n"
        "trans {\n"
        "  () -c@0-> s0\n"
        "  () -c@1-> s1\n"
        "  (s0) -b@0-> s0\n"
        "  (s1) -b@0-> s1\n"
        "  (s0) -b@1-> s1\n"
        "}");
}

// accepts every decoration
static WTA all_query() {
    return parse_automaton(
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { s }\naccept { s }\n"
        "trans { () -c@0-> s  () -c@1-> s  (s) -b@0-> s  (s) -b@1-> s }");
}

// accepts only the all-zero decoration
static WTA zero_query() {
    return parse_automaton(
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { s }\naccept { s }\n"
        "trans { () -c@0-> s  (s) -b@0-> s }");
}

TEST_CASE("marked alphabet layout") {
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 2);
    CHECK(m.marked.size() == 8);
    CHECK(m.marked.name(m.marked_id(0, 0b10)) == "b@10");
    CHECK(m.base_of(m.marked_id(1, 3)) == 1);
    CHECK(m.bits_of(m.marked_id(1, 3)) == 3);
    CHECK(m.coordinate(0b10, 1));
    CHECK_FALSE(m.coordinate(0b10, 2));
    CHECK_THROWS_AS(MarkedAlphabet::make(bc(), 0), AlphabetError);
}

TEST_CASE("mark and unmark") {
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 1);
    Tree t = parse_tree("b(b(c))", bc());

    Tree root_only = mark(m, t, {{NodeAddress{}}});
    CHECK(print_tree(root_only, m.marked) == "b@1(b@0(c@0))");

    Tree leaf_only = mark(m, t, {{NodeAddress{1, 1}}});
    CHECK(print_tree(leaf_only, m.marked) == "b@0(b@0(c@1))");

    CHECK(unmark(m, leaf_only) == t);
    CHECK_THROWS_AS(mark(m, t, {{NodeAddress{3}}}), InvalidAddress);
    CHECK_THROWS_AS(mark(m, t, std::vector<std::set<NodeAddress>>{}), InvalidAddress);
}

TEST_CASE("mark round trip on random trees") {
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 2);
    std::mt19937_64 rng(99);
    for (const Tree& t : enum_trees(bc(), 7)) {
        std::vector<std::set<NodeAddress>> sets(2);
        for (int i = 0; i < static_cast<int>(tree_size(t)); ++i)
            if (rng() % 2) sets[rng() % 2].insert(NodeAddress(static_cast<std::size_t>(i), 1));
        // only keep valid chain addresses (t is a unary chain here except leaf)
        for (auto& s : sets) {
            for (auto it = s.begin(); it != s.end();)
                it = subtree_at(t, *it) ? std::next(it) : s.erase(it);
        }
        CHECK(unmark(m, mark(m, t, sets)) == t);
    }
}

TEST_CASE("check_unambiguous") {
    CHECK(check_unambiguous(singleton_query()));
    CHECK(check_unambiguous(all_query()));
    CHECK(check_unambiguous(zero_query()));

    // two accepting runs on c@0 via distinct accepting states
    WTA two = parse_automaton(
        "alphabet { c@0:0 c@1:0 }\nstates { q p }\naccept { q p }\n"
        "trans { () -c@0-> q  () -c@0-> p }");
    CHECK_FALSE(check_unambiguous(two));

    // ambiguous state reachable into acceptance
    WTA amb = parse_automaton(
        "alphabet { b@0:1 c@0:0 c@1:0 }\nstates { q p r }\naccept { r }\n"
        "trans { () -c@0-> q  () -c@0-> p  (q) -b@0-> r  (p) -b@0-> r }");
    CHECK_FALSE(check_unambiguous(amb));
}

TEST_CASE("B_F counts singleton markings") {
    WTA a_f = singleton_query();
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 1);
    WTA bf = build_bf(a_f, m);
    CHECK(bf.num_states() == a_f.num_states() * static_cast<int>(m.marked.size()));
    CHECK(bf.all_weights_one());

    for (int n = 1; n <= 6; ++n) {
        Tree t = parse_tree("c", bc());
        for (int i = 1; i < n; ++i) t = Tree(0, {t});
        CHECK(count_accepting_runs(bf, t) == n);
        CHECK(count_accepting_runs(bf, t) == brute_query_count(a_f, m, t));
    }
}

TEST_CASE("B_F matches exhaustive marking counts on every small tree") {
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 1);
    for (const WTA& a_f : {singleton_query(), all_query(), zero_query()}) {
        WTA bf = build_bf(a_f, m);
        for (const Tree& t : enum_trees(bc(), 6))
            CHECK(count_accepting_runs(bf, t) == brute_query_count(a_f, m, t));
    }
}

TEST_CASE("B_F rejects ambiguous query automata") {
    WTA two = parse_automaton(
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { q p }\naccept { q p }\n"
        "trans { () -c@0-> q  () -c@0-> p  (q) -b@0-> q  (p) -b@0-> p }");
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 1);
    CHECK_THROWS_AS(build_bf(two, m), NotUnambiguous);
}

TEST_CASE("query growth verdicts") {
    MarkedAlphabet m = MarkedAlphabet::make(bc(), 1);
    GrowthReport singleton = query_growth(singleton_query(), m);
    CHECK(singleton.verdict == GrowthReport::Verdict::Polynomial);
    CHECK(singleton.degree == 1);

    GrowthReport all = query_growth(all_query(), m);
    CHECK(all.verdict == GrowthReport::Verdict::Exponential);

    GrowthReport zero = query_growth(zero_query(), m);
    CHECK(zero.verdict == GrowthReport::Verdict::Polynomial);
    CHECK(zero.degree == 0);

    WTA empty = parse_automaton(
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { s }\naccept { }\n"
        "trans { () -c@0-> s }");
    CHECK(query_growth(empty, m).verdict == GrowthReport::Verdict::Empty);
}
