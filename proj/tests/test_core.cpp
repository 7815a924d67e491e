#include <catch2/catch_amalgamated.hpp>

#include "wta/core.hpp"

using namespace wta;

static RankedAlphabet abc() {
    RankedAlphabet al;
    al.add_symbol("a", 2);
    al.add_symbol("b", 1);
    al.add_symbol("c", 0);
    return al;
}

TEST_CASE("alphabet basics") {
    RankedAlphabet al = abc();
    CHECK(al.size() == 3);
    CHECK(al.rank(al.find("a")) == 2);
    CHECK(al.find("missing") == -2);
    CHECK(al.has_nullary());
    CHECK(al.max_rank() == 2);
    CHECK_THROWS_AS(al.add_symbol("a", 1), AlphabetError);
    CHECK_THROWS_AS(al.add_symbol("d", -1), AlphabetError);
}

TEST_CASE("term parse and print round trip") {
    RankedAlphabet al = abc();
    for (const char* s : {"c", "b(c)", "a(b(c),c)", "a(a(c,c),b(b(c)))"}) {
        Tree t = parse_tree(s, al);
        CHECK(print_tree(t, al) == s);
    }
    Tree t = parse_tree("  a ( b ( c ) , c )  \n", al);
    CHECK(print_tree(t, al) == "a(b(c),c)");
}

TEST_CASE("parse errors carry kinds") {
    RankedAlphabet al = abc();
    CHECK_THROWS_AS(parse_tree("d", al), ParseError);
    CHECK_THROWS_AS(parse_tree("a(c)", al), ParseError);
    CHECK_THROWS_AS(parse_tree("b(c))", al), ParseError);
    CHECK_THROWS_AS(parse_tree("_HOLE", al), ParseError);  // holes only in contexts
    try {
        parse_tree("a(c,d)", al);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::UnknownSymbol);
    }
}

TEST_CASE("contexts") {
    RankedAlphabet al = abc();
    Tree c = parse_context("a(b(_HOLE),c)", al);
    CHECK(is_context(c));
    CHECK(count_holes(c) == 1);
    Tree t = apply_context(c, parse_tree("c", al));
    CHECK(print_tree(t, al) == "a(b(c),c)");
    CHECK_THROWS_AS(parse_context("a(_HOLE,_HOLE)", al), ParseError);
    CHECK_THROWS_AS(parse_context("b(c)", al), ParseError);
}

TEST_CASE("context composition and powers") {
    RankedAlphabet al = abc();
    Tree b1 = parse_context("b(_HOLE)", al);
    Tree c2 = compose_contexts(b1, parse_context("a(_HOLE,c)", al));
    CHECK(print_tree(c2, al) == "b(a(_HOLE,c))");
    CHECK(print_tree(context_power(b1, 3), al) == "b(b(b(_HOLE)))");
    CHECK(context_power(b1, 0) == hole());
}

TEST_CASE("tree measures and addressing") {
    RankedAlphabet al = abc();
    Tree t = parse_tree("a(b(c),a(c,c))", al);
    CHECK(tree_size(t) == 6);
    CHECK(tree_height(t) == 2);
    CHECK(subtree_at(t, {1, 1})->label == al.find("c"));
    CHECK(subtree_at(t, {2})->label == al.find("a"));
    CHECK(subtree_at(t, {3}) == nullptr);
    CHECK(subtree_at(t, {}) == &t);
}

TEST_CASE("tree_less is size-then-lexicographic") {
    RankedAlphabet al = abc();
    Tree small = parse_tree("b(c)", al);
    Tree big = parse_tree("a(c,c)", al);
    CHECK(tree_less(small, big));  // size 2 < size 3
    Tree x = parse_tree("a(b(c),c)", al);
    Tree y = parse_tree("b(a(c,c))", al);
    CHECK(tree_less(x, y));  // same size, a < b at the root
    CHECK_FALSE(tree_less(x, x));
}

TEST_CASE("identifiers may start with digits and carry marks") {
    RankedAlphabet al;
    al.add_symbol("0", 0);
    al.add_symbol("S", 1);
    CHECK(print_tree(parse_tree("S(S(0))", al), al) == "S(S(0))");
    RankedAlphabet marked;
    marked.add_symbol("b@1", 1);
    marked.add_symbol("c@0", 0);
    CHECK(print_tree(parse_tree("b@1(c@0)", marked), marked) == "b@1(c@0)");
}
