#include <catch2/catch_amalgamated.hpp>

#include "wta/gen.hpp"
#include "wta/oracle.hpp"
#include "wta/textio.hpp"

using namespace wta;

TEST_CASE("automaton file round trip") {
    const char* text =
        "# a comment\n"
        "alphabet { a:2 b:1 c:0 }\n"
        "states { q0 q1 }\n"
        "accept { q0:1 }\n"
        "trans {\n"
        "  (q1,q1) -a-> q0 : 1\n"
        "  () -c-> q1  # weights default to 1\n"
        "  (q1) -b-> q1 : 3\n"
        "}\n";
    WTA a = parse_automaton(text);
    CHECK(a.num_states() == 2);
    CHECK(a.transitions.size() == 3);
    CHECK(a.transitions[1].weight == 1);
    CHECK(a.transitions[2].weight == 3);
    CHECK(a.accepting[0] == 1);
    CHECK(a.accepting[1] == 0);

    WTA again = parse_automaton(print_automaton(a));
    CHECK(print_automaton(again) == print_automaton(a));
}

TEST_CASE("automaton parse errors") {
    CHECK_THROWS_AS(parse_automaton("alphabet { a:2 }"), ParseError);  // missing blocks
    CHECK_THROWS_AS(parse_automaton("alphabet { c:0 }\nstates { q q }\naccept { }\ntrans { }"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_automaton("alphabet { c:0 }\nstates { q }\naccept { r }\ntrans { }"),
        ParseError);
    CHECK_THROWS_AS(
        parse_automaton("alphabet { c:0 }\nstates { q }\naccept { }\ntrans { (q) -c-> q }"),
        ParseError);  // arity
    CHECK_THROWS_AS(
        parse_automaton("alphabet { c:0 }\nstates { q }\naccept { }\ntrans { () -d-> q }"),
        ParseError);
    CHECK_THROWS_AS(
        parse_automaton(
            "alphabet { c:0 }\nstates { q }\naccept { }\ntrans { () -c-> q : 0 }"),
        ParseError);  // weights are >= 1
    CHECK_THROWS_AS(
        parse_automaton("alphabet { c:0 }\nstates { q }\naccept { }\ntrans { } extra"),
        ParseError);
}

TEST_CASE("round trip over the random corpus") {
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
        WTA a = gen_random_wta(seed);
        WTA b = parse_automaton(print_automaton(a));
        CHECK(print_automaton(b) == print_automaton(a));
        for (const Tree& t : enum_trees(a.alphabet, 4))
            CHECK(value(a, t).accepting == value(b, t).accepting);
    }
}

TEST_CASE("marked letters survive the file format") {
    const char* text =
        "alphabet { b@0:1 b@1:1 c@0:0 c@1:0 }\nstates { s }\naccept { s }\n"
        "trans { () -c@0-> s  (s) -b@1-> s }";
    WTA a = parse_automaton(text);
    CHECK(a.alphabet.name(1) == "b@1");
    CHECK(parse_automaton(print_automaton(a)).alphabet == a.alphabet);
}

TEST_CASE("json growth report") {
    GrowthReport rep = analyze(gen_tower(1));
    nlohmann::json j = report_json(rep);
    CHECK(j["format"] == "wta-growth/1");
    CHECK(j["verdict"] == "Polynomial");
    CHECK(j["degree"] == 2);
    CHECK(j["degrees"]["q0"] == 2);
    CHECK(j["degrees"]["q'"] == 0);
    CHECK(j.contains("pattern"));
    CHECK(j["iterations"].get<int>() <= 3);

    GrowthReport empty = analyze(parse_automaton(
        "alphabet { c:0 }\nstates { q }\naccept { }\ntrans { () -c-> q }"));
    nlohmann::json je = report_json(empty);
    CHECK(je["verdict"] == "Empty");
    CHECK_FALSE(je.contains("degree"));

    GrowthReport exp = analyze(parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }"));
    nlohmann::json jx = report_json(exp);
    CHECK(jx["verdict"] == "Exponential");
    CHECK(jx["heavyCycle"]["kind"] == "ScalarHeavy");
}

TEST_CASE("csv growth curves") {
    WTA a = parse_automaton(
        "alphabet { b:1 c:0 }\nstates { q }\naccept { q }\n"
        "trans { () -c-> q  (q) -b-> q : 2 }");
    std::string csv = curve_csv(brute_growth(a, 4));
    CHECK(csv == "n,maxValue\n1,1\n2,2\n3,4\n4,8\n");
}

TEST_CASE("pattern rendering") {
    GrowthReport rep = analyze(gen_tower(1));
    REQUIRE(rep.pattern.has_value());
    std::string printed = print_pattern(rep.pattern->root, rep.trimmed.alphabet);
    CHECK(printed.find("loop[") != std::string::npos);
    CHECK(printed.find("_HOLE") != std::string::npos);
}

TEST_CASE("big values serialize as decimal strings") {
    Value v = 1;
    for (int i = 0; i < 100; ++i) v *= 2;
    CHECK(value_string(v) == "1267650600228229401496703205376");
}
