#pragma once

// Text formats: the automaton file grammar, the MTT rule format, JSON growth
// reports ("wta-growth/1") and CSV growth curves.
//
// Automaton files (UTF-8, LF, '#' comments to end of line):
//   alphabet { a:2 b:1 c:0 }
//   states { q0 q1 }
//   accept { q0:1 }
//   trans { (q1,q1) -a-> q0 : 1  () -c-> q1 }
// Transition weights default to 1; marked letters are spelled a@01.
//
// MTT files:
//   state q0:0; state q1:1;
//   rule q0(0) = b(c);
//   rule q1(S(x1))(y1) = q1[x1](q1[x1](y1));
// Square brackets mark input-variable calls; input and output alphabets are
// inferred from the rules (in order of first appearance).

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/growth.hpp"
#include "wta/mtt.hpp"
#include "wta/oracle.hpp"

namespace wta {

namespace detail {

struct Tokenizer {
    std::string_view text;
    std::size_t pos = 0;

    void skip() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip();
        return pos >= text.size();
    }

    char peek() {
        skip();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool try_punct(std::string_view p) {
        skip();
        if (text.substr(pos, p.size()) == p) {
            pos += p.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view p) {
        if (!try_punct(p))
            throw ParseError(ParseError::Kind::Syntax, pos,
                             "expected '" + std::string(p) + "'");
    }

    std::string ident() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        if (pos == start)
            throw ParseError(ParseError::Kind::Syntax, pos, "expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    std::uint64_t number() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError(ParseError::Kind::Syntax, pos, "expected number");
        return std::stoull(std::string(text.substr(start, pos - start)));
    }
};

}  // namespace detail

inline WTA parse_automaton(std::string_view text) {
    detail::Tokenizer tk{text};
    WTA a;
    std::map<std::string, int> state_ids;

    tk.expect("alphabet");
    tk.expect("{");
    while (!tk.try_punct("}")) {
        std::string name = tk.ident();
        tk.expect(":");
        int rank = static_cast<int>(tk.number());
        a.alphabet.add_symbol(name, rank);
    }

    tk.expect("states");
    tk.expect("{");
    while (!tk.try_punct("}")) {
        std::string name = tk.ident();
        if (state_ids.count(name))
            throw ParseError(ParseError::Kind::Syntax, tk.pos, "duplicate state " + name);
        state_ids[name] = a.add_state(name);
    }

    auto state_of = [&](const std::string& name, std::size_t at) {
        auto it = state_ids.find(name);
        if (it == state_ids.end())
            throw ParseError(ParseError::Kind::UnknownSymbol, at, "unknown state '" + name + "'");
        return it->second;
    };

    tk.expect("accept");
    tk.expect("{");
    while (!tk.try_punct("}")) {
        std::size_t at = tk.pos;
        std::string name = tk.ident();
        std::uint64_t w = 1;
        if (tk.try_punct(":")) w = tk.number();
        if (w < 1)
            throw ParseError(ParseError::Kind::Syntax, at, "accepting weight must be >= 1");
        a.set_accepting(state_of(name, at), w);
    }

    tk.expect("trans");
    tk.expect("{");
    while (!tk.try_punct("}")) {
        tk.expect("(");
        std::vector<int> children;
        if (!tk.try_punct(")")) {
            while (true) {
                std::size_t at = tk.pos;
                children.push_back(state_of(tk.ident(), at));
                if (tk.try_punct(",")) continue;
                tk.expect(")");
                break;
            }
        }
        tk.expect("-");
        std::size_t lat = tk.pos;
        std::string letter = tk.ident();
        SymbolId sym = a.alphabet.find(letter);
        if (sym == -2)
            throw ParseError(ParseError::Kind::UnknownSymbol, lat, "unknown letter '" + letter + "'");
        tk.expect("->");
        std::size_t tat = tk.pos;
        int target = state_of(tk.ident(), tat);
        std::uint64_t w = 1;
        if (tk.try_punct(":")) w = tk.number();
        if (static_cast<int>(children.size()) != a.alphabet.rank(sym))
            throw ParseError(ParseError::Kind::ArityMismatch, lat,
                             "transition arity does not match rank of " + letter);
        if (w < 1) throw ParseError(ParseError::Kind::Syntax, lat, "weight must be >= 1");
        a.add_transition(std::move(children), sym, target, w);
    }
    if (!tk.eof())
        throw ParseError(ParseError::Kind::Syntax, tk.pos, "trailing input after automaton");
    a.validate();
    return a;
}

inline std::string print_automaton(const WTA& a) {
    std::string out = "alphabet {";
    for (auto& s : a.alphabet.symbols()) out += " " + s.name + ":" + std::to_string(s.rank);
    out += " }\nstates {";
    for (auto& s : a.states) out += " " + s;
    out += " }\naccept {";
    for (int q = 0; q < a.num_states(); ++q)
        if (a.accepting[static_cast<std::size_t>(q)] != 0)
            out += " " + a.states[static_cast<std::size_t>(q)] + ":" +
                   std::to_string(a.accepting[static_cast<std::size_t>(q)]);
    out += " }\ntrans {\n";
    for (auto& t : a.transitions) {
        out += "  (";
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            if (i) out += ",";
            out += a.states[static_cast<std::size_t>(t.children[i])];
        }
        out += ") -" + a.alphabet.name(t.letter) + "-> " +
               a.states[static_cast<std::size_t>(t.target)];
        if (t.weight != 1) out += " : " + std::to_string(t.weight);
        out += "\n";
    }
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// MTT format

namespace detail {

struct MttParser {
    Tokenizer tk;
    MTT m;
    std::map<std::string, int> state_ids;
    std::map<std::string, SymbolId> input_ids, output_ids;

    SymbolId input_letter(const std::string& name, int rank, std::size_t at) {
        auto it = input_ids.find(name);
        if (it == input_ids.end()) {
            SymbolId id = m.input.add_symbol(name, rank);
            input_ids[name] = id;
            return id;
        }
        if (m.input.rank(it->second) != rank)
            throw ParseError(ParseError::Kind::ArityMismatch, at,
                             "input letter " + name + " used with inconsistent rank");
        return it->second;
    }

    SymbolId output_letter(const std::string& name, int rank, std::size_t at) {
        auto it = output_ids.find(name);
        if (it == output_ids.end()) {
            SymbolId id = m.output.add_symbol(name, rank);
            output_ids[name] = id;
            return id;
        }
        if (m.output.rank(it->second) != rank)
            throw ParseError(ParseError::Kind::ArityMismatch, at,
                             "output letter " + name + " used with inconsistent rank");
        return it->second;
    }

    // ident like x3 / y2 -> 0-based index, or -1
    static int var_index(const std::string& s, char prefix) {
        if (s.size() < 2 || s[0] != prefix) return -1;
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
        int v = std::stoi(s.substr(1));
        return v >= 1 ? v - 1 : -1;
    }

    MTT::Rhs rhs_term(int input_rank, int param_rank) {
        std::size_t at = tk.pos;
        std::string name = tk.ident();
        if (tk.try_punct("[")) {
            auto it = state_ids.find(name);
            if (it == state_ids.end())
                throw ParseError(ParseError::Kind::UnknownSymbol, at,
                                 "call to unknown state '" + name + "'");
            std::size_t vat = tk.pos;
            int xi = var_index(tk.ident(), 'x');
            if (xi < 0 || xi >= input_rank)
                throw ParseError(ParseError::Kind::Syntax, vat, "bad input variable in call");
            tk.expect("]");
            std::vector<MTT::Rhs> args;
            if (tk.try_punct("(")) {
                while (true) {
                    args.push_back(rhs_term(input_rank, param_rank));
                    if (tk.try_punct(",")) continue;
                    tk.expect(")");
                    break;
                }
            }
            if (static_cast<int>(args.size()) != m.state_ranks[static_cast<std::size_t>(it->second)])
                throw ParseError(ParseError::Kind::ArityMismatch, at,
                                 "call to " + name + " with wrong number of parameters");
            return MTT::Rhs::call(it->second, xi, std::move(args));
        }
        int yi = var_index(name, 'y');
        if (yi >= 0 && yi < param_rank && !state_ids.count(name)) return MTT::Rhs::param(yi);
        std::vector<MTT::Rhs> args;
        if (tk.try_punct("(")) {
            while (true) {
                args.push_back(rhs_term(input_rank, param_rank));
                if (tk.try_punct(",")) continue;
                tk.expect(")");
                break;
            }
        }
        SymbolId letter = output_letter(name, static_cast<int>(args.size()), at);
        return MTT::Rhs::output(letter, std::move(args));
    }

    void parse(std::string_view text) {
        tk.text = text;
        struct PendingRule {
            int state;
            SymbolId letter;
            MTT::Rhs rhs;
        };
        std::vector<PendingRule> pending;
        while (!tk.eof()) {
            std::size_t at = tk.pos;
            std::string kw = tk.ident();
            if (kw == "state") {
                std::string name = tk.ident();
                tk.expect(":");
                int rank = static_cast<int>(tk.number());
                if (state_ids.count(name))
                    throw ParseError(ParseError::Kind::Syntax, at, "duplicate state " + name);
                state_ids[name] = m.add_state(name, rank);
                tk.expect(";");
            } else if (kw == "rule") {
                std::size_t sat = tk.pos;
                std::string sname = tk.ident();
                auto it = state_ids.find(sname);
                if (it == state_ids.end())
                    throw ParseError(ParseError::Kind::UnknownSymbol, sat,
                                     "rule for unknown state '" + sname + "'");
                int q = it->second;
                tk.expect("(");
                std::size_t lat = tk.pos;
                std::string lname = tk.ident();
                int rank = 0;
                if (tk.try_punct("(")) {
                    while (true) {
                        std::size_t vat = tk.pos;
                        int xi = var_index(tk.ident(), 'x');
                        if (xi != rank)
                            throw ParseError(ParseError::Kind::Syntax, vat,
                                             "pattern variables must be x1,x2,... in order");
                        ++rank;
                        if (tk.try_punct(",")) continue;
                        tk.expect(")");
                        break;
                    }
                }
                SymbolId letter = input_letter(lname, rank, lat);
                tk.expect(")");
                int prank = m.state_ranks[static_cast<std::size_t>(q)];
                if (prank > 0) {
                    tk.expect("(");
                    for (int j = 0; j < prank; ++j) {
                        std::size_t vat = tk.pos;
                        if (var_index(tk.ident(), 'y') != j)
                            throw ParseError(ParseError::Kind::Syntax, vat,
                                             "parameters must be y1,y2,... in order");
                        if (j + 1 < prank) tk.expect(",");
                    }
                    tk.expect(")");
                }
                tk.expect("=");
                MTT::Rhs rhs = rhs_term(rank, prank);
                tk.expect(";");
                pending.push_back(PendingRule{q, letter, std::move(rhs)});
            } else {
                throw ParseError(ParseError::Kind::Syntax, at, "expected 'state' or 'rule'");
            }
        }
        // Assemble the total rule table.
        m.rules.assign(static_cast<std::size_t>(m.num_states()),
                       std::vector<MTT::Rhs>(m.input.size()));
        std::vector<std::vector<bool>> seen(static_cast<std::size_t>(m.num_states()),
                                            std::vector<bool>(m.input.size(), false));
        for (auto& p : pending) {
            if (seen[static_cast<std::size_t>(p.state)][static_cast<std::size_t>(p.letter)])
                throw ParseError(ParseError::Kind::Syntax, 0,
                                 "duplicate rule for (" +
                                     m.state_names[static_cast<std::size_t>(p.state)] + ", " +
                                     m.input.name(p.letter) + ")");
            seen[static_cast<std::size_t>(p.state)][static_cast<std::size_t>(p.letter)] = true;
            m.rules[static_cast<std::size_t>(p.state)][static_cast<std::size_t>(p.letter)] =
                std::move(p.rhs);
        }
        for (int q = 0; q < m.num_states(); ++q)
            for (SymbolId a = 0; a < static_cast<SymbolId>(m.input.size()); ++a)
                if (!seen[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)])
                    throw ParseError(ParseError::Kind::Syntax, 0,
                                     "missing rule for (" +
                                         m.state_names[static_cast<std::size_t>(q)] + ", " +
                                         m.input.name(a) + ")");
        m.validate();
    }
};

}  // namespace detail

inline MTT parse_mtt(std::string_view text) {
    detail::MttParser p;
    p.parse(text);
    return p.m;
}

inline void print_rhs(std::string& out, const MTT& m, const MTT::Rhs& r) {
    switch (r.kind) {
        case MTT::Rhs::Kind::Param:
            out += "y" + std::to_string(r.var + 1);
            return;
        case MTT::Rhs::Kind::Call:
            out += m.state_names[static_cast<std::size_t>(r.state)] + "[x" +
                   std::to_string(r.var + 1) + "]";
            break;
        case MTT::Rhs::Kind::Output:
            out += m.output.name(r.letter);
            break;
    }
    if (!r.children.empty()) {
        out += "(";
        for (std::size_t i = 0; i < r.children.size(); ++i) {
            if (i) out += ",";
            print_rhs(out, m, r.children[i]);
        }
        out += ")";
    }
}

inline std::string print_mtt(const MTT& m) {
    std::string out;
    for (int q = 0; q < m.num_states(); ++q)
        out += "state " + m.state_names[static_cast<std::size_t>(q)] + ":" +
               std::to_string(m.state_ranks[static_cast<std::size_t>(q)]) + ";\n";
    for (int q = 0; q < m.num_states(); ++q)
        for (SymbolId a = 0; a < static_cast<SymbolId>(m.input.size()); ++a) {
            out += "rule " + m.state_names[static_cast<std::size_t>(q)] + "(" + m.input.name(a);
            int rank = m.input.rank(a);
            if (rank > 0) {
                out += "(";
                for (int i = 0; i < rank; ++i) {
                    if (i) out += ",";
                    out += "x" + std::to_string(i + 1);
                }
                out += ")";
            }
            out += ")";
            int prank = m.state_ranks[static_cast<std::size_t>(q)];
            if (prank > 0) {
                out += "(";
                for (int j = 0; j < prank; ++j) {
                    if (j) out += ",";
                    out += "y" + std::to_string(j + 1);
                }
                out += ")";
            }
            out += " = ";
            print_rhs(out, m, m.rhs(q, a));
            out += ";\n";
        }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string print_pattern(const PumpingPattern::Node& n, const RankedAlphabet& alphabet) {
    if (n.loop)
        return "loop[" + print_tree(n.context, alphabet) + "](" +
               print_pattern(n.children[0], alphabet) + ")";
    std::string out = alphabet.name(n.letter);
    if (!n.children.empty()) {
        out += "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out += ",";
            out += print_pattern(n.children[i], alphabet);
        }
        out += ")";
    }
    return out;
}

inline std::string value_string(const Value& v) { return v.str(); }

inline nlohmann::json report_json(const GrowthReport& rep, double elapsed_ms = -1.0) {
    nlohmann::json j;
    j["format"] = "wta-growth/1";
    switch (rep.verdict) {
        case GrowthReport::Verdict::Empty: j["verdict"] = "Empty"; break;
        case GrowthReport::Verdict::Polynomial:
            j["verdict"] = "Polynomial";
            j["degree"] = rep.degree;
            break;
        case GrowthReport::Verdict::Exponential: j["verdict"] = "Exponential"; break;
    }
    j["originalStates"] = rep.original_states;
    j["trimmedStates"] = rep.trimmed_states;
    if (rep.degrees) {
        nlohmann::json degs = nlohmann::json::object();
        for (int q = 0; q < rep.trimmed.num_states(); ++q)
            degs[rep.trimmed.states[static_cast<std::size_t>(q)]] =
                rep.degrees->deg[static_cast<std::size_t>(q)];
        j["degrees"] = degs;
        j["iterations"] = rep.degrees->iterations;
    }
    if (rep.heavy) {
        nlohmann::json h;
        switch (rep.heavy->kind) {
            case HeavyKind::ScalarHeavy: h["kind"] = "ScalarHeavy"; break;
            case HeavyKind::CenterAmbiguous: h["kind"] = "CenterAmbiguous"; break;
            case HeavyKind::SideAmbiguous: h["kind"] = "SideAmbiguous"; break;
        }
        h["state"] = rep.trimmed.states[static_cast<std::size_t>(rep.heavy->state)];
        j["heavyCycle"] = h;
    }
    if (rep.pattern) {
        j["pattern"] = print_pattern(rep.pattern->root, rep.trimmed.alphabet);
        j["patternRootState"] =
            rep.trimmed.states[static_cast<std::size_t>(rep.pattern->root_state)];
    }
    if (rep.accept_context)
        j["acceptContext"] = print_tree(*rep.accept_context, rep.trimmed.alphabet);
    if (elapsed_ms >= 0) j["timingMs"] = elapsed_ms;
    return j;
}

inline std::string curve_csv(const GrowthCurve& curve) {
    std::string out = "n,maxValue\n";
    for (std::size_t i = 0; i < curve.max_value_by_size.size(); ++i)
        out += std::to_string(i + 1) + "," + curve.max_value_by_size[i].str() + "\n";
    return out;
}

}  // namespace wta
