// Batch front end for the ambiguity toolkit: analyze / value / count-runs /
// trim / oracle / query / mtt / gen.  Exit codes: analyze reports its verdict
// (0 Polynomial, 2 Exponential, 3 Empty); 64 usage or parse error, 65 bad
// data, 70 internal error (e.g. a witness failing its own self-check).

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wta/automaton.hpp"
#include "wta/core.hpp"
#include "wta/gen.hpp"
#include "wta/growth.hpp"
#include "wta/mtt.hpp"
#include "wta/oracle.hpp"
#include "wta/query.hpp"
#include "wta/textio.hpp"

namespace {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

wta::Value pow_value(std::uint64_t base, std::uint64_t exp) {
    wta::Value v = 1;
    for (std::uint64_t i = 0; i < exp; ++i) v *= base;
    return v;
}

/// Reconstructs the MarkedAlphabet a query automaton is written over: every
/// letter must be spelled base@bits with a common bit width, in the order
/// MarkedAlphabet::make produces.
wta::MarkedAlphabet infer_marked(const wta::RankedAlphabet& alphabet, int max_ell) {
    int ell = -1;
    wta::RankedAlphabet base;
    for (auto& s : alphabet.symbols()) {
        std::size_t at = s.name.rfind('@');
        if (at == std::string::npos || at + 1 == s.name.size())
            throw DataError("letter '" + s.name + "' is not a marked symbol base@bits");
        int width = static_cast<int>(s.name.size() - at - 1);
        if (ell == -1) ell = width;
        if (width != ell) throw DataError("inconsistent mark width on '" + s.name + "'");
        std::string bits = s.name.substr(at + 1);
        for (char c : bits)
            if (c != '0' && c != '1') throw DataError("bad mark bits on '" + s.name + "'");
        if (bits.find('1') == std::string::npos) base.add_symbol(s.name.substr(0, at), s.rank);
    }
    if (ell < 1) throw DataError("empty alphabet");
    if (ell > max_ell) throw DataError("mark arity exceeds the --max-ell cap");
    wta::MarkedAlphabet m = wta::MarkedAlphabet::make(base, ell);
    if (!(m.marked == alphabet))
        throw DataError("marked alphabet is not in canonical base@bits order");
    return m;
}

struct AnalyzeOutput {
    std::string text;
    int exit_code = 0;
};

AnalyzeOutput run_analyze(const std::string& path, bool witness, const std::string& format) {
    wta::WTA a = wta::parse_automaton(read_file(path));
    wta::GrowthReport rep = wta::analyze(a, witness);

    std::optional<wta::ExpWitness> ew;
    if (witness && rep.verdict == wta::GrowthReport::Verdict::Exponential) {
        ew = wta::exp_witness(rep.trimmed, *rep.heavy);
        for (std::uint64_t n : {std::uint64_t(1), std::uint64_t(4)}) {
            wta::Tree t = wta::apply_context(
                ew->accept, wta::apply_context(wta::context_power(ew->cycle, n), ew->base));
            if (wta::value(rep.trimmed, t).accepting < pow_value(2, n))
                throw wta::WitnessReconstructionFailed("exponential witness failed self-check");
        }
    }
    if (witness && rep.verdict == wta::GrowthReport::Verdict::Polynomial && rep.pattern) {
        if (rep.degree == 0) {
            wta::Tree t = wta::apply_context(*rep.accept_context, wta::pump(1, *rep.pattern));
            if (wta::value(rep.trimmed, t).accepting < 1)
                throw wta::WitnessReconstructionFailed("degree-0 witness failed self-check");
        } else {
            for (std::uint64_t n : {std::uint64_t(2), std::uint64_t(3)}) {
                wta::Tree t =
                    wta::apply_context(*rep.accept_context, wta::pump(n, *rep.pattern));
                if (wta::count_accepting_runs(rep.trimmed, t) <
                    pow_value(n, static_cast<std::uint64_t>(rep.degree)))
                    throw wta::WitnessReconstructionFailed(
                        "polynomial witness failed self-check");
            }
        }
    }

    AnalyzeOutput out;
    switch (rep.verdict) {
        case wta::GrowthReport::Verdict::Polynomial: out.exit_code = 0; break;
        case wta::GrowthReport::Verdict::Exponential: out.exit_code = 2; break;
        case wta::GrowthReport::Verdict::Empty: out.exit_code = 3; break;
    }

    if (format == "json") {
        nlohmann::json j = wta::report_json(rep);
        j["input"] = path;
        if (ew) {
            j["expWitness"] = {
                {"state", rep.trimmed.states[static_cast<std::size_t>(ew->state)]},
                {"cycle", wta::print_tree(ew->cycle, rep.trimmed.alphabet)},
                {"base", wta::print_tree(ew->base, rep.trimmed.alphabet)},
                {"accept", wta::print_tree(ew->accept, rep.trimmed.alphabet)}};
        }
        out.text = j.dump(2) + "\n";
        return out;
    }

    std::string& s = out.text;
    s += "input: " + path + "\n";
    switch (rep.verdict) {
        case wta::GrowthReport::Verdict::Empty: s += "verdict: Empty\n"; break;
        case wta::GrowthReport::Verdict::Exponential: s += "verdict: Exponential\n"; break;
        case wta::GrowthReport::Verdict::Polynomial:
            s += "verdict: Polynomial\ndegree: " + std::to_string(rep.degree) + "\n";
            break;
    }
    s += "states: " + std::to_string(rep.original_states) + " (" +
         std::to_string(rep.trimmed_states) + " after trim)\n";
    if (rep.degrees) {
        s += "degrees:";
        for (int q = 0; q < rep.trimmed.num_states(); ++q)
            s += " " + rep.trimmed.states[static_cast<std::size_t>(q)] + "=" +
                 std::to_string(rep.degrees->deg[static_cast<std::size_t>(q)]);
        s += "\n";
    }
    if (ew) {
        s += "witness state: " + rep.trimmed.states[static_cast<std::size_t>(ew->state)] + "\n";
        s += "witness cycle: " + wta::print_tree(ew->cycle, rep.trimmed.alphabet) + "\n";
        s += "witness base: " + wta::print_tree(ew->base, rep.trimmed.alphabet) + "\n";
        s += "witness accept: " + wta::print_tree(ew->accept, rep.trimmed.alphabet) + "\n";
    }
    if (rep.pattern) {
        s += "witness pattern: " + wta::print_pattern(rep.pattern->root, rep.trimmed.alphabet) +
             "\n";
        s += "witness accept: " + wta::print_tree(*rep.accept_context, rep.trimmed.alphabet) +
             "\n";
    }
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"ambiguity growth analysis for N-weighted tree automata"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "decide exponential vs polynomial growth");
    std::vector<std::string> an_files;
    bool an_witness = false;
    std::string an_format = "text";
    int an_jobs = 1;
    analyze->add_option("files", an_files, "automaton files")->required();
    analyze->add_flag("--witness", an_witness, "emit and self-check a growth witness");
    analyze->add_option("--format", an_format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    analyze->add_option("--jobs", an_jobs, "parallel jobs across input files")
        ->check(CLI::PositiveNumber);

    // value / count-runs
    auto* value_cmd = app.add_subcommand("value", "weighted value of a tree");
    auto* runs_cmd = app.add_subcommand("count-runs", "number of accepting runs on a tree");
    std::string v_aut, v_tree;
    for (auto* c : {value_cmd, runs_cmd}) {
        c->add_option("automaton", v_aut, "automaton file")->required();
        c->add_option("tree", v_tree, "term file")->required();
    }

    // trim
    auto* trim_cmd = app.add_subcommand("trim", "print the trimmed automaton");
    std::string t_aut;
    trim_cmd->add_option("automaton", t_aut, "automaton file")->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "brute-force ground truth");
    oracle->require_subcommand(1);
    std::string o_aut;
    int o_tree_cap = 12, o_ctx_cap = 8;
    auto* o_growth = oracle->add_subcommand("growth", "max value by tree size (CSV)");
    auto* o_heavy = oracle->add_subcommand("heavy", "exhaustive heavy-cycle search");
    auto* o_barbells = oracle->add_subcommand("barbells", "exhaustive barbell search");
    for (auto* c : {o_growth, o_heavy, o_barbells})
        c->add_option("automaton", o_aut, "automaton file")->required();
    o_growth->add_option("--max-size", o_tree_cap, "tree size cap")->check(CLI::PositiveNumber);
    for (auto* c : {o_heavy, o_barbells})
        c->add_option("--max-size", o_ctx_cap, "context size cap")->check(CLI::PositiveNumber);

    // query
    auto* query = app.add_subcommand("query", "set-query counting via B_F");
    query->require_subcommand(1);
    std::string q_aut;
    int q_max_ell = 3;
    auto* q_bf = query->add_subcommand("bf", "print the run-counting automaton B_F");
    auto* q_growth = query->add_subcommand("growth", "analyze the growth of B_F");
    for (auto* c : {q_bf, q_growth}) {
        c->add_option("automaton", q_aut, "marked-alphabet automaton file")->required();
        c->add_option("--max-ell", q_max_ell, "mark arity cap")->check(CLI::PositiveNumber);
    }
    bool q_witness = false;
    std::string q_format = "text";
    q_growth->add_flag("--witness", q_witness, "emit a growth witness");
    q_growth->add_option("--format", q_format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    // mtt
    auto* mtt = app.add_subcommand("mtt", "macro tree transducer operations");
    mtt->require_subcommand(1);
    std::string m_mtt, m_tree;
    std::size_t m_cap = wta::kDefaultOutputCap;
    auto* m_eval = mtt->add_subcommand("eval", "evaluate on an input tree");
    auto* m_branches = mtt->add_subcommand("branches", "branches of the output tree");
    auto* m_hat = mtt->add_subcommand("hat", "summary of the branch transducer");
    auto* m_verify = mtt->add_subcommand("verify-height", "check the height lemma on an input");
    for (auto* c : {m_eval, m_branches, m_hat, m_verify})
        c->add_option("mtt", m_mtt, "transducer file")->required();
    for (auto* c : {m_eval, m_branches, m_verify})
        c->add_option("tree", m_tree, "input term file")->required();
    for (auto* c : {m_eval, m_branches, m_verify})
        c->add_option("--output-cap", m_cap, "output size cap")->check(CLI::PositiveNumber);

    // gen
    auto* gen = app.add_subcommand("gen", "seeded corpora");
    gen->require_subcommand(1);
    std::uint64_t g_seed = 0;
    int g_count = 1, g_states = 4, g_levels = 2;
    auto* g_random = gen->add_subcommand("random", "random small automata");
    g_random->add_option("--seed", g_seed, "base seed");
    g_random->add_option("--count", g_count, "number of automata")->check(CLI::PositiveNumber);
    g_random->add_option("--states", g_states, "max states")->check(CLI::PositiveNumber);
    auto* g_chain = gen->add_subcommand("chain", "monotone chain automaton");
    g_chain->add_option("--states", g_states, "number of states")->check(CLI::PositiveNumber);
    auto* g_tower = gen->add_subcommand("tower", "doubling-degree tower automaton");
    g_tower->add_option("--levels", g_levels, "number of levels")
        ->check(CLI::NonNegativeNumber);
    auto* g_mtt = gen->add_subcommand("mtt", "random small transducers");
    g_mtt->add_option("--seed", g_seed, "base seed");
    g_mtt->add_option("--count", g_count, "number of transducers")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    }

    if (*analyze) {
        std::vector<AnalyzeOutput> outs(an_files.size());
        if (an_jobs <= 1 || an_files.size() <= 1) {
            for (std::size_t i = 0; i < an_files.size(); ++i)
                outs[i] = run_analyze(an_files[i], an_witness, an_format);
        } else {
            std::vector<std::future<AnalyzeOutput>> futs;
            for (auto& f : an_files)
                futs.push_back(std::async(std::launch::async, run_analyze, f, an_witness,
                                          an_format));
            for (std::size_t i = 0; i < futs.size(); ++i) outs[i] = futs[i].get();
        }
        for (std::size_t i = 0; i < outs.size(); ++i) {
            if (i && an_format == "text") std::cout << "\n";
            std::cout << outs[i].text;
        }
        return an_files.size() == 1 ? outs[0].exit_code : 0;
    }
    if (*value_cmd || *runs_cmd) {
        wta::WTA a = wta::parse_automaton(read_file(v_aut));
        wta::Tree t = wta::parse_tree(read_file(v_tree), a.alphabet);
        wta::Value v =
            *value_cmd ? wta::value(a, t).accepting : wta::count_accepting_runs(a, t);
        std::cout << v.str() << "\n";
        return 0;
    }
    if (*trim_cmd) {
        wta::WTA a = wta::parse_automaton(read_file(t_aut));
        std::cout << wta::print_automaton(wta::trim(a));
        return 0;
    }
    if (*oracle) {
        wta::WTA a = wta::parse_automaton(read_file(o_aut));
        if (*o_growth) {
            std::cout << wta::curve_csv(wta::brute_growth(a, o_tree_cap));
        } else if (*o_heavy) {
            auto hv = wta::brute_heavy(a, o_ctx_cap);
            if (!hv) {
                std::cout << "none\n";
            } else {
                std::cout << "state: " << a.states[static_cast<std::size_t>(hv->first)]
                          << "\ncontext: " << wta::print_tree(hv->second, a.alphabet) << "\n";
            }
        } else {
            wta::BarbellSet bs = wta::brute_barbells(a, o_ctx_cap);
            for (auto& [q1, q2] : bs.pairs)
                std::cout << "(" << a.states[static_cast<std::size_t>(q1)] << ","
                          << a.states[static_cast<std::size_t>(q2)] << ")\n";
        }
        return 0;
    }
    if (*query) {
        wta::WTA a_f = wta::parse_automaton(read_file(q_aut));
        wta::MarkedAlphabet m = infer_marked(a_f.alphabet, q_max_ell);
        if (*q_bf) {
            std::cout << wta::print_automaton(wta::build_bf(a_f, m));
            return 0;
        }
        wta::GrowthReport rep = wta::query_growth(a_f, m, q_witness);
        if (q_format == "json") {
            std::cout << wta::report_json(rep).dump(2) << "\n";
        } else {
            switch (rep.verdict) {
                case wta::GrowthReport::Verdict::Empty: std::cout << "verdict: Empty\n"; break;
                case wta::GrowthReport::Verdict::Exponential:
                    std::cout << "verdict: Exponential\n";
                    break;
                case wta::GrowthReport::Verdict::Polynomial:
                    std::cout << "verdict: Polynomial\ndegree: " << rep.degree << "\n";
                    break;
            }
        }
        switch (rep.verdict) {
            case wta::GrowthReport::Verdict::Polynomial: return 0;
            case wta::GrowthReport::Verdict::Exponential: return 2;
            case wta::GrowthReport::Verdict::Empty: return 3;
        }
    }
    if (*mtt) {
        wta::MTT m = wta::parse_mtt(read_file(m_mtt));
        if (*m_hat) {
            wta::HatConstruction h = wta::hat(m);
            std::cout << "states:";
            for (auto& s : h.states)
                std::cout << " " << s.name << ":" << s.rank();
            std::cout << "\n";
            for (wta::SymbolId a = 0; a < static_cast<wta::SymbolId>(m.input.size()); ++a) {
                std::cout << "letter " << m.input.name(a) << ": "
                          << h.annotation_count(a).str() << " annotations (";
                for (std::size_t slot = 0; slot < h.states.size(); ++slot) {
                    if (slot) std::cout << " ";
                    std::cout << h.states[slot].name << "="
                              << h.options[static_cast<std::size_t>(a)][slot].size();
                }
                std::cout << ")\n";
            }
            return 0;
        }
        wta::Tree t = wta::parse_tree(read_file(m_tree), m.input);
        if (*m_eval) {
            std::cout << wta::print_tree(wta::mtt_eval(m, t, m_cap), m.output) << "\n";
            return 0;
        }
        if (*m_branches) {
            wta::BranchAlphabet ba = wta::make_branch_alphabet(m.output);
            for (auto& b : wta::branches(ba, wta::mtt_eval(m, t, m_cap)))
                std::cout << wta::print_tree(b, ba.hat) << "\n";
            return 0;
        }
        wta::HeightLemmaReport rep = wta::verify_height_lemma(m, t, m_cap);
        std::cout << "membership: " << (rep.membership ? "ok" : "FAIL") << "\n"
                  << "outputHeight: " << rep.output_height << "\n"
                  << "maxBranchSize: " << rep.max_branch_size << "\n"
                  << "maxMatches: " << (rep.max_matches ? "ok" : "FAIL") << "\n";
        return rep.ok() ? 0 : 1;
    }
    if (*gen) {
        if (*g_random) {
            for (int i = 0; i < g_count; ++i) {
                std::uint64_t seed = g_seed + static_cast<std::uint64_t>(i);
                std::cout << "# seed " << seed << "\n"
                          << wta::print_automaton(wta::gen_random_wta(seed, g_states));
            }
        } else if (*g_chain) {
            std::cout << wta::print_automaton(wta::gen_chain(g_states));
        } else if (*g_tower) {
            std::cout << wta::print_automaton(wta::gen_tower(g_levels));
        } else {
            for (int i = 0; i < g_count; ++i) {
                std::uint64_t seed = g_seed + static_cast<std::uint64_t>(i);
                std::cout << "# seed " << seed << "\n"
                          << wta::print_mtt(wta::gen_random_mtt(seed));
            }
        }
        return 0;
    }
    return 70;  // unreachable
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const wta::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 64;
    } catch (const wta::WitnessReconstructionFailed& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    } catch (const wta::HeavyCyclePresent& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}
