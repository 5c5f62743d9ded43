#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <rr/rr.hpp>

using namespace rr;

namespace {

struct Options {
    bool json = false;
    bool emit_stats = false;
    std::string filter;
    std::string word;
    std::string nfa;
    std::string grammar;
    std::string method = "auto";
    std::size_t states = 1;
    std::size_t sample = 0;
    std::uint64_t seed = 1;
    bool stats = false;
};

FilterSpec make_filter(const std::string& name)
{
    if (name.starts_with("grammar:")) return FilterSpec::user_grammar(load_grammar(name.substr(8)), name);
    if (name.starts_with("counter:")) return FilterSpec::counter(load_counter(name.substr(8)), name);
    return FilterSpec::from_name(name);
}

Method parse_method(const std::string& m)
{
    if (m == "auto") return Method::automatic;
    if (m == "bar-hillel") return Method::bar_hillel;
    if (m == "counter") return Method::counter;
    if (m == "log2") return Method::log2;
    throw InputError("unknown method '" + m + "'");
}

Json word_json(const std::optional<Word>& w)
{
    if (!w) return nullptr;
    return *w;
}

std::string word_text(const Word& w) { return w.empty() ? "ε" : join_word(w); }

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

void emit_stats(const Options& o, const std::map<std::string, std::uint64_t>& stats)
{
    if (!o.emit_stats) return;
    for (const auto& [k, v] : stats) std::cerr << k << ": " << v << "\n";
}

Json report_json(const DecisionReport& r)
{
    return {{"method", method_name(r.method)}, {"nonempty", r.nonempty}, {"stats", r.stats}, {"witness", word_json(r.witness)}};
}

int run_member(const Options& o)
{
    FilterSpec f = make_filter(o.filter);
    Word w = split_word(o.word);
    for (const auto& s : w)
        if (std::find(f.alphabet().begin(), f.alphabet().end(), s) == f.alphabet().end())
            throw InputError("symbol '" + s + "' is not in the alphabet of filter " + f.name());
    bool in = f.contains(w);
    if (o.json) print_json({{"filter", f.name()}, {"member", in}, {"word", w}});
    else std::cout << (in ? "true" : "false") << "\n";
    return in ? 0 : 1;
}

int run_decide(const Options& o, bool witness_only)
{
    FilterSpec f = make_filter(o.filter);
    DecisionReport r = nrr_decide(load_nfa(o.nfa), f, parse_method(o.method));
    emit_stats(o, r.stats);
    if (o.json) print_json(report_json(r));
    else if (!witness_only) std::cout << (r.nonempty ? "nonempty" : "empty") << "\n";
    else if (r.witness) std::cout << word_text(*r.witness) << "\n";
    else std::cout << (r.nonempty ? "nonempty" : "empty") << "\n";
    return r.nonempty ? 0 : 1;
}

int run_reduce(const Options& o, const std::string& which)
{
    if (which == "bar-hillel") {
        Cfg g = cnf_convert(load_grammar(o.grammar));
        Nfa a = load_nfa(o.nfa);
        Cfg out = bar_hillel(g, a);
        emit_stats(o, {{"nonterminals", out.nonterminals().size()}, {"states", a.num_states()}});
        std::cout << grammar_to_text(out);
        return 0;
    }
    if (which == "cs") {
        Transducer t = cs_transducer(load_grammar(o.grammar));
        emit_stats(o, {{"states", t.num_states()}});
        print_json(transducer_to_json(t));
        return 0;
    }
    if (which == "mark") {
        Nfa a = load_nfa(o.nfa);
        MarkedNfa m = mark_automaton(a);
        emit_stats(o, {{"height_bound", height_bound(a)}, {"states", m.nfa.num_states()}});
        print_json(marked_to_json(m));
        return 0;
    }
    Nfa b = reduce_d2_to_ssharpup(load_nfa(o.nfa));
    emit_stats(o, {{"states", b.num_states()}});
    print_json(nfa_to_json(b));
    return 0;
}

int run_index(const Options& o, bool seed_given)
{
    FilterSpec f = make_filter(o.filter);
    std::uint64_t seed = o.seed;
    if (!seed_given) {
        if (const char* env = std::getenv("RR_SEED")) seed = std::stoull(env);
    }
    IndexMode mode = o.sample ? IndexMode::sample(o.sample, seed) : IndexMode::all();
    std::uint32_t rho = rational_index(f, o.states, mode);
    if (o.json) {
        Json j{{"filter", f.name()}, {"states", o.states}, {"rational_index", rho}, {"mode", o.sample ? "sample" : "exhaustive"}};
        if (o.sample) {
            j["sample"] = o.sample;
            j["seed"] = seed;
        }
        print_json(j);
    } else {
        std::cout << rho << "\n";
    }
    return 0;
}

int run_check_log2(const Options& o)
{
    Cfg g = o.grammar.empty() ? *make_filter(o.filter).cnf() : cnf_convert(load_grammar(o.grammar));
    Nfa a = load_nfa(o.nfa);
    CheckerStats s = log2_check(g, a);
    std::map<std::string, std::uint64_t> stats{{"max_live_triples", s.max_live_triples},
                                               {"max_recursion_depth", s.max_recursion_depth},
                                               {"nonterminals", bar_hillel_nonterminal_count(g, a)}};
    emit_stats(o, stats);
    if (o.json) {
        print_json({{"nonempty", s.result}, {"stats", stats}});
    } else {
        std::cout << (s.result ? "nonempty" : "empty") << "\n";
        if (o.stats)
            std::cout << "max_recursion_depth " << s.max_recursion_depth << "\nmax_live_triples " << s.max_live_triples << "\n";
    }
    return s.result ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regular realizability toolkit"};
    app.require_subcommand(1);
    Options o;
    app.add_flag("--json", o.json, "Print the result as JSON");
    app.add_flag("--emit-stats", o.emit_stats, "Print size statistics to stderr");

    auto filter_help = "dyck1, dyck2, dyckN:k, sym, symsharp, ssharpup, grammar:<path>, counter:<path>";

    auto* member = app.add_subcommand("member", "Test a word against a filter");
    member->add_option("--filter", o.filter, filter_help)->required();
    member->add_option("--word", o.word, "Space-separated symbols")->required();

    auto* decide = app.add_subcommand("decide", "Decide whether an automaton meets a filter");
    auto* witness = app.add_subcommand("witness", "Print the shortest word in the intersection");
    for (auto* c : {decide, witness}) {
        c->add_option("--filter", o.filter, filter_help)->required();
        c->add_option("--nfa", o.nfa, "Automaton JSON file")->required();
        c->add_option("--method", o.method, "auto, bar-hillel, counter or log2")
            ->check(CLI::IsMember({"auto", "bar-hillel", "counter", "log2"}));
    }

    auto* reduce = app.add_subcommand("reduce", "Run a construction and print its output");
    reduce->require_subcommand(1);
    auto* r_bh = reduce->add_subcommand("bar-hillel", "Grammar for L(G) ∩ L(A)");
    r_bh->add_option("--grammar", o.grammar, "Grammar file")->required();
    r_bh->add_option("--nfa", o.nfa, "Automaton JSON file")->required();
    auto* r_cs = reduce->add_subcommand("cs", "Transducer mapping D2 onto L(G)");
    r_cs->add_option("--grammar", o.grammar, "Grammar file")->required();
    auto* r_mark = reduce->add_subcommand("mark", "Height-marked automaton over the D2 alphabet");
    r_mark->add_option("--nfa", o.nfa, "Automaton JSON file")->required();
    auto* r_up = reduce->add_subcommand("ssharpup", "Automaton for the reduction to ssharpup");
    r_up->add_option("--nfa", o.nfa, "Automaton JSON file")->required();
    for (auto* c : {r_bh, r_cs, r_mark, r_up}) c->add_flag("--emit-stats", o.emit_stats, "Print size statistics to stderr");

    auto* index = app.add_subcommand("index", "Rational index over epsilon-free automata");
    index->add_option("--filter", o.filter, filter_help)->required();
    index->add_option("--states", o.states, "Number of states")->required()->check(CLI::PositiveNumber);
    index->add_option("--sample", o.sample, "Sample this many automata instead of enumerating");
    auto* seed_opt = index->add_option("--seed", o.seed, "Sampling seed (default RR_SEED or 1)");

    auto* check = app.add_subcommand("check-log2", "Run the recursive checker");
    check->add_option("--grammar", o.grammar, "Grammar file");
    check->add_option("--filter", o.filter, filter_help);
    check->add_option("--nfa", o.nfa, "Automaton JSON file")->required();
    check->add_flag("--stats", o.stats, "Print depth and live triple counts");

    for (auto* c : {member, decide, witness, index, check}) {
        c->add_flag("--json", o.json, "Print the result as JSON");
        c->add_flag("--emit-stats", o.emit_stats, "Print size statistics to stderr");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*member) return run_member(o);
        if (*decide) return run_decide(o, false);
        if (*witness) return run_decide(o, true);
        if (*index) return run_index(o, seed_opt->count() > 0);
        if (*check) {
            if (o.grammar.empty() == o.filter.empty()) throw InputError("check-log2 needs exactly one of --grammar and --filter");
            return run_check_log2(o);
        }
        for (auto* c : {r_bh, r_cs, r_mark, r_up})
            if (*c) return run_reduce(o, c->get_name());
    } catch (const std::exception& e) {
        std::cerr << "rr: error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
