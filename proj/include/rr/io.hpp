#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfg.hpp"
#include "common.hpp"
#include "counter.hpp"
#include "nfa.hpp"
#include "reductions.hpp"
#include "transducer.hpp"

namespace rr {

using Json = nlohmann::json;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace detail {

class JsonReader {
public:
    JsonReader(const std::string& text, std::string source) : source_(std::move(source))
    {
        try {
            root_ = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw InputError(source_ + ": JSON syntax error at byte " + std::to_string(e.byte) + ": " + message(e.what()));
        }
        if (!root_.is_object()) fail("", "expected a JSON object");
    }

    const Json& root() const { return root_; }

    [[noreturn]] void fail(const std::string& where, const std::string& what) const
    {
        throw InputError(source_ + ": at " + (where.empty() ? std::string("/") : where) + ": " + what);
    }

    const Json& field(const Json& obj, const std::string& where, const std::string& name) const
    {
        if (!obj.is_object()) fail(where, "expected an object");
        auto it = obj.find(name);
        if (it == obj.end()) fail(where, "missing field '" + name + "'");
        return *it;
    }

    std::string string(const Json& obj, const std::string& where, const std::string& name) const
    {
        const Json& v = field(obj, where, name);
        if (!v.is_string()) fail(where + "/" + name, "expected a string");
        return v.get<std::string>();
    }

    std::vector<std::string> strings(const Json& obj, const std::string& where, const std::string& name) const
    {
        const Json& v = field(obj, where, name);
        if (!v.is_array()) fail(where + "/" + name, "expected an array of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) fail(where + "/" + name + "/" + std::to_string(i), "expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

    const Json& array(const Json& obj, const std::string& where, const std::string& name) const
    {
        const Json& v = field(obj, where, name);
        if (!v.is_array()) fail(where + "/" + name, "expected an array");
        return v;
    }

    /// Runs f and rethrows its input errors located at where.
    template <class F>
    auto at(const std::string& where, F&& f) const
    {
        try {
            return f();
        } catch (const InputError& e) {
            fail(where, e.what());
        }
    }

private:
    static std::string message(const std::string& what)
    {
        auto pos = what.find("] ");
        return pos == std::string::npos ? what : what.substr(pos + 2);
    }

    std::string source_;
    Json root_;
};

} // namespace detail

inline Nfa nfa_from_json_text(const std::string& text, const std::string& source = "<nfa>")
{
    detail::JsonReader r(text, source);
    const Json& j = r.root();
    auto alphabet = r.strings(j, "", "alphabet");
    Nfa a = r.at("/alphabet", [&] { return Nfa(alphabet); });
    auto states = r.strings(j, "", "states");
    for (std::size_t i = 0; i < states.size(); ++i)
        r.at("/states/" + std::to_string(i), [&] { return a.add_state(states[i]); });
    auto initial = r.string(j, "", "initial");
    r.at("/initial", [&] { a.set_initial(a.state(initial)); return 0; });
    auto accepting = r.strings(j, "", "accepting");
    for (std::size_t i = 0; i < accepting.size(); ++i)
        r.at("/accepting/" + std::to_string(i), [&] { a.set_accepting(a.state(accepting[i])); return 0; });
    const Json& ts = r.array(j, "", "transitions");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string where = "/transitions/" + std::to_string(i);
        auto from = r.string(ts[i], where, "from");
        auto label = r.string(ts[i], where, "label");
        auto to = r.string(ts[i], where, "to");
        r.at(where, [&] { a.add_transition(a.state(from), label, a.state(to)); return 0; });
    }
    return a;
}

inline Nfa load_nfa(const std::string& path) { return nfa_from_json_text(read_file(path), path); }

inline Json nfa_to_json(const Nfa& a)
{
    Json j;
    j["alphabet"] = a.alphabet();
    std::vector<std::string> states, accepting;
    for (std::size_t q = 0; q < a.num_states(); ++q) {
        states.push_back(a.state_name(q));
        if (a.is_accepting(q)) accepting.push_back(a.state_name(q));
    }
    j["states"] = states;
    j["initial"] = a.num_states() ? a.state_name(a.initial()) : std::string();
    j["accepting"] = accepting;
    j["transitions"] = Json::array();
    for (const auto& e : a.edges())
        j["transitions"].push_back({{"from", a.state_name(e.from)},
                                    {"label", e.label == Nfa::epsilon ? std::string() : a.alphabet()[static_cast<std::size_t>(e.label)]},
                                    {"to", a.state_name(e.to)}});
    return j;
}

inline Json marked_to_json(const MarkedNfa& m)
{
    Json j = nfa_to_json(m.nfa);
    Json heights = Json::object();
    for (std::size_t q = 0; q < m.nfa.num_states(); ++q)
        if (q != m.reject_state) heights[m.nfa.state_name(q)] = m.height[q];
    j["heights"] = heights;
    j["reject"] = m.nfa.state_name(m.reject_state);
    return j;
}

inline Transducer transducer_from_json_text(const std::string& text, const std::string& source = "<transducer>")
{
    detail::JsonReader r(text, source);
    const Json& j = r.root();
    auto in = r.strings(j, "", "input_alphabet");
    auto out = r.strings(j, "", "output_alphabet");
    Transducer t = r.at("/", [&] { return Transducer(in, out); });
    auto states = r.strings(j, "", "states");
    for (std::size_t i = 0; i < states.size(); ++i)
        r.at("/states/" + std::to_string(i), [&] { return t.add_state(states[i]); });
    auto initial = r.string(j, "", "initial");
    r.at("/initial", [&] { t.set_initial(t.state(initial)); return 0; });
    auto accepting = r.strings(j, "", "accepting");
    for (std::size_t i = 0; i < accepting.size(); ++i)
        r.at("/accepting/" + std::to_string(i), [&] { t.set_accepting(t.state(accepting[i])); return 0; });
    const Json& ts = r.array(j, "", "transitions");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string where = "/transitions/" + std::to_string(i);
        auto from = r.string(ts[i], where, "from");
        auto read = r.string(ts[i], where, "read");
        auto write = r.string(ts[i], where, "write");
        auto to = r.string(ts[i], where, "to");
        r.at(where, [&] { t.add_transition(t.state(from), read, write, t.state(to)); return 0; });
    }
    return t;
}

inline Transducer load_transducer(const std::string& path) { return transducer_from_json_text(read_file(path), path); }

inline Json transducer_to_json(const Transducer& t)
{
    Json j;
    j["input_alphabet"] = t.input_alphabet();
    j["output_alphabet"] = t.output_alphabet();
    std::vector<std::string> states, accepting;
    for (std::size_t q = 0; q < t.num_states(); ++q) {
        states.push_back(t.state_name(q));
        if (t.is_accepting(q)) accepting.push_back(t.state_name(q));
    }
    j["states"] = states;
    j["initial"] = t.num_states() ? t.state_name(t.initial()) : std::string();
    j["accepting"] = accepting;
    j["transitions"] = Json::array();
    for (const auto& e : t.edges())
        j["transitions"].push_back(
            {{"from", t.state_name(e.from)},
             {"read", e.read == Transducer::epsilon ? std::string() : t.input_alphabet()[static_cast<std::size_t>(e.read)]},
             {"write", e.write == Transducer::epsilon ? std::string() : t.output_alphabet()[static_cast<std::size_t>(e.write)]},
             {"to", t.state_name(e.to)}});
    return j;
}

inline std::string guard_name(Guard g)
{
    switch (g) {
    case Guard::any: return "any";
    case Guard::zero: return "zero";
    case Guard::positive: return "positive";
    }
    return "any";
}

inline CounterAutomaton counter_from_json_text(const std::string& text, const std::string& source = "<counter>")
{
    detail::JsonReader r(text, source);
    const Json& j = r.root();
    auto alphabet = r.strings(j, "", "alphabet");
    AcceptMode mode = AcceptMode::final_state;
    if (j.contains("accept_mode")) {
        auto m = r.string(j, "", "accept_mode");
        if (m == "final_state_and_zero") mode = AcceptMode::final_state_and_zero;
        else if (m != "final_state") r.fail("/accept_mode", "expected final_state or final_state_and_zero");
    }
    CounterAutomaton c = r.at("/alphabet", [&] { return CounterAutomaton(alphabet, mode); });
    auto states = r.strings(j, "", "states");
    for (std::size_t i = 0; i < states.size(); ++i)
        r.at("/states/" + std::to_string(i), [&] { return c.add_state(states[i]); });
    auto initial = r.string(j, "", "initial");
    r.at("/initial", [&] { c.set_initial(c.state(initial)); return 0; });
    auto accepting = r.strings(j, "", "accepting");
    for (std::size_t i = 0; i < accepting.size(); ++i)
        r.at("/accepting/" + std::to_string(i), [&] { c.set_accepting(c.state(accepting[i])); return 0; });
    const Json& ts = r.array(j, "", "transitions");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string where = "/transitions/" + std::to_string(i);
        auto from = r.string(ts[i], where, "from");
        auto label = r.string(ts[i], where, "label");
        auto to = r.string(ts[i], where, "to");
        Guard guard = Guard::any;
        if (ts[i].contains("guard")) {
            auto g = r.string(ts[i], where, "guard");
            if (g == "zero") guard = Guard::zero;
            else if (g == "positive") guard = Guard::positive;
            else if (g != "any") r.fail(where + "/guard", "expected any, zero or positive");
        }
        int delta = 0;
        if (ts[i].contains("delta")) {
            const Json& d = ts[i]["delta"];
            if (!d.is_number_integer()) r.fail(where + "/delta", "expected an integer");
            delta = d.get<int>();
        }
        r.at(where, [&] { c.add_transition(c.state(from), label, guard, delta, c.state(to)); return 0; });
    }
    return c;
}

inline CounterAutomaton load_counter(const std::string& path) { return counter_from_json_text(read_file(path), path); }

inline Json counter_to_json(const CounterAutomaton& c)
{
    Json j;
    j["alphabet"] = c.alphabet();
    j["accept_mode"] = c.accept_mode() == AcceptMode::final_state ? "final_state" : "final_state_and_zero";
    std::vector<std::string> states, accepting;
    for (std::size_t q = 0; q < c.num_states(); ++q) {
        states.push_back(c.state_name(q));
        if (c.is_accepting(q)) accepting.push_back(c.state_name(q));
    }
    j["states"] = states;
    j["initial"] = c.num_states() ? c.state_name(c.initial()) : std::string();
    j["accepting"] = accepting;
    j["transitions"] = Json::array();
    for (const auto& e : c.edges())
        j["transitions"].push_back(
            {{"from", c.state_name(e.from)},
             {"label", e.read == CounterAutomaton::epsilon ? std::string() : c.alphabet()[static_cast<std::size_t>(e.read)]},
             {"guard", guard_name(e.guard)},
             {"delta", e.delta},
             {"to", c.state_name(e.to)}});
    return j;
}

/// Parses "LHS -> x y | z |" lines. Nonterminals are the left-hand sides,
/// the first one is the axiom, an empty alternative is epsilon.
inline Cfg grammar_from_text(const std::string& text, const std::string& source = "<grammar>")
{
    struct Line {
        std::size_t number;
        std::string lhs;
        std::vector<std::vector<std::string>> alternatives;
    };
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    for (std::size_t number = 1; std::getline(in, raw); ++number) {
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto arrow = raw.find("->");
        std::istringstream head(raw.substr(0, arrow == std::string::npos ? raw.size() : arrow));
        std::vector<std::string> lhs;
        for (std::string t; head >> t;) lhs.push_back(t);
        if (arrow == std::string::npos) {
            if (lhs.empty()) continue;
            throw InputError(source + ":" + std::to_string(number) + ":1: expected '->'");
        }
        if (lhs.size() != 1)
            throw InputError(source + ":" + std::to_string(number) + ":1: expected exactly one symbol before '->'");
        Line line{number, lhs[0], {{}}};
        std::istringstream body(raw.substr(arrow + 2));
        for (std::string t; body >> t;) {
            if (t == "|") line.alternatives.emplace_back();
            else line.alternatives.back().push_back(t);
        }
        lines.push_back(std::move(line));
    }
    if (lines.empty()) throw InputError(source + ":1:1: grammar has no rules");
    Cfg g;
    for (const auto& l : lines)
        if (!g.find(l.lhs)) g.add_nonterminal(l.lhs);
    for (const auto& l : lines)
        for (const auto& alt : l.alternatives)
            for (const auto& s : alt)
                if (!g.find(s)) g.add_terminal(s);
    for (const auto& l : lines)
        for (const auto& alt : l.alternatives) g.add_rule(l.lhs, alt);
    return g;
}

inline Cfg load_grammar(const std::string& path) { return grammar_from_text(read_file(path), path); }

/// One line per nonterminal with rules, axiom first. A nonterminal without
/// rules is written as "A -> A" so that it stays a nonterminal.
inline std::string grammar_to_text(const Cfg& g)
{
    std::string out;
    std::vector<Cfg::Id> order;
    if (g.has_axiom()) order.push_back(g.axiom());
    for (Cfg::Id a : g.nonterminals())
        if (!g.has_axiom() || a != g.axiom()) order.push_back(a);
    for (Cfg::Id a : order) {
        out += g.name(a) + " ->";
        const auto& rs = g.rules_for(a);
        if (rs.empty()) out += " " + g.name(a);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (i) out += " |";
            for (Cfg::Id s : g.rules()[rs[i]].rhs) out += " " + g.name(s);
            if (g.rules()[rs[i]].rhs.empty() && i + 1 < rs.size()) out += " ";
        }
        out += "\n";
    }
    return out;
}

} // namespace rr
