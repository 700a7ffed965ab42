/*
 * Copyright 2026 The mpds-verify Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mpds/mpds.hpp"
#include "mpds/oracles.hpp"

namespace {

using namespace mpds;

// Exit codes.
constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUnstable = 2;
constexpr int kInputError = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Caps {
    int context_bound = 8;
    std::size_t stack_cap = 64;
    std::size_t node_cap = 1'000'000;
    std::size_t delta = 8;

    Json json() const
    {
        return {{"context_bound", context_bound}, {"stack_cap", stack_cap}, {"node_cap", node_cap},
                {"stability_delta", delta}};
    }
    ExplorationBounds bounds(std::size_t extra = 0) const
    {
        ExplorationBounds b;
        b.context_bound = context_bound;
        b.stack_cap = stack_cap + extra;
        b.node_cap = node_cap;
        return b;
    }
};

int threads_requested()
{
    const char* env = std::getenv("MPDS_VERIFY_THREADS");
    if (!env || !*env) return 0;
    try {
        return std::stoi(env);
    } catch (const std::exception&) {
        throw InputError("MPDS_VERIFY_THREADS must be an integer");
    }
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

MpdsSystem load_mpds(const std::string& path) { return read_mpds(parse_json_text(slurp(path))); }

std::string config_text(const MpdsSystem& sys, const Configuration& c)
{
    std::string s = sys.state_name(c.state) + " |";
    for (const auto& w : c.stacks) {
        s += " [";
        for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + sys.symbol(w[i]).spelling();
        s += "]";
    }
    return s;
}

/// Prints the report and returns the exit code.
int emit(bool json, const Json& report, int code)
{
    if (json) {
        std::cout << report.dump(2) << "\n";
        return code;
    }
    for (const auto& [k, v] : report.items()) {
        if (v.is_object() || v.is_array()) std::cout << k << ": " << v.dump() << "\n";
        else if (v.is_string()) std::cout << k << ": " << v.get<std::string>() << "\n";
        else std::cout << k << ": " << v.dump() << "\n";
    }
    return code;
}

Json base_report(const std::string& command)
{
    Json metrics = {{"nodes", 0}, {"edges", 0}, {"max_contexts_seen", 0}, {"max_phases_seen", 0}, {"states_emitted", 0}};
    return {{"command", command},
            {"answer", nullptr},
            {"truncated", false},
            {"stable", true},
            {"caps", Json::object()},
            {"metrics", metrics},
            {"threads", {{"requested", threads_requested()}, {"used", 1}}}};
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const std::string& file, std::size_t steps, bool json)
{
    auto sys = load_mpds(file);
    auto c = sys.initial_config();
    Json run = Json::array();
    run.push_back({{"step", 0}, {"config", config_text(sys, c)}});
    std::size_t taken = 0;
    for (; taken < steps; ++taken) {
        auto next = successors(sys, c);
        if (next.empty()) break;
        c = next.front().second;
        run.push_back({{"step", taken + 1}, {"transition", next.front().first}, {"config", config_text(sys, c)}});
    }
    auto r = base_report("simulate");
    r["steps"] = taken;
    r["deadlocked"] = taken < steps;
    r["run"] = run;
    return emit(json, r, kTrue);
}

// --- reach ------------------------------------------------------------------

int run_reach(const std::string& file, const std::string& target, const Caps& caps, const std::string& dump,
              bool json)
{
    auto sys = load_mpds(file);
    auto q = sys.find_state(target);
    if (!q) throw InputError("unknown target state " + target);
    auto once = [&](std::size_t extra) {
        auto g = explore(sys, sys.initial_config(), caps.bounds(extra));
        auto res = reachable(g, [&](StateId s) { return s == *q; });
        return std::make_pair(std::move(g), std::move(res));
    };
    auto [g, res] = once(0);
    if (!dump.empty()) spit(dump, graph_json(sys, g).dump(1) + "\n");
    bool stable = true;
    if (!res.reachable && res.truncated) stable = !once(caps.delta).second.reachable;
    auto r = base_report("reach");
    r["answer"] = res.reachable;
    r["truncated"] = res.truncated;
    r["stable"] = stable;
    r["caps"] = caps.json();
    r["metrics"].update(Json{{"nodes", g.nodes.size()}, {"edges", g.edges.size()}, {"max_contexts_seen", g.max_contexts()}});
    if (res.witness) {
        Json w = Json::array();
        for (auto t : *res.witness) w.push_back(t);
        r["witness"] = w;
        r["witness_contexts"] = context_count(sys, *res.witness);
    }
    if (!stable) return emit(json, r, kUnstable);
    return emit(json, r, res.reachable ? kTrue : kFalse);
}

// --- check-ctl --------------------------------------------------------------

struct CtlOutcome {
    bool holds = false;
    bool truncated = false;
    bool budget = false;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    int max_contexts = 0;
};

CtlOutcome check_once(const MpdsSystem& sys, const Ctl& f, const Caps& caps, std::size_t extra)
{
    SpaceBounds sb{caps.context_bound, caps.stack_cap + extra, {}};
    ConfigSpace space(sys, sb);
    LocalChecker lc(space, caps.node_cap);
    CtlOutcome o;
    try {
        o.holds = lc.holds(space.intern(sys.initial_config()), f);
    } catch (const BudgetExceeded&) {
        o.budget = true;
    }
    o.truncated = lc.truncated() || o.budget;
    o.nodes = space.size();
    for (ConfigSpace::NodeId n = 0; n < space.size(); ++n)
        if (space.expanded(n)) o.edges += space.expand(n).edges.size();
    o.max_contexts = space.max_contexts_seen();
    return o;
}

int run_check_ctl(const std::string& file, std::string formula, const std::string& formula_file, const Caps& caps,
                  bool json)
{
    auto sys = load_mpds(file);
    if (!formula_file.empty()) formula = slurp(formula_file);
    if (formula.empty()) throw InputError("a formula is required (--formula or --formula-file)");
    auto f = parse_ctl(formula);
    auto a = check_once(sys, f, caps, 0);
    bool stable = !a.budget;
    if (stable && a.truncated) {
        auto b = check_once(sys, f, caps, caps.delta);
        stable = !b.budget && b.holds == a.holds;
    }
    auto r = base_report("check-ctl");
    r["formula"] = f.to_string();
    r["answer"] = a.holds;
    r["truncated"] = a.truncated;
    r["stable"] = stable;
    r["bound_exceeded"] = a.budget;
    r["caps"] = caps.json();
    r["metrics"].update(Json{{"nodes", a.nodes}, {"edges", a.edges}, {"max_contexts_seen", a.max_contexts}});
    if (!stable) return emit(json, r, kUnstable);
    return emit(json, r, a.holds ? kTrue : kFalse);
}

// --- solve-game -------------------------------------------------------------

int run_solve_game(const std::string& file, int phase_bound, const Caps& caps, bool json)
{
    auto sys = load_mpds(file);
    auto once = [&](std::size_t extra) {
        auto g = build_phase_game(sys, sys.initial_config(), phase_bound, caps.bounds(extra));
        auto sol = solve_parity(g.game);
        if (!verify_strategy(g.game, sol)) throw std::logic_error("solver produced an unsound strategy");
        return std::make_pair(winner_from(g, sol, 0), std::move(g));
    };
    auto [w, g] = once(0);
    bool stable = true;
    if (g.truncated()) stable = once(caps.delta).first == w;
    auto r = base_report("solve-game");
    r["answer"] = w == Player::even ? 0 : 1;
    r["truncated"] = g.truncated();
    r["stable"] = stable;
    r["phase_bound"] = phase_bound;
    r["caps"] = caps.json();
    std::size_t edges = 0;
    for (const auto& out : g.game.succ) edges += out.size();
    r["metrics"].update(Json{{"nodes", g.size()}, {"edges", edges}, {"max_phases_seen", g.max_phases_seen()}});
    if (!stable) return emit(json, r, kUnstable);
    return emit(json, r, w == Player::even ? kTrue : kFalse);
}

// --- compile-fo -------------------------------------------------------------

int run_compile_fo(const std::string& text, const std::string& out, bool solve, const Caps& caps, bool json)
{
    auto f = parse_fo(text);
    if (!free_variables(f).empty()) throw InputError("formula has free variables");
    auto g = compile_fo(to_nnf(f));
    if (!out.empty()) spit(out, write_mpds(g.system).dump(1) + "\n");
    auto r = base_report("compile-fo");
    r["formula"] = to_string(g.formula);
    r["report"] = {{"states", g.report.states},
                   {"transitions", g.report.transitions},
                   {"quantifiers", g.report.quantifiers},
                   {"phase_bound", g.report.phase_bound}};
    r["metrics"]["states_emitted"] = g.report.states;
    if (!solve) return emit(json, r, kTrue);
    auto a = solve_fo_game(g, caps.stack_cap, caps.node_cap);
    bool stable = true;
    if (a.truncated) stable = solve_fo_game(g, caps.stack_cap + caps.delta, caps.node_cap).winner == a.winner;
    r["answer"] = a.winner == Player::even ? 0 : 1;
    r["truncated"] = a.truncated;
    r["stable"] = stable;
    r["caps"] = caps.json();
    r["metrics"].update(Json{{"nodes", a.positions}, {"max_phases_seen", a.max_phases_seen}});
    if (!stable) return emit(json, r, kUnstable);
    return emit(json, r, a.winner == Player::even ? kTrue : kFalse);
}

// --- compile-tm -------------------------------------------------------------

struct TmCheck {
    bool holds = false;
    bool truncated = false;
    bool budget = false;
    std::size_t nodes = 0;
    int max_contexts = 0;
};

TmCheck check_tm(const TmCompiled& c, std::size_t cap1, std::size_t cap2, std::size_t node_cap)
{
    SpaceBounds sb{c.report.context_bound + 1, 0, {cap1, cap2}};
    ConfigSpace space(c.system, sb);
    LocalChecker lc(space, node_cap);
    TmCheck t;
    try {
        t.holds = lc.holds(space.intern(c.system.initial_config()), c.formula);
    } catch (const BudgetExceeded&) {
        t.budget = true;
    }
    t.truncated = lc.truncated() || t.budget;
    t.nodes = space.size();
    t.max_contexts = space.max_contexts_seen();
    return t;
}

int run_compile_tm(const std::string& file, const std::string& input, int level, bool eu, bool check,
                   const std::string& guesses, std::size_t run_length, const std::string& out, const Caps& caps,
                   bool json)
{
    auto m = read_tm(parse_json_text(slurp(file)));
    auto w = split_input(input);
    if (guesses != "free" && guesses != "shaped") throw InputError("--guesses must be free or shaped");
    TmOptions opt{eu, guesses == "free" ? GuessMode::free : GuessMode::shaped};
    auto c = compile_tm(m, w, level, opt);
    if (!out.empty()) spit(out, write_mpds(c.system).dump(1) + "\n");
    const auto& rep = c.report;
    auto r = base_report("compile-tm");
    r["report"] = {{"level", rep.level},
                   {"base", rep.base},
                   {"positions", rep.positions},
                   {"cells", rep.cells},
                   {"state_count", rep.states},
                   {"transitions", rep.transitions},
                   {"sigma_size", rep.sigma_size},
                   {"violation_pairs", rep.violations},
                   {"formula_dag_size", rep.formula_dag},
                   {"formula_tree_size", rep.formula_tree < 9e15 ? Json(static_cast<std::uint64_t>(rep.formula_tree)) : Json(rep.formula_tree)},
                   {"max_context_switches", rep.context_bound},
                   {"move_contexts", rep.move_contexts},
                   {"step_contexts", rep.step_contexts},
                   {"config_length", rep.config_length},
                   {"variant", eu ? "EU" : "EF/EX"}};
    r["metrics"]["states_emitted"] = rep.states;
    auto shortest = shortest_accepting_run(m, w, rep.cells);
    r["simulator"] = shortest ? Json{{"accepts", true}, {"run_length", *shortest},
                                     {"minimal_stack_cap", c.stack_cap_for(*shortest)}}
                              : Json{{"accepts", false}};
    if (!check) return emit(json, r, kTrue);
    if (run_length == 0) run_length = shortest ? *shortest : 2;
    auto cap1 = c.stack_cap_for(run_length);
    auto cap2 = rep.config_length;
    auto a = check_tm(c, cap1, cap2, caps.node_cap);
    bool stable = !a.budget;
    if (stable && a.truncated) {
        auto b = check_tm(c, cap1 + caps.delta, cap2 + caps.delta, caps.node_cap);
        stable = !b.budget && b.holds == a.holds;
    }
    r["answer"] = a.holds;
    r["truncated"] = a.truncated;
    r["stable"] = stable;
    r["bound_exceeded"] = a.budget;
    r["caps"] = {{"stack_caps", {cap1, cap2}}, {"run_length", run_length}, {"context_bound", rep.context_bound + 1},
                 {"node_cap", caps.node_cap}, {"stability_delta", caps.delta}};
    r["metrics"].update(Json{{"nodes", a.nodes}, {"max_contexts_seen", a.max_contexts}});
    if (!stable) return emit(json, r, kUnstable);
    return emit(json, r, a.holds ? kTrue : kFalse);
}

// --- counters ---------------------------------------------------------------

CounterWord parse_word(const std::string& text)
{
    CounterWord w;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) w.push_back(StackSymbol::parse(tok));
    return w;
}

int run_counters(const std::string& op, int level, int base, const std::string& value, const std::string& word,
                 bool json)
{
    CounterParams p{level, base};
    check_scale(p);
    auto r = base_report("counters");
    r["op"] = op;
    r["max"] = max_value(p).str();
    auto need_word = [&] {
        if (word.empty()) throw InputError("--word is required");
        return parse_word(word);
    };
    if (op == "encode") {
        if (value.empty()) throw InputError("--value is required");
        BigNat v;
        try {
            v = BigNat(value);
        } catch (const std::exception&) {
            throw InputError("--value must be a natural number");
        }
        r["word"] = spell(encode_counter(p, v));
        return emit(json, r, kTrue);
    }
    if (op == "decode") {
        r["value"] = decode_counter(p, need_word()).str();
        return emit(json, r, kTrue);
    }
    if (op == "validate") {
        bool ok = is_valid_counter(p, need_word());
        r["valid"] = ok;
        return emit(json, r, ok ? kTrue : kFalse);
    }
    if (op == "inc") {
        auto w = need_word();
        try {
            r["word"] = spell(increment_counter(p, w));
        } catch (const std::overflow_error&) {
            r["overflow"] = true;
            return emit(json, r, kFalse);
        }
        return emit(json, r, kTrue);
    }
    throw InputError("unknown counters operation " + op);
}

// --- oracle (debugging) -------------------------------------------------------

int run_oracle(const std::string& what, const std::string& formula, unsigned domain, const std::string& tm,
               const std::string& input, std::size_t space, bool json)
{
    auto r = base_report("oracle");
    if (what == "fo") {
        bool v = oracle::fo_eval(parse_fo(formula), domain);
        r["answer"] = v;
        return emit(json, r, v ? kTrue : kFalse);
    }
    if (what == "tm") {
        auto m = read_tm(parse_json_text(slurp(tm)));
        auto v = oracle::tm_accepts(m, split_input(input), space);
        r["answer"] = oracle::to_string(v);
        return emit(json, r, v == oracle::TmVerdict::accept ? kTrue : v == oracle::TmVerdict::reject ? kFalse : kUnstable);
    }
    throw InputError("oracle must be fo or tm");
}

void add_caps(CLI::App* sub, Caps& caps, bool contexts)
{
    if (contexts) sub->add_option("--context-bound", caps.context_bound, "maximum context blocks")->capture_default_str();
    sub->add_option("--stack-cap", caps.stack_cap, "maximum height of each stack")->capture_default_str();
    sub->add_option("--node-cap", caps.node_cap, "maximum explored nodes")->capture_default_str();
    sub->add_option("--stability-delta", caps.delta, "extra stack height for the stability re-check")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-pushdown verification toolkit"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "print the report as one JSON object");
    Caps caps;
    std::string mpds_file, target, formula, formula_file, dump, out, tm_file, input, guesses = "shaped", op, value,
        word, what;
    std::size_t steps = 20, run_length = 0, space = 0;
    int phase_bound = 2, level = 1, base = 1;
    unsigned domain = 3;
    bool eu = false, check = false, solve = false;

    auto* sim = app.add_subcommand("simulate", "print a run from the initial configuration");
    sim->add_option("--mpds", mpds_file, "MPDS document")->required();
    sim->add_option("--steps", steps, "maximum number of steps")->capture_default_str();

    auto* reach = app.add_subcommand("reach", "bounded reachability of a control state");
    reach->add_option("--mpds", mpds_file, "MPDS document")->required();
    reach->add_option("--target", target, "target control state")->required();
    reach->add_option("--dump-graph", dump, "write the explored graph as JSON");
    add_caps(reach, caps, true);

    auto* ctlc = app.add_subcommand("check-ctl", "CTL model checking at the initial configuration");
    ctlc->add_option("--mpds", mpds_file, "MPDS document")->required();
    ctlc->add_option("--formula", formula, "CTL formula text");
    ctlc->add_option("--formula-file", formula_file, "file holding the CTL formula");
    add_caps(ctlc, caps, true);

    auto* game = app.add_subcommand("solve-game", "solve the bounded-phase parity game");
    game->add_option("--mpds", mpds_file, "MPDS document with owner and priority maps")->required();
    game->add_option("--phase-bound", phase_bound, "phase bound k")->capture_default_str();
    add_caps(game, caps, false);

    auto* cfo = app.add_subcommand("compile-fo", "compile an FO(<) sentence into a game");
    cfo->add_option("--formula", formula, "FO(<) sentence")->required();
    cfo->add_option("-o,--output", out, "write the compiled MPDS document");
    cfo->add_flag("--solve", solve, "solve the game at the stack cap and cap+delta");
    cfo->add_flag("--report", [](std::int64_t) {}, "print the compilation report (always on)");
    add_caps(cfo, caps, false);

    auto* ctm = app.add_subcommand("compile-tm", "compile a space-bounded Turing machine run check");
    ctm->add_option("--tm", tm_file, "TM document")->required();
    ctm->add_option("--input", input, "input word")->required();
    ctm->add_option("--level", level, "counter level k")->capture_default_str();
    ctm->add_flag("--eu", eu, "use the EU variant of the acceptance formula");
    ctm->add_flag("--check", check, "model-check the acceptance formula");
    ctm->add_option("--guesses", guesses, "copy-guess writers: free or shaped")->capture_default_str();
    ctm->add_option("--run-length", run_length, "configurations the stack must fit (default: simulator run)");
    ctm->add_option("-o,--output", out, "write the compiled MPDS document");
    add_caps(ctm, caps, false);

    auto* cnt = app.add_subcommand("counters", "encode, decode, validate or increment level-k counters");
    cnt->add_option("op", op, "encode | decode | validate | inc")->required();
    cnt->add_option("--level", level, "counter level k")->capture_default_str();
    cnt->add_option("--base", base, "base width n")->capture_default_str();
    cnt->add_option("--value", value, "value to encode");
    cnt->add_option("--word", word, "space-separated symbols, top first");

    auto* orc = app.add_subcommand("oracle", "reference evaluators");
    orc->group("");
    orc->add_option("what", what, "fo | tm")->required();
    orc->add_option("--formula", formula, "FO sentence");
    orc->add_option("--domain", domain, "largest domain element")->capture_default_str();
    orc->add_option("--tm", tm_file, "TM document");
    orc->add_option("--input", input, "input word");
    orc->add_option("--space", space, "tape cells");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (*sim) return run_simulate(mpds_file, steps, json);
        if (*reach) return run_reach(mpds_file, target, caps, dump, json);
        if (*ctlc) return run_check_ctl(mpds_file, formula, formula_file, caps, json);
        if (*game) return run_solve_game(mpds_file, phase_bound, caps, json);
        if (*cfo) return run_compile_fo(formula, out, solve, caps, json);
        if (*ctm) return run_compile_tm(tm_file, input, level, eu, check, guesses, run_length, out, caps, json);
        if (*cnt) return run_counters(op, level, base, value, word, json);
        if (*orc) return run_oracle(what, formula, domain, tm_file, input, space, json);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const DocumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const ScaleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const CtlParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const FoParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnstable;
    }
    return kInputError;
}
