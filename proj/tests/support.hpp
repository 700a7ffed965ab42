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
#pragma once

// Generators and brute-force references shared by the unit suites and the
// acceptance driver.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mpds/mpds.hpp"
#include "mpds/oracles.hpp"

namespace mpds::testkit {

inline int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// --- random systems -----------------------------------------------------------

/// Up to `states` states, two stacks, up to `trans` transitions over the
/// letters x and y.
inline MpdsSystem random_mpds(std::mt19937& rng, int states = 6, int trans = 10)
{
    SystemBuilder b(2);
    int n = pick(rng, 1, states);
    for (int i = 0; i < n; ++i) b.state("s" + std::to_string(i));
    std::vector<SymbolId> letters{b.symbol(StackSymbol::letter("x")), b.symbol(StackSymbol::letter("y"))};
    auto any_state = [&] { return static_cast<StateId>(pick(rng, 0, n - 1)); };
    auto any_letter = [&] { return letters[static_cast<std::size_t>(pick(rng, 0, 1))]; };
    auto any_guard = [&]() -> std::int32_t {
        int g = pick(rng, 0, 4);
        return g >= 3 ? kWildcard : g == 2 ? static_cast<std::int32_t>(kBottom) : static_cast<std::int32_t>(any_letter());
    };
    // Sources are drawn mostly from states already targeted, so that most
    // transitions are live from the initial state.
    std::vector<StateId> reached{0};
    int m = pick(rng, trans / 2, trans);
    for (int i = 0; i < m; ++i) {
        auto from = pick(rng, 0, 3) ? reached[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(reached.size()) - 1))]
                                    : any_state();
        auto to = any_state();
        reached.push_back(to);
        int stack = pick(rng, 1, 2);
        switch (pick(rng, 0, 9)) {
        case 0:
        case 1: b.internal(from, to); break;
        case 2:
        case 3:
        case 4:
        case 5: b.push(from, any_guard(), to, stack, any_letter()); break;
        case 6:
        case 7:
        case 8: b.pop(from, any_letter(), to, stack); break;
        default: b.noop(from, any_guard(), stack, to); break;
        }
    }
    b.set_initial(0);
    return b.build();
}

// --- explorer reference ----------------------------------------------------------

/// Node key: state, contexts, current stack, stacks (top-first, bottom kept).
using RefNode = std::tuple<StateId, int, int, std::vector<std::vector<SymbolId>>>;

struct RefGraph {
    std::set<RefNode> nodes;
    std::set<std::tuple<RefNode, std::uint32_t, RefNode>> edges;
    std::set<RefNode> frontier;
};

/// Enumerates every run from the initial configuration with its own copy of
/// the step rules, remembering visited nodes so each is extended once.
inline RefGraph enumerate_runs(const MpdsSystem& sys, int context_bound, std::size_t stack_cap)
{
    RefGraph g;
    RefNode root{sys.initial(), 0, 0, std::vector<std::vector<SymbolId>>(2, {kBottom})};
    std::vector<RefNode> todo{root};
    g.nodes.insert(root);
    while (!todo.empty()) {
        auto node = todo.back();
        todo.pop_back();
        const auto& [q, ctx, cur, stacks] = node;
        for (std::uint32_t i = 0; i < sys.transitions().size(); ++i) {
            const auto& t = sys.transitions()[i];
            if (t.from != q) continue;
            auto next_stacks = stacks;
            int nctx = ctx, ncur = cur;
            if (t.kind != TransKind::internal) {
                auto& w = next_stacks[static_cast<std::size_t>(t.stack - 1)];
                bool guard_ok = t.guard == kWildcard || static_cast<SymbolId>(t.guard) == w.front();
                if (t.kind == TransKind::pop) {
                    if (w.front() == kBottom || w.front() != t.symbol) continue;
                    w.erase(w.begin());
                } else if (!guard_ok) {
                    continue;
                } else if (t.kind == TransKind::push) {
                    if (w.size() - 1 + 1 > stack_cap) {
                        g.frontier.insert(node);
                        continue;
                    }
                    w.insert(w.begin(), t.symbol);
                }
                if (t.kind != TransKind::guarded_noop && t.stack != cur) {
                    if (ctx + 1 > context_bound) {
                        g.frontier.insert(node);
                        continue;
                    }
                    nctx = ctx + 1;
                    ncur = t.stack;
                }
            }
            RefNode next{t.to, nctx, ncur, next_stacks};
            g.edges.emplace(node, i, next);
            if (g.nodes.insert(next).second) todo.push_back(next);
        }
    }
    return g;
}

inline RefGraph as_ref(const ConfigGraph& cg)
{
    RefGraph g;
    auto key = [&](std::uint32_t n) {
        const auto& v = cg.nodes[n];
        return RefNode{v.config.state, v.contexts, v.current_stack, v.config.stacks};
    };
    for (std::uint32_t n = 0; n < cg.nodes.size(); ++n) {
        g.nodes.insert(key(n));
        if (cg.nodes[n].frontier) g.frontier.insert(key(n));
    }
    for (const auto& e : cg.edges) g.edges.emplace(key(e.src), e.transition, key(e.dst));
    return g;
}

// --- context / phase minima ------------------------------------------------------

/// Minimum number of blocks over all 2^(|w|-1) ways of cutting w, where a
/// block is admissible if its stack-touching (phases: popping) moves all
/// hit one stack.
inline std::size_t min_blocks_exhaustive(const MpdsSystem& sys, const std::vector<std::uint32_t>& w, bool phases)
{
    if (w.empty()) return 0;
    auto counts = [&](const Transition& t) {
        return phases ? t.kind == TransKind::pop : (t.kind == TransKind::push || t.kind == TransKind::pop);
    };
    const auto n = w.size();
    std::size_t best = n;
    for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
        std::size_t blocks = 1;
        int stack = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (i > 0 && (cuts >> (i - 1)) & 1u) {
                ++blocks;
                stack = 0;
            }
            const auto& t = sys.transitions()[w[i]];
            if (!counts(t)) continue;
            if (stack == 0) stack = t.stack;
            ok = stack == t.stack;
        }
        if (ok) best = std::min(best, blocks);
    }
    return best;
}

// --- CTL ------------------------------------------------------------------------

inline LabeledGraph random_graph(std::mt19937& rng, int max_nodes, const std::vector<std::string>& labels)
{
    LabeledGraph g;
    int n = pick(rng, 1, max_nodes);
    for (int v = 0; v < n; ++v) g.labels.push_back(labels[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(labels.size()) - 1))]);
    g.succ.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        int deg = pick(rng, 0, 3);
        for (int i = 0; i < deg; ++i) g.succ[static_cast<std::size_t>(v)].push_back(static_cast<std::uint32_t>(pick(rng, 0, n - 1)));
    }
    return g;
}

inline Ctl random_ctl(std::mt19937& rng, int depth, const std::vector<std::string>& labels)
{
    using namespace ctl;
    if (depth == 0 || pick(rng, 0, 4) == 0)
        return prop(labels[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(labels.size()) - 1))]);
    auto sub = [&] { return random_ctl(rng, depth - 1, labels); };
    switch (pick(rng, 0, 7)) {
    case 0: return neg(sub());
    case 1: return conj(sub(), sub());
    case 2: return disj(sub(), sub());
    case 3: return ex(sub());
    case 4: return ef(sub());
    case 5: return eg(sub());
    default: return eu(sub(), sub());
    }
}

// --- parity games ------------------------------------------------------------------

inline ParityGame random_game(std::mt19937& rng, int max_positions, int max_priority)
{
    ParityGame g;
    int n = pick(rng, 1, max_positions);
    for (int v = 0; v < n; ++v) g.add(pick(rng, 0, 1) ? Player::odd : Player::even, pick(rng, 0, max_priority));
    for (int v = 0; v < n; ++v) {
        int deg = pick(rng, 0, 9) == 0 ? 0 : pick(rng, 1, 3);
        std::set<std::uint32_t> out;
        for (int i = 0; i < deg; ++i) out.insert(static_cast<std::uint32_t>(pick(rng, 0, n - 1)));
        g.succ[static_cast<std::size_t>(v)].assign(out.begin(), out.end());
    }
    return g;
}

// --- FO --------------------------------------------------------------------------

inline std::string random_atom(std::mt19937& rng, const std::vector<std::string>& vs)
{
    auto a = vs[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(vs.size()) - 1))];
    auto b = vs[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(vs.size()) - 1))];
    std::string s = a + (pick(rng, 0, 1) ? "<" : "=") + b;
    return pick(rng, 0, 3) == 0 ? "!(" + s + ")" : s;
}

/// A sentence with quantifier depth at most q over the variables x, y, z.
inline std::string random_sentence(std::mt19937& rng, int q, std::vector<std::string> vs = {})
{
    auto join = [&](const std::string& l, const std::string& r) {
        return "(" + l + (pick(rng, 0, 1) ? " & " : " | ") + r + ")";
    };
    if (q == 0 || (!vs.empty() && pick(rng, 0, 3) == 0)) {
        if (vs.empty()) return "E x. x=x";
        auto s = random_atom(rng, vs);
        return pick(rng, 0, 1) ? join(s, random_atom(rng, vs)) : s;
    }
    std::string v(1, "xyz"[vs.size()]);
    vs.push_back(v);
    auto body = random_sentence(rng, q - 1, vs);
    if (pick(rng, 0, 2) == 0) body = join(body, random_atom(rng, vs));
    return std::string(pick(rng, 0, 1) ? "E " : "A ") + v + ". " + body;
}

/// True if fo_eval gives the same answer on every domain {0..n}, n <= up_to.
inline std::optional<bool> domain_stable_value(const Fo& f, unsigned up_to)
{
    bool v = oracle::fo_eval(f, 0);
    for (unsigned n = 1; n <= up_to; ++n)
        if (oracle::fo_eval(f, n) != v) return std::nullopt;
    return v;
}

// --- Turing machines -------------------------------------------------------------

/// "immediate", "reject" or "flip" over tape {1, 0, B}.
inline TmMachine fixture(const std::string& which)
{
    TmMachine m{{"s", "f"}, {"1", "0", "B"}, "B", "s", {"f"}, {}};
    if (which == "immediate") m.finals = {"s", "f"};
    else if (which == "flip") m.transitions = {{"s", "1", "f", false, 'R', "0"}};
    else if (which != "reject") throw std::invalid_argument("unknown fixture " + which);
    return m;
}

/// One TM step from a to b on the same tape, independent of the library.
inline bool tm_yields(const TmMachine& m, const TmConfig& a, const TmConfig& b)
{
    for (const auto& t : m.transitions) {
        if (t.from != a.state || t.read != a.tape[a.head]) continue;
        TmConfig c = a;
        c.state = t.to;
        if (!t.moves) c.tape[c.head] = t.write;
        else if (t.dir == 'R') {
            if (c.head + 1 >= c.tape.size()) continue;
            ++c.head;
        } else {
            if (c.head == 0) continue;
            --c.head;
        }
        if (c == b) return true;
    }
    return false;
}

inline std::vector<TmConfig> all_tm_configs(const TmMachine& m, std::size_t cells)
{
    std::vector<TmConfig> out;
    std::vector<std::string> tape(cells);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == cells) {
            for (const auto& q : m.states)
                for (std::size_t h = 0; h < cells; ++h) out.push_back({q, tape, h});
            return;
        }
        for (const auto& x : m.tape_alphabet) {
            tape[i] = x;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

// --- counter gadgets ---------------------------------------------------------------

/// Host state wired to Equal, Succ, Valid, Max and Min at level k.
struct CounterHost {
    MpdsSystem sys;
    StateId host = 0;
    SymbolId zeta = 0;
    Gadget eq, succ, valid, max, min;
    int k = 1;
    int n = 1;

    std::vector<SymbolId> ids(const CounterWord& w) const
    {
        std::vector<SymbolId> out;
        for (const auto& s : w) out.push_back(sys.symbol_id(s));
        return out;
    }
    /// Counter word followed by zeta and bottom.
    std::vector<SymbolId> stack_word(const CounterWord& w) const
    {
        auto out = ids(w);
        out.push_back(zeta);
        out.push_back(kBottom);
        return out;
    }
};

inline CounterHost counter_host(int k, int n, GuessMode mode)
{
    SystemBuilder b(2);
    CounterHost h;
    h.k = k;
    h.n = n;
    auto zeta = b.symbol(StackSymbol::separator());
    GadgetLibrary lib(b, k, n, mode);
    h.host = b.state("host");
    h.eq = lib.eq(k);
    h.succ = lib.succ(k);
    h.valid = lib.valid(k);
    h.max = lib.max(k);
    h.min = lib.min(k);
    for (const auto* g : {&h.eq, &h.succ, &h.valid, &h.max, &h.min}) b.internal(h.host, g->entry);
    b.set_initial(h.host);
    h.sys = b.build();
    h.zeta = zeta;
    return h;
}

}  // namespace mpds::testkit
