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

// Brute-force reference implementations for tests. They use the data types
// of the library but none of its algorithms.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ctl.hpp"
#include "fo.hpp"
#include "games.hpp"
#include "tm.hpp"

namespace mpds::oracle {

// --- FO(<) ------------------------------------------------------------------

/// Tarskian evaluation over {0..n}.
inline bool fo_eval(const Fo& f, unsigned n, std::map<std::string, unsigned> env = {})
{
    auto value = [&](const std::string& x) {
        auto it = env.find(x);
        if (it == env.end()) throw std::invalid_argument("free variable " + x);
        return it->second;
    };
    switch (f->kind) {
    case FoKind::lt: return value(f->x) < value(f->y);
    case FoKind::eq: return value(f->x) == value(f->y);
    case FoKind::neg: return !fo_eval(f->lhs, n, env);
    case FoKind::conj: return fo_eval(f->lhs, n, env) && fo_eval(f->rhs, n, env);
    case FoKind::disj: return fo_eval(f->lhs, n, env) || fo_eval(f->rhs, n, env);
    case FoKind::exists:
    case FoKind::forall:
        for (unsigned v = 0; v <= n; ++v) {
            env[f->x] = v;
            bool r = fo_eval(f->lhs, n, env);
            if (f->kind == FoKind::exists && r) return true;
            if (f->kind == FoKind::forall && !r) return false;
        }
        return f->kind == FoKind::forall;
    }
    return false;
}

// --- CTL --------------------------------------------------------------------

namespace detail {

// Nodes reachable from v by paths whose nodes before the last all lie in
// `through` (v itself included in the check).
inline std::set<std::uint32_t> reach(const LabeledGraph& g, std::uint32_t v, const std::vector<char>& through)
{
    std::set<std::uint32_t> seen{v};
    std::vector<std::uint32_t> stack{v};
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        if (!through[u]) continue;
        for (auto w : g.succ[u])
            if (seen.insert(w).second) stack.push_back(w);
    }
    return seen;
}

inline bool has_cycle(const LabeledGraph& g, const std::set<std::uint32_t>& nodes)
{
    std::map<std::uint32_t, int> color;  // 0 new, 1 on stack, 2 done
    std::function<bool(std::uint32_t)> dfs = [&](std::uint32_t u) {
        color[u] = 1;
        for (auto w : g.succ[u]) {
            if (!nodes.count(w)) continue;
            if (color[w] == 1) return true;
            if (color[w] == 0 && dfs(w)) return true;
        }
        color[u] = 2;
        return false;
    };
    for (auto u : nodes)
        if (color[u] == 0 && dfs(u)) return true;
    return false;
}

}  // namespace detail

/// Satisfaction vector by per-node path search. EG holds where a maximal
/// path (infinite, or ending in a deadlock) stays inside the operand.
inline std::vector<char> ctl_eval_naive(const LabeledGraph& g, const Ctl& f)
{
    const auto n = g.size();
    if (n > 1000) throw std::invalid_argument("naive CTL oracle is limited to 1000 nodes");
    std::vector<char> r(n, 0);
    std::vector<char> all(n, 1);
    if (f.op() == CtlOp::prop) {
        for (std::uint32_t v = 0; v < n; ++v) r[v] = g.labels[v] == f.atom();
    } else if (f.op() == CtlOp::neg) {
        auto a = ctl_eval_naive(g, f.lhs());
        for (std::uint32_t v = 0; v < n; ++v) r[v] = !a[v];
    } else if (f.op() == CtlOp::conj || f.op() == CtlOp::disj) {
        auto a = ctl_eval_naive(g, f.lhs());
        auto b = ctl_eval_naive(g, f.rhs());
        for (std::uint32_t v = 0; v < n; ++v) r[v] = f.op() == CtlOp::conj ? a[v] && b[v] : a[v] || b[v];
    } else if (f.op() == CtlOp::ex) {
        auto a = ctl_eval_naive(g, f.lhs());
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto w : g.succ[v]) r[v] = r[v] || a[w];
    } else if (f.op() == CtlOp::ef || f.op() == CtlOp::eu) {
        auto goal = ctl_eval_naive(g, f.op() == CtlOp::ef ? f.lhs() : f.rhs());
        auto through = f.op() == CtlOp::ef ? all : ctl_eval_naive(g, f.lhs());
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto w : detail::reach(g, v, through))
                if (goal[w]) r[v] = 1;
    } else if (f.op() == CtlOp::eg) {
        auto a = ctl_eval_naive(g, f.lhs());
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!a[v]) continue;
            // Nodes reachable from v while staying inside a.
            std::set<std::uint32_t> inside;
            for (auto w : detail::reach(g, v, a))
                if (a[w]) inside.insert(w);
            std::set<std::uint32_t> via;  // those reachable through a-nodes only
            std::vector<std::uint32_t> stack{v};
            via.insert(v);
            while (!stack.empty()) {
                auto u = stack.back();
                stack.pop_back();
                for (auto w : g.succ[u])
                    if (inside.count(w) && via.insert(w).second) stack.push_back(w);
            }
            bool dead = false;
            for (auto u : via) dead = dead || g.succ[u].empty();
            r[v] = dead || detail::has_cycle(g, via);
        }
    }
    return r;
}

// --- Parity games -------------------------------------------------------------

namespace detail {

// Winner of the play from v under fixed memoryless choices; a position
// without moves is lost by its owner.
inline Player play(const ParityGame& g, const std::vector<std::int32_t>& choice, std::uint32_t v)
{
    std::vector<int> seen_at(g.size(), -1);
    std::vector<std::uint32_t> path;
    while (seen_at[v] < 0) {
        if (g.succ[v].empty()) return opponent(g.owner[v]);
        seen_at[v] = static_cast<int>(path.size());
        path.push_back(v);
        v = g.succ[v][static_cast<std::size_t>(choice[v])];
    }
    int top = -1;
    for (auto i = static_cast<std::size_t>(seen_at[v]); i < path.size(); ++i) top = std::max(top, g.priority[path[i]]);
    return top % 2 == 0 ? Player::even : Player::odd;
}

// Calls visit for every assignment of a move to each position owned by p.
inline void strategies(const ParityGame& g, Player p, std::vector<std::int32_t>& choice,
                       const std::function<void()>& visit, std::size_t from = 0)
{
    if (from == g.size()) {
        visit();
        return;
    }
    if (g.owner[from] != p || g.succ[from].empty()) {
        strategies(g, p, choice, visit, from + 1);
        return;
    }
    for (std::size_t i = 0; i < g.succ[from].size(); ++i) {
        choice[from] = static_cast<std::int32_t>(i);
        strategies(g, p, choice, visit, from + 1);
    }
}

}  // namespace detail

/// Enumerates all memoryless strategy pairs. Intended for games of at
/// most 8 positions with out-degree at most 3.
inline Solution parity_brute(const ParityGame& g)
{
    const auto n = g.size();
    if (n > 12) throw std::invalid_argument("brute-force parity oracle is limited to 12 positions");
    // wins[p][s][v]: strategy s of p wins from v against every opponent strategy.
    std::vector<std::int32_t> choice(n, 0);
    Solution sol;
    sol.winner.assign(n, Player::odd);
    sol.strategy.assign(n, kNoMove);
    std::vector<char> won(n, 0);
    for (auto p : {Player::even, Player::odd}) {
        std::vector<std::pair<std::vector<std::int32_t>, std::vector<char>>> results;
        detail::strategies(g, p, choice, [&] {
            std::vector<char> wins(n, 1);
            auto mine = choice;
            detail::strategies(g, opponent(p), choice, [&] {
                for (std::uint32_t v = 0; v < n; ++v)
                    if (wins[v] && detail::play(g, choice, v) != p) wins[v] = 0;
            });
            choice = mine;
            results.emplace_back(mine, wins);
        });
        std::vector<char> region(n, 0);
        for (const auto& [s, w] : results)
            for (std::uint32_t v = 0; v < n; ++v) region[v] = region[v] || w[v];
        // A uniform strategy winning the whole region exists for finite games.
        for (const auto& [s, w] : results) {
            if (w != region) continue;
            for (std::uint32_t v = 0; v < n; ++v)
                if (region[v]) {
                    sol.winner[v] = p;
                    if (g.owner[v] == p && !g.succ[v].empty()) sol.strategy[v] = s[v];
                }
            break;
        }
        for (std::uint32_t v = 0; v < n; ++v) won[v] = won[v] || region[v];
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (!won[v]) throw std::logic_error("position won by neither player");
    return sol;
}

// --- Turing machines ----------------------------------------------------------

enum class TmVerdict { accept, reject, bound_exceeded };

inline const char* to_string(TmVerdict v)
{
    switch (v) {
    case TmVerdict::accept: return "accept";
    case TmVerdict::reject: return "reject";
    case TmVerdict::bound_exceeded: return "bound_exceeded";
    }
    return "?";
}

/// Breadth-first search over configurations on `space` cells. Accepts when
/// a final state is reachable; step_cap bounds the configurations visited.
inline TmVerdict tm_accepts(const TmMachine& m, const std::vector<std::string>& w, std::size_t space,
                            std::size_t step_cap = 1'000'000)
{
    if (w.size() > space) throw std::invalid_argument("input longer than the space bound");
    struct Conf {
        std::string q;
        std::vector<std::string> tape;
        std::size_t head;
        bool operator<(const Conf& o) const { return std::tie(q, tape, head) < std::tie(o.q, o.tape, o.head); }
    };
    Conf start{m.initial, std::vector<std::string>(space, m.blank), 0};
    for (std::size_t i = 0; i < w.size(); ++i) start.tape[i] = w[i];
    std::set<Conf> seen{start};
    std::deque<Conf> queue{start};
    while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        if (std::find(m.finals.begin(), m.finals.end(), c.q) != m.finals.end()) return TmVerdict::accept;
        for (const auto& t : m.transitions) {
            if (t.from != c.q || t.read != c.tape[c.head]) continue;
            Conf d = c;
            d.q = t.to;
            if (!t.moves) {
                d.tape[d.head] = t.write;
            } else if (t.dir == 'R') {
                if (d.head + 1 == space) continue;
                ++d.head;
            } else {
                if (d.head == 0) continue;
                --d.head;
            }
            if (seen.insert(d).second) {
                if (seen.size() > step_cap) return TmVerdict::bound_exceeded;
                queue.push_back(d);
            }
        }
    }
    return TmVerdict::reject;
}

}  // namespace mpds::oracle
