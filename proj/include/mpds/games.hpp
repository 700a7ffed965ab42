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

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "config_space.hpp"
#include "explorer.hpp"
#include "system.hpp"

namespace mpds {

/// Finite parity game. Player::even is player 0. A position without
/// successors is lost by its owner.
struct ParityGame {
    std::vector<Player> owner;
    std::vector<int> priority;
    std::vector<std::vector<std::uint32_t>> succ;

    std::size_t size() const { return owner.size(); }
    std::uint32_t add(Player p, int prio)
    {
        owner.push_back(p);
        priority.push_back(prio);
        succ.emplace_back();
        return static_cast<std::uint32_t>(owner.size() - 1);
    }
};

inline constexpr std::int32_t kNoMove = -1;

struct Solution {
    std::vector<Player> winner;
    /// Index into succ[v] chosen by the winner, for positions the winner owns
    /// and can move from; kNoMove elsewhere.
    std::vector<std::int32_t> strategy;

    std::vector<std::uint32_t> region(Player p) const
    {
        std::vector<std::uint32_t> out;
        for (std::uint32_t v = 0; v < winner.size(); ++v)
            if (winner[v] == p) out.push_back(v);
        return out;
    }
};

namespace detail {

class Zielonka {
public:
    explicit Zielonka(const ParityGame& g) : g_(g), n_(g.size())
    {
        // Deadlocks are redirected to one of two absorbing sinks so every
        // position has a successor; the sinks are dropped again at the end.
        succ_ = g.succ;
        owner_ = g.owner;
        prio_ = g.priority;
        win_even_ = static_cast<std::uint32_t>(n_);
        win_odd_ = win_even_ + 1;
        owner_.push_back(Player::even);
        prio_.push_back(0);
        succ_.push_back({win_even_});
        owner_.push_back(Player::even);
        prio_.push_back(1);
        succ_.push_back({win_odd_});
        for (std::size_t v = 0; v < n_; ++v)
            if (succ_[v].empty()) succ_[v].push_back(owner_[v] == Player::even ? win_odd_ : win_even_);
        pred_.resize(succ_.size());
        for (std::uint32_t v = 0; v < succ_.size(); ++v)
            for (auto w : succ_[v]) pred_[w].push_back(v);
    }

    Solution run()
    {
        std::vector<std::uint32_t> all(succ_.size());
        for (std::uint32_t v = 0; v < all.size(); ++v) all[v] = v;
        win_.assign(succ_.size(), Player::even);
        move_.assign(succ_.size(), kNoMove);
        in_.assign(succ_.size(), 0);
        solve(all);
        Solution s;
        s.winner.assign(win_.begin(), win_.begin() + static_cast<std::ptrdiff_t>(n_));
        s.strategy.assign(n_, kNoMove);
        for (std::size_t v = 0; v < n_; ++v)
            if (owner_[v] == win_[v] && !g_.succ[v].empty()) s.strategy[v] = move_[v];
        return s;
    }

private:
    // Attractor of target for p inside the positions flagged in_ == mark.
    std::vector<std::uint32_t> attract(const std::vector<std::uint32_t>& target, Player p, char mark)
    {
        std::vector<std::uint32_t> out = target;
        std::deque<std::uint32_t> queue(target.begin(), target.end());
        for (auto v : target) in_[v] = static_cast<char>(mark + 1);
        std::unordered_map<std::uint32_t, std::size_t> left;
        while (!queue.empty()) {
            auto w = queue.front();
            queue.pop_front();
            for (auto v : pred_[w]) {
                if (in_[v] != mark) continue;
                bool take = false;
                if (owner_[v] == p) {
                    take = true;
                } else {
                    auto [it, fresh] = left.try_emplace(v, 0);
                    if (fresh)
                        for (auto x : succ_[v])
                            if (in_[x] == mark || in_[x] == mark + 1) ++it->second;
                    take = --it->second == 0;
                }
                if (!take) continue;
                // Pick the move before v itself joins, so a self-loop is never chosen.
                if (owner_[v] == p) {
                    for (std::size_t e = 0; e < succ_[v].size(); ++e)
                        if (in_[succ_[v][e]] == mark + 1) {
                            move_[v] = static_cast<std::int32_t>(e);
                            break;
                        }
                }
                in_[v] = static_cast<char>(mark + 1);
                out.push_back(v);
                queue.push_back(v);
            }
        }
        for (auto v : out) in_[v] = mark;
        return out;
    }

    void solve(const std::vector<std::uint32_t>& a)
    {
        if (a.empty()) return;
        for (auto v : a) in_[v] = 1;
        int top = -1;
        for (auto v : a) top = std::max(top, prio_[v]);
        Player alpha = top % 2 == 0 ? Player::even : Player::odd;
        std::vector<std::uint32_t> u;
        for (auto v : a)
            if (prio_[v] == top) u.push_back(v);
        auto attr = attract(u, alpha, 1);
        std::vector<char> in_attr(succ_.size(), 0);
        for (auto v : attr) in_attr[v] = 1;
        std::vector<std::uint32_t> rest;
        for (auto v : a)
            if (!in_attr[v]) rest.push_back(v);
        for (auto v : a) in_[v] = 0;
        solve(rest);
        std::vector<std::uint32_t> lost;
        for (auto v : rest)
            if (win_[v] != alpha) lost.push_back(v);
        if (lost.empty()) {
            for (auto v : a) win_[v] = alpha;
            for (auto v : u)
                if (owner_[v] == alpha) move_[v] = first_inside(v, a);
            return;
        }
        for (auto v : a) in_[v] = 1;
        auto b = attract(lost, opponent(alpha), 1);
        std::vector<char> in_b(succ_.size(), 0);
        for (auto v : b) in_b[v] = 1;
        std::vector<std::uint32_t> rest2;
        for (auto v : a)
            if (!in_b[v]) rest2.push_back(v);
        for (auto v : a) in_[v] = 0;
        for (auto v : b) win_[v] = opponent(alpha);
        solve(rest2);
    }

    std::int32_t first_inside(std::uint32_t v, const std::vector<std::uint32_t>& a)
    {
        for (auto x : a) in_[x] = 3;
        std::int32_t pick = kNoMove;
        for (std::size_t e = 0; e < succ_[v].size(); ++e)
            if (in_[succ_[v][e]] == 3) {
                pick = static_cast<std::int32_t>(e);
                break;
            }
        for (auto x : a) in_[x] = 0;
        return pick;
    }

    const ParityGame& g_;
    std::size_t n_;
    std::uint32_t win_even_ = 0, win_odd_ = 0;
    std::vector<std::vector<std::uint32_t>> succ_, pred_;
    std::vector<Player> owner_;
    std::vector<int> prio_;
    std::vector<Player> win_;
    std::vector<std::int32_t> move_;
    std::vector<char> in_;
};

}  // namespace detail

/// Zielonka's recursive algorithm with memoryless strategy extraction.
/// Ties between strategy edges go to the lowest successor index.
inline Solution solve_parity(const ParityGame& g)
{
    for (auto p : g.priority)
        if (p < 0) throw std::invalid_argument("negative priority");
    return detail::Zielonka(g).run();
}

/// Checks that sol.strategy keeps each winner inside its region and that
/// every cycle consistent with it has the winner's parity.
inline bool verify_strategy(const ParityGame& g, const Solution& sol)
{
    const auto n = g.size();
    if (sol.winner.size() != n || sol.strategy.size() != n) return false;
    for (int side = 0; side < 2; ++side) {
        Player p = side == 0 ? Player::even : Player::odd;
        // Restricted graph on p's region: p's positions follow the strategy,
        // the opponent keeps every move.
        std::vector<std::vector<std::uint32_t>> r(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            if (sol.winner[v] != p) continue;
            if (g.owner[v] == p) {
                if (g.succ[v].empty()) return false;
                auto e = sol.strategy[v];
                if (e < 0 || static_cast<std::size_t>(e) >= g.succ[v].size()) return false;
                auto w = g.succ[v][static_cast<std::size_t>(e)];
                if (sol.winner[w] != p) return false;
                r[v].push_back(w);
            } else {
                for (auto w : g.succ[v]) {
                    if (sol.winner[w] != p) return false;
                    r[v].push_back(w);
                }
            }
        }
        // A losing cycle exists iff for some priority d of the wrong parity,
        // some position of priority d lies on a cycle among positions <= d.
        int wrong = side == 0 ? 1 : 0;
        for (std::uint32_t s = 0; s < n; ++s) {
            if (sol.winner[s] != p || g.priority[s] % 2 != wrong) continue;
            int d = g.priority[s];
            std::vector<char> seen(n, 0);
            std::vector<std::uint32_t> stack{s};
            while (!stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                for (auto w : r[v]) {
                    if (g.priority[w] > d) continue;
                    if (w == s) return false;
                    if (!seen[w]) {
                        seen[w] = 1;
                        stack.push_back(w);
                    }
                }
            }
        }
    }
    return true;
}

/// Position (c, i, k) of the bounded-phase game; stacks are StackStore ids.
struct GamePosition {
    StateId state;
    std::vector<StackStore::Id> stacks;
    int current = 0;
    int phases_left = 1;
    bool operator==(const GamePosition&) const = default;
};

struct GameGraph {
    ParityGame game;
    std::vector<GamePosition> positions;
    std::vector<std::vector<std::uint32_t>> transitions;  // parallel to game.succ
    std::vector<char> frontier;
    bool capped = false;
    int phase_bound = 1;
    StackStore store;

    std::size_t size() const { return positions.size(); }
    Configuration config(std::uint32_t p) const
    {
        Configuration c;
        c.state = positions.at(p).state;
        for (auto w : positions[p].stacks) c.stacks.push_back(store.word(w));
        return c;
    }
    bool truncated() const { return capped || std::find(frontier.begin(), frontier.end(), 1) != frontier.end(); }
    int max_phases_seen() const
    {
        // Any move at all happens inside the first phase.
        int m = positions.size() > 1 ? 1 : 0;
        for (const auto& p : positions)
            if (p.current != 0) m = std::max(m, phase_bound - p.phases_left + 1);
        return m;
    }
    std::optional<std::uint32_t> find(const Configuration& c, int current, int phases_left) const
    {
        for (std::uint32_t p = 0; p < positions.size(); ++p) {
            const auto& x = positions[p];
            if (x.state != c.state || x.current != current || x.phases_left != phases_left) continue;
            bool same = true;
            for (std::size_t s = 0; s < x.stacks.size() && same; ++s) same = store.word(x.stacks[s]) == c.stacks[s];
            if (same) return p;
        }
        return std::nullopt;
    }
};

namespace detail {

inline bool over_letter_cap(const StackStore& store, StackStore::Id w, SymbolId sym,
                            const std::vector<std::pair<SymbolId, std::size_t>>& caps)
{
    for (const auto& [letter, cap] : caps) {
        if (letter != sym) continue;
        std::size_t n = 0;
        for (; w != 0; w = store.rest(w)) n += store.top(w) == sym;
        return n + 1 > cap;
    }
    return false;
}

struct PositionHash {
    std::size_t operator()(const GamePosition& p) const
    {
        std::size_t h = p.state * 0x9e3779b97f4a7c15ull;
        for (auto w : p.stacks) h = (h ^ w) * 0x100000001b3ull;
        h = (h ^ static_cast<std::size_t>(p.current)) * 0x100000001b3ull;
        return h ^ static_cast<std::size_t>(p.phases_left);
    }
};

}  // namespace detail

/// Breadth-first closure of (init, 0, phase_bound) under the four edge rules:
/// non-pop moves keep (i, k); the first pop fixes i; pops on i keep k; a pop
/// on another stack needs k > 1 and costs one phase. Pushes beyond the stack
/// cap and positions beyond node_cap are suppressed and flagged frontier.
inline GameGraph build_phase_game(const MpdsSystem& sys, const Configuration& init, int phase_bound,
                                  const ExplorationBounds& caps)
{
    if (phase_bound < 1) throw std::invalid_argument("phase bound must be at least 1");
    if (!well_formed(sys, init)) throw std::invalid_argument("initial configuration is not well formed");
    if (!validate(sys).empty()) throw std::invalid_argument("system is not well formed: " + validate(sys).front());
    GameGraph g;
    g.phase_bound = phase_bound;
    auto bounds = caps.space();
    std::unordered_map<GamePosition, std::uint32_t, detail::PositionHash> ids;

    auto add = [&](GamePosition p) -> std::optional<std::uint32_t> {
        if (auto it = ids.find(p); it != ids.end()) return it->second;
        if (g.positions.size() >= caps.node_cap) return std::nullopt;
        auto id = g.game.add(sys.owner(p.state), sys.priority(p.state));
        g.transitions.emplace_back();
        g.frontier.push_back(0);
        ids.emplace(p, id);
        g.positions.push_back(std::move(p));
        return id;
    };

    GamePosition root{init.state, {}, 0, phase_bound};
    for (const auto& w : init.stacks) root.stacks.push_back(g.store.intern(w));
    add(root);

    for (std::uint32_t head = 0; head < g.positions.size(); ++head) {
        for (auto ti : sys.outgoing(g.positions[head].state)) {
            const auto& t = sys.transitions()[ti];
            GamePosition next = g.positions[head];
            next.state = t.to;
            if (t.kind != TransKind::internal) {
                auto& w = next.stacks[static_cast<std::size_t>(t.stack - 1)];
                SymbolId top = g.store.top(w);
                if (t.kind == TransKind::pop) {
                    if (w == 0 || top != t.symbol) continue;
                    w = g.store.rest(w);
                    if (next.current == 0) {
                        next.current = t.stack;
                    } else if (next.current != t.stack) {
                        if (next.phases_left <= 1) continue;
                        next.current = t.stack;
                        next.phases_left -= 1;
                    }
                } else {
                    if (t.guard != kWildcard && static_cast<SymbolId>(t.guard) != top) continue;
                    if (t.kind == TransKind::push) {
                        if (g.store.height(w) + 1 > bounds.cap_for(t.stack) ||
                            detail::over_letter_cap(g.store, w, t.symbol, caps.letter_caps)) {
                            g.frontier[head] = 1;
                            continue;
                        }
                        w = g.store.push(w, t.symbol);
                    }
                }
            }
            auto id = add(std::move(next));
            if (!id) {
                g.capped = true;
                g.frontier[head] = 1;
                continue;
            }
            g.game.succ[head].push_back(*id);
            g.transitions[head].push_back(ti);
        }
    }
    return g;
}

inline Player winner_from(const GameGraph& g, const Solution& s, std::uint32_t position)
{
    if (position >= g.size()) throw std::out_of_range("unknown game position");
    return s.winner[position];
}

}  // namespace mpds
