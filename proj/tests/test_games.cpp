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
#include <gtest/gtest.h>

#include "support.hpp"

using namespace mpds;

namespace {

// Pops on both stacks from a pre-filled configuration.
MpdsSystem two_pop_game()
{
    SystemBuilder b(2);
    auto p = b.state("p"), q = b.state("q"), r = b.state("r");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.pop(p, a, q, 1);
    b.pop(q, a, r, 2);
    b.pop(r, a, r, 1);
    b.pop(p, a, r, 2);
    b.push(q, kWildcard, q, 2, a);
    b.set_initial(p);
    b.set_owner(p, Player::even);
    b.complete_game_maps(Player::odd, 0);
    return b.build();
}

}  // namespace

TEST(Zielonka, DeadlockOwnerLoses)
{
    ParityGame g;
    g.add(Player::odd, 0);
    EXPECT_EQ(solve_parity(g).winner[0], Player::even);
    ParityGame h;
    h.add(Player::even, 2);
    EXPECT_EQ(solve_parity(h).winner[0], Player::odd);
}

TEST(Zielonka, SelfLoopParity)
{
    ParityGame g;
    g.add(Player::odd, 0);
    g.succ[0] = {0};
    EXPECT_EQ(solve_parity(g).winner[0], Player::even);
    ParityGame h;
    h.add(Player::even, 1);
    h.succ[0] = {0};
    EXPECT_EQ(solve_parity(h).winner[0], Player::odd);
}

TEST(Zielonka, AgreesWithBruteForce)
{
    std::mt19937 rng(13);
    for (int i = 0; i < 150; ++i) {
        auto g = testkit::random_game(rng, 7, 3);
        auto s = solve_parity(g);
        auto o = oracle::parity_brute(g);
        EXPECT_EQ(s.winner, o.winner);
        EXPECT_TRUE(verify_strategy(g, s));
        EXPECT_TRUE(verify_strategy(g, o));
    }
}

TEST(Zielonka, VerifierRejectsBadStrategies)
{
    ParityGame g;
    g.add(Player::even, 0);
    g.add(Player::even, 1);
    g.add(Player::even, 0);
    g.succ = {{1, 2}, {1}, {2}};
    auto s = solve_parity(g);
    EXPECT_EQ(s.winner[0], Player::even);
    auto bad = s;
    bad.strategy[0] = 0;  // toward the odd loop
    EXPECT_FALSE(verify_strategy(g, bad));
}

TEST(PhaseGame, PopFreeSystemNeverSpendsPhases)
{
    SystemBuilder b(2);
    auto p = b.state("p");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.push(p, kWildcard, p, 1, a);
    b.push(p, kWildcard, p, 2, a);
    b.set_initial(p);
    b.complete_game_maps(Player::even, 0);
    auto sys = b.build();
    ExplorationBounds caps;
    caps.stack_cap = 3;
    auto g = build_phase_game(sys, sys.initial_config(), 2, caps);
    for (const auto& pos : g.positions) EXPECT_EQ(pos.phases_left, 2);
    EXPECT_EQ(g.max_phases_seen(), 1);
}

TEST(PhaseGame, LastPhaseBlocksOtherStack)
{
    auto sys = two_pop_game();
    auto a = sys.symbol_id(StackSymbol::letter("a"));
    Configuration c = make_config(sys.initial(), {{a}, {a}});
    auto g = build_phase_game(sys, c, 1, {});
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const auto& pos = g.positions[v];
        if (pos.current != 1) continue;
        for (auto t : g.transitions[v]) EXPECT_FALSE(sys.transitions()[t].is_pop() && sys.transitions()[t].stack == 2);
    }
}

TEST(PhaseGame, TwoPhasesDecrementOnceAlongPaths)
{
    auto sys = two_pop_game();
    auto a = sys.symbol_id(StackSymbol::letter("a"));
    Configuration c = make_config(sys.initial(), {{a, a}, {a}});
    ExplorationBounds caps;
    caps.stack_cap = 3;
    auto g = build_phase_game(sys, c, 2, caps);
    for (std::uint32_t v = 0; v < g.size(); ++v)
        for (auto w : g.game.succ[v]) {
            int drop = g.positions[v].phases_left - g.positions[w].phases_left;
            EXPECT_TRUE(drop == 0 || drop == 1);
        }
    int lowest = 2;
    for (const auto& pos : g.positions) lowest = std::min(lowest, pos.phases_left);
    EXPECT_EQ(lowest, 1);
}

TEST(PhaseGame, WinnerFromFoGame)
{
    auto g = compile_fo(to_nnf(parse_fo("E x. E y. x<y")));
    EXPECT_EQ(solve_fo_game(g, 4).winner, Player::even);
    auto h = compile_fo(to_nnf(parse_fo("A x. E y. x<y")));
    EXPECT_EQ(solve_fo_game(h, 4).winner, Player::odd);
}

TEST(PhaseGame, LetterCapSuppressesPushes)
{
    SystemBuilder b(1);
    auto p = b.state("p");
    auto a = b.symbol(StackSymbol::letter("a"));
    auto c = b.symbol(StackSymbol::letter("c"));
    b.push(p, kWildcard, p, 1, a);
    b.push(p, kWildcard, p, 1, c);
    b.set_initial(p);
    b.complete_game_maps(Player::even, 0);
    auto sys = b.build();
    ExplorationBounds caps;
    caps.stack_cap = 4;
    caps.letter_caps = {{a, 1}};
    auto g = build_phase_game(sys, sys.initial_config(), 1, caps);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        auto w = g.config(v).stacks[0];
        EXPECT_LE(std::count(w.begin(), w.end(), a), 1);
    }
}
