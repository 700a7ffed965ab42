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

MpdsSystem push_loop()
{
    SystemBuilder b(1);
    auto q = b.state("q");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.push(q, kWildcard, q, 1, a);
    b.set_initial(q);
    return b.build();
}

// Pushes alternately on stack 1 and stack 2.
MpdsSystem alternating()
{
    SystemBuilder b(2);
    auto p = b.state("p"), q = b.state("q");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.push(p, kWildcard, q, 1, a);
    b.push(q, kWildcard, p, 2, a);
    b.set_initial(p);
    return b.build();
}

}  // namespace

TEST(Explore, TransitionFreeSystemIsOneNode)
{
    SystemBuilder b(2);
    b.set_initial(b.state("q"));
    auto sys = b.build();
    auto g = explore(sys, sys.initial_config(), {});
    EXPECT_EQ(g.nodes.size(), 1u);
    EXPECT_TRUE(g.edges.empty());
    EXPECT_FALSE(g.truncated());
}

TEST(Explore, StackCapCutsChain)
{
    auto sys = push_loop();
    ExplorationBounds b;
    b.stack_cap = 3;
    auto g = explore(sys, sys.initial_config(), b);
    ASSERT_EQ(g.nodes.size(), 4u);
    EXPECT_EQ(g.edges.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_FALSE(g.nodes[i].frontier);
    EXPECT_TRUE(g.nodes[3].frontier);
    EXPECT_EQ(g.nodes[3].config.stacks[0].size(), 4u);
}

TEST(Explore, ContextBoundLimitsBlocks)
{
    auto sys = alternating();
    ExplorationBounds b;
    b.context_bound = 2;
    auto g = explore(sys, sys.initial_config(), b);
    std::set<int> seen;
    for (const auto& n : g.nodes) seen.insert(n.contexts);
    EXPECT_EQ(seen, (std::set<int>{0, 1, 2}));
    EXPECT_EQ(g.nodes.size(), 3u);
    EXPECT_TRUE(g.truncated());
    EXPECT_EQ(testkit::as_ref(g).nodes, testkit::enumerate_runs(sys, 2, 64).nodes);
}

TEST(Explore, NodeCapMarksGraphCapped)
{
    auto sys = push_loop();
    ExplorationBounds b;
    b.node_cap = 5;
    auto g = explore(sys, sys.initial_config(), b);
    EXPECT_EQ(g.nodes.size(), 5u);
    EXPECT_TRUE(g.capped);
    EXPECT_TRUE(g.truncated());
}

TEST(Explore, MatchesRunEnumeration)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 60; ++i) {
        auto sys = testkit::random_mpds(rng);
        int k = testkit::pick(rng, 0, 3);
        std::size_t cap = static_cast<std::size_t>(testkit::pick(rng, 0, 5));
        ExplorationBounds b;
        b.context_bound = k;
        b.stack_cap = cap;
        auto got = testkit::as_ref(explore(sys, sys.initial_config(), b));
        auto want = testkit::enumerate_runs(sys, k, cap);
        EXPECT_EQ(got.nodes, want.nodes);
        EXPECT_EQ(got.edges, want.edges);
        EXPECT_EQ(got.frontier, want.frontier);
    }
}

TEST(Explore, Deterministic)
{
    std::mt19937 rng(8);
    auto sys = testkit::random_mpds(rng, 6, 10);
    ExplorationBounds b;
    b.context_bound = 3;
    b.stack_cap = 4;
    auto g1 = explore(sys, sys.initial_config(), b), g2 = explore(sys, sys.initial_config(), b);
    EXPECT_EQ(graph_json(sys, g1).dump(), graph_json(sys, g2).dump());
}

TEST(Reachable, InitialAndUnreachableTargets)
{
    SystemBuilder b(1);
    auto q = b.state("q");
    auto dead = b.state("dead");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.push(q, kWildcard, q, 1, a);
    b.set_initial(q);
    auto sys = b.build();
    auto g = explore(sys, sys.initial_config(), {});
    auto r = reachable(g, [&](StateId s) { return s == q; });
    ASSERT_TRUE(r.reachable);
    EXPECT_TRUE(r.witness->empty());
    auto u = reachable(g, [&](StateId s) { return s == dead; });
    EXPECT_FALSE(u.reachable);
    EXPECT_FALSE(u.witness.has_value());
    EXPECT_TRUE(u.truncated);
}

TEST(Reachable, WitnessReplays)
{
    std::mt19937 rng(21);
    for (int i = 0; i < 100; ++i) {
        auto sys = testkit::random_mpds(rng);
        ExplorationBounds b;
        b.context_bound = 3;
        b.stack_cap = 4;
        auto g = explore(sys, sys.initial_config(), b);
        auto target = static_cast<StateId>(sys.state_count() - 1);
        auto r = reachable(g, [&](StateId s) { return s == target; });
        if (!r.reachable) continue;
        auto c = sys.initial_config();
        for (auto t : *r.witness) c = step(sys, c, sys.transitions()[t]);
        EXPECT_EQ(c.state, target);
        EXPECT_LE(context_count(sys, *r.witness), 3u);
    }
}

TEST(Reachable, EqualCountersNeverReachError)
{
    auto h = testkit::counter_host(1, 2, GuessMode::free);
    CounterParams p{1, 2};
    for (int v = 0; v <= 3; ++v) {
        auto w = h.stack_word(encode_counter(p, v));
        ExplorationBounds b;
        b.context_bound = 3;
        b.stack_cap = w.size();
        Configuration c{h.eq.entry, {w, w}};
        auto g = explore(h.sys, c, b);
        auto err = h.sys.state("q_err");
        EXPECT_FALSE(reachable(g, [&](StateId s) { return s == err; }).reachable) << v;
    }
}

TEST(Stability, ReportsChangedAnswers)
{
    auto sys = push_loop();
    ExplorationBounds b;
    b.stack_cap = 2;
    auto r = check_stability(b, 3, [&](const ExplorationBounds& x) { return explore(sys, sys.initial_config(), x).nodes.size(); });
    EXPECT_EQ(r.answer, 3u);
    EXPECT_EQ(r.answer_raised, 6u);
    EXPECT_FALSE(r.stable);
}
