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

struct Toy {
    MpdsSystem sys;
    SymbolId a = 0, b = 0;
};

// q --internal--> q', q --push(a|b) on 1--> q', q --pop a on 1--> q', plus
// a guard-mismatched push from r.
Toy toy()
{
    SystemBuilder bld(2);
    auto q = bld.state("q"), q2 = bld.state("q'"), r = bld.state("r");
    Toy t;
    t.a = bld.symbol(StackSymbol::letter("a"));
    t.b = bld.symbol(StackSymbol::letter("b"));
    bld.internal(q, q2);
    bld.push(q, static_cast<std::int32_t>(t.a), q2, 1, t.b);
    bld.pop(q, t.a, q2, 1);
    bld.internal(r, q);
    bld.push(r, static_cast<std::int32_t>(t.a), q, 1, t.b);
    bld.set_initial(q);
    t.sys = bld.build();
    return t;
}

// One state, one transition per kind and stack, all self-loops.
MpdsSystem letter_system(std::vector<std::uint32_t>& push1, std::vector<std::uint32_t>& push2,
                         std::vector<std::uint32_t>& pop1, std::vector<std::uint32_t>& pop2,
                         std::uint32_t& internal)
{
    SystemBuilder b(2);
    auto q = b.state("q");
    auto a = b.symbol(StackSymbol::letter("a"));
    b.push(q, kWildcard, q, 1, a);
    b.push(q, kWildcard, q, 2, a);
    b.pop(q, a, q, 1);
    b.pop(q, a, q, 2);
    b.internal(q, q);
    b.set_initial(q);
    push1 = {0};
    push2 = {1};
    pop1 = {2};
    pop2 = {3};
    internal = 4;
    return b.build();
}

}  // namespace

TEST(Step, InternalLeavesStacks)
{
    auto t = toy();
    auto c = make_config(t.sys.state("q"), {{}, {}});
    auto d = step(t.sys, c, t.sys.transitions()[0]);
    EXPECT_EQ(d, make_config(t.sys.state("q'"), {{}, {}}));
}

TEST(Step, PushPrependsLetter)
{
    auto t = toy();
    auto c = make_config(t.sys.state("q"), {{t.a}, {}});
    auto d = step(t.sys, c, t.sys.transitions()[1]);
    EXPECT_EQ(d, make_config(t.sys.state("q'"), {{t.b, t.a}, {}}));
}

TEST(Step, PopRemovesTop)
{
    auto t = toy();
    auto c = make_config(t.sys.state("q"), {{t.a}, {}});
    EXPECT_EQ(step(t.sys, c, t.sys.transitions()[2]), make_config(t.sys.state("q'"), {{}, {}}));
}

TEST(Step, RejectsDisabledMoves)
{
    auto t = toy();
    auto empty = make_config(t.sys.state("q"), {{}, {}});
    try {
        step(t.sys, empty, t.sys.transitions()[2]);
        FAIL();
    } catch (const StepError& e) {
        EXPECT_EQ(e.kind(), StepErrorKind::pop_on_bottom);
    }
    EXPECT_THROW(step(t.sys, empty, t.sys.transitions()[1]), StepError);
    EXPECT_THROW(step(t.sys, make_config(t.sys.state("r"), {{}, {}}), t.sys.transitions()[0]), StepError);
}

TEST(Successors, FiltersByStateAndGuard)
{
    auto t = toy();
    EXPECT_TRUE(successors(t.sys, make_config(t.sys.state("q'"), {{}, {}})).empty());
    EXPECT_EQ(successors(t.sys, make_config(t.sys.state("r"), {{}, {}})).size(), 1u);
    EXPECT_EQ(successors(t.sys, make_config(t.sys.state("q"), {{t.a}, {}})).size(), 3u);
}

TEST(Successors, QuantifierStateBranchesTwice)
{
    auto g = compile_fo(to_nnf(parse_fo("E x. x=x")));
    auto next = successors(g.system, g.initial());
    ASSERT_EQ(next.size(), 2u);
    std::set<std::string> names;
    for (const auto& [i, c] : next) names.insert(g.system.state_name(c.state));
    EXPECT_EQ(names, (std::set<std::string>{"(E x. x=x,<)", "(E x. x=x,>)"}));
}

TEST(ContextCount, Examples)
{
    std::vector<std::uint32_t> p1, p2, o1, o2;
    std::uint32_t in = 0;
    auto sys = letter_system(p1, p2, o1, o2, in);
    EXPECT_EQ(context_count(sys, std::vector<std::uint32_t>{}), 0u);
    EXPECT_EQ(context_count(sys, std::vector<std::uint32_t>{p1[0], p2[0], p1[0]}), 3u);
    EXPECT_EQ(context_count(sys, std::vector<std::uint32_t>{in, o1[0], in, o1[0]}), 1u);
}

TEST(PhaseCount, Examples)
{
    std::vector<std::uint32_t> p1, p2, o1, o2;
    std::uint32_t in = 0;
    auto sys = letter_system(p1, p2, o1, o2, in);
    EXPECT_EQ(phase_count(sys, std::vector<std::uint32_t>{o1[0], p2[0], o2[0], o1[0]}), 3u);
    EXPECT_EQ(phase_count(sys, std::vector<std::uint32_t>{o1[0], p2[0], o1[0], o1[0]}), 1u);
}

TEST(ContextCount, GreedyIsMinimalAndBoundsPhases)
{
    std::vector<std::uint32_t> p1, p2, o1, o2;
    std::uint32_t in = 0;
    auto sys = letter_system(p1, p2, o1, o2, in);
    std::mt19937 rng(11);
    for (int it = 0; it < 2000; ++it) {
        std::vector<std::uint32_t> w(static_cast<std::size_t>(testkit::pick(rng, 0, 8)));
        for (auto& x : w) x = static_cast<std::uint32_t>(testkit::pick(rng, 0, 4));
        auto c = context_count(sys, w), p = phase_count(sys, w);
        EXPECT_EQ(c, testkit::min_blocks_exhaustive(sys, w, false));
        EXPECT_EQ(p, testkit::min_blocks_exhaustive(sys, w, true));
        EXPECT_LE(p, c);
        auto blocks = context_decomposition(sys, w);
        EXPECT_EQ(blocks.size(), w.empty() ? 0u : c);
    }
}

TEST(ContextCount, RejectsUnchainableWords)
{
    auto t = toy();
    EXPECT_THROW(context_count(t.sys, std::vector<std::uint32_t>{0, 0}), std::invalid_argument);
}

TEST(Validate, Diagnostics)
{
    EXPECT_TRUE(validate(toy().sys).empty());
    SystemBuilder b(1);
    auto q = b.state("q");
    b.internal(q, 7);
    b.set_initial(q);
    EXPECT_EQ(validate(b.build()).size(), 1u);

    SystemBuilder g(1);
    auto p0 = g.state("p0");
    g.state("p1");
    g.set_initial(p0);
    g.set_raw_game_maps(std::vector<Player>{Player::even}, std::vector<int>{0, 0});
    EXPECT_EQ(validate(g.build()).size(), 1u);
}
