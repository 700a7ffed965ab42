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

struct Verdicts {
    bool eq, succ, valid, max, min;
};

class GadgetRig {
public:
    GadgetRig(int k, int n, GuessMode mode) : h_(testkit::counter_host(k, n, mode)), p_{k, n}
    {
        SpaceBounds sb;
        sb.context_bound = 2 * k + 2;
        sb.stack_cap = h_.stack_word(encode_counter(p_, 0)).size();
        space_ = std::make_unique<ConfigSpace>(h_.sys, sb);
        lc_ = std::make_unique<LocalChecker>(*space_);
    }

    Verdicts at(const BigNat& u, const BigNat& v)
    {
        return at_words(h_.stack_word(encode_counter(p_, u)), h_.stack_word(encode_counter(p_, v)));
    }
    Verdicts at_words(const std::vector<SymbolId>& w1, const std::vector<SymbolId>& w2)
    {
        auto root = space_->intern(Configuration{h_.host, {w1, w2}});
        return {lc_->holds(root, h_.eq.formula), lc_->holds(root, h_.succ.formula), lc_->holds(root, h_.valid.formula),
                lc_->holds(root, h_.max.formula), lc_->holds(root, h_.min.formula)};
    }
    int max_contexts() const { return space_->max_contexts_seen(); }
    const testkit::CounterHost& host() const { return h_; }
    const CounterParams& params() const { return p_; }

private:
    testkit::CounterHost h_;
    CounterParams p_;
    std::unique_ptr<ConfigSpace> space_;
    std::unique_ptr<LocalChecker> lc_;
};

void exhaustive(int k, int n, GuessMode mode)
{
    GadgetRig rig(k, n, mode);
    auto m = max_value(rig.params());
    for (BigNat u = 0; u <= m; ++u)
        for (BigNat v = 0; v <= m; ++v) {
            auto r = rig.at(u, v);
            EXPECT_EQ(r.eq, u != v);
            EXPECT_EQ(r.succ, v != u + 1) << u << " " << v;
            EXPECT_FALSE(r.valid);
            EXPECT_EQ(r.max, u != m);
            EXPECT_EQ(r.min, u != 0);
        }
    EXPECT_LE(rig.max_contexts(), 2 * k);
}

}  // namespace

TEST(Gadgets, Level2Examples)
{
    GadgetRig rig(2, 2, GuessMode::shaped);
    EXPECT_FALSE(rig.at(5, 5).eq);
    EXPECT_FALSE(rig.at(5, 6).succ);
    EXPECT_TRUE(rig.at(6, 5).succ);
    EXPECT_FALSE(rig.at(15, 0).max);
    EXPECT_TRUE(rig.at(14, 0).max);
}

TEST(Gadgets, ExhaustiveLevel1)
{
    exhaustive(1, 2, GuessMode::free);
    exhaustive(1, 3, GuessMode::free);
}

TEST(Gadgets, ExhaustiveLevel2Shaped) { exhaustive(2, 2, GuessMode::shaped); }

TEST(Gadgets, ExhaustiveLevel2FreeSmallBase) { exhaustive(2, 1, GuessMode::free); }

TEST(Gadgets, ValidRejectsExactlyTheInvalidWords)
{
    GadgetRig rig(2, 2, GuessMode::shaped);
    const auto& h = rig.host();
    std::mt19937 rng(31);
    std::vector<StackSymbol> letters{StackSymbol::bit(1, false), StackSymbol::bit(1, true), StackSymbol::bit(2, false),
                                     StackSymbol::bit(2, true)};
    auto zero = h.stack_word(encode_counter(rig.params(), 0));
    for (int i = 0; i < 200; ++i) {
        auto w = encode_counter(rig.params(), testkit::pick(rng, 0, 15));
        w[static_cast<std::size_t>(testkit::pick(rng, 0, static_cast<int>(w.size()) - 1))] =
            letters[static_cast<std::size_t>(testkit::pick(rng, 0, 3))];
        EXPECT_EQ(rig.at_words(h.stack_word(w), zero).valid, !is_valid_counter(rig.params(), w)) << spell(w);
    }
}

TEST(Gadgets, ShapedGuessesAgreeWithFree)
{
    GadgetRig free(1, 2, GuessMode::free), shaped(1, 2, GuessMode::shaped);
    for (int u = 0; u <= 3; ++u)
        for (int v = 0; v <= 3; ++v) {
            auto a = free.at(u, v), b = shaped.at(u, v);
            EXPECT_EQ(std::tie(a.eq, a.succ, a.valid, a.max, a.min), std::tie(b.eq, b.succ, b.valid, b.max, b.min));
        }
}

TEST(Gadgets, FormulasOnExploredGraphMatchNaiveOracle)
{
    auto h = testkit::counter_host(1, 2, GuessMode::free);
    CounterParams p{1, 2};
    ExplorationBounds b;
    b.context_bound = 4;
    b.stack_cap = h.stack_word(encode_counter(p, 0)).size();
    Configuration c{h.host, {h.stack_word(encode_counter(p, 2)), h.stack_word(encode_counter(p, 3))}};
    auto cg = explore(h.sys, c, b);
    ASSERT_LE(cg.nodes.size(), 1000u);
    auto g = LabeledGraph::from(cg, h.sys);
    for (const auto* gadget : {&h.eq, &h.succ, &h.valid, &h.max, &h.min}) {
        auto naive = oracle::ctl_eval_naive(g, gadget->formula);
        EXPECT_EQ(holds(g, 0, gadget->formula), naive[0] != 0);
    }
}
