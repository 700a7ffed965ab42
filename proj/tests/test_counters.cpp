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

CounterWord parse_word(const std::string& text)
{
    CounterWord w;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) w.push_back(StackSymbol::parse(tok));
    return w;
}

// Definition-direct value of a level-k word: the bit at address i, read as
// binary; independent of decode_counter.
std::optional<BigNat> reference_value(const CounterParams& p, const CounterWord& w);

std::optional<BigNat> reference_value(int k, int n, const CounterWord& w, std::size_t& pos)
{
    if (k == 1) {
        BigNat v = 0;
        for (int i = 0; i < n; ++i, ++pos) {
            if (pos >= w.size() || !(w[pos].kind == SymbolKind::counter_bit && w[pos].level == 1)) return std::nullopt;
            v = v * 2 + (w[pos].one ? 1 : 0);
        }
        return v;
    }
    auto bits = max_value({k - 1, n}) + 1;
    BigNat v = 0;
    for (BigNat expect = bits; expect > 0; --expect) {
        auto addr = reference_value(k - 1, n, w, pos);
        if (!addr || *addr != expect - 1) return std::nullopt;
        if (pos >= w.size() || !(w[pos].kind == SymbolKind::counter_bit && w[pos].level == k)) return std::nullopt;
        v = v * 2 + (w[pos].one ? 1 : 0);
        ++pos;
    }
    return v;
}

std::optional<BigNat> reference_value(const CounterParams& p, const CounterWord& w)
{
    std::size_t pos = 0;
    auto v = reference_value(p.level, p.base, w, pos);
    if (pos != w.size()) return std::nullopt;
    return v;
}

}  // namespace

TEST(Counters, TowerAndMax)
{
    EXPECT_EQ(tower(1), 1);
    EXPECT_EQ(tower(2), 2);
    EXPECT_EQ(tower(3), 4);
    EXPECT_EQ(tower(4), 16);
    EXPECT_EQ(max_value({1, 3}), 7);
    EXPECT_EQ(max_value({2, 2}), 15);
    EXPECT_EQ(max_value({2, 1}), 3);
    EXPECT_EQ(max_value({3, 1}), 15);
}

TEST(Counters, Encodings)
{
    EXPECT_EQ(spell(encode_counter({1, 3}, 0)), "a1 a1 a1");
    EXPECT_EQ(spell(encode_counter({1, 3}, 5)), "b1 a1 b1");
    EXPECT_EQ(spell(encode_counter({2, 2}, 5)), "b1 b1 a2 b1 a1 b2 a1 b1 a2 a1 a1 b2");
    EXPECT_THROW(encode_counter({1, 2}, 4), std::out_of_range);
}

TEST(Counters, ExhaustiveRoundTrip)
{
    for (int k = 1; k <= 2; ++k)
        for (int n = 1; n <= 2; ++n) {
            CounterParams p{k, n};
            for (BigNat v = 0; v <= max_value(p); ++v) {
                auto w = encode_counter(p, v);
                EXPECT_TRUE(is_valid_counter(p, w));
                EXPECT_EQ(decode_counter(p, w), v);
                EXPECT_EQ(reference_value(p, w), v);
            }
        }
}

TEST(Counters, ValidityMatchesDefinitionUnderMutation)
{
    std::mt19937 rng(9);
    CounterParams p{2, 2};
    std::vector<StackSymbol> letters{StackSymbol::bit(1, false), StackSymbol::bit(1, true), StackSymbol::bit(2, false),
                                     StackSymbol::bit(2, true), StackSymbol::separator()};
    for (int i = 0; i < 1000; ++i) {
        auto w = encode_counter(p, testkit::pick(rng, 0, 15));
        w[static_cast<std::size_t>(testkit::pick(rng, 0, static_cast<int>(w.size()) - 1))] =
            letters[static_cast<std::size_t>(testkit::pick(rng, 0, 4))];
        EXPECT_EQ(is_valid_counter(p, w), reference_value(p, w).has_value()) << spell(w);
    }
    auto five = encode_counter(p, 5);
    five[0] = StackSymbol::bit(1, false);  // address 3 becomes 1
    EXPECT_FALSE(is_valid_counter(p, five));
}

TEST(Counters, Increment)
{
    EXPECT_EQ(increment_counter({1, 3}, encode_counter({1, 3}, 3)), encode_counter({1, 3}, 4));
    for (BigNat v = 0; v < 15; ++v) EXPECT_EQ(decode_counter({2, 2}, increment_counter({2, 2}, encode_counter({2, 2}, v))), v + 1);
    EXPECT_THROW(increment_counter({1, 2}, encode_counter({1, 2}, 3)), std::overflow_error);
    EXPECT_THROW(decode_counter({1, 2}, parse_word("a1")), std::invalid_argument);
}

TEST(Counters, ScaleGuard)
{
    EXPECT_NO_THROW(check_scale({3, 2}));
    EXPECT_THROW(check_scale({5, 2}), ScaleError);
    EXPECT_THROW(check_scale({0, 2}), std::invalid_argument);
}
