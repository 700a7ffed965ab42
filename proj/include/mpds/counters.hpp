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

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symbol.hpp"

namespace mpds {

using BigNat = boost::multiprecision::cpp_int;

/// Level-k counters over base width n. A counter word is top-first and
/// carries no terminator.
struct CounterParams {
    int level = 1;
    int base = 1;
};

using CounterWord = std::vector<StackSymbol>;

class ScaleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kMaxCounterBits = 1u << 16;

/// Number of bit positions of a level-k counter, or nullopt when it
/// exceeds kMaxCounterBits.
inline std::optional<std::uint64_t> counter_bits(const CounterParams& p)
{
    if (p.level < 1 || p.base < 1) throw std::invalid_argument("counter level and base must be at least 1");
    std::uint64_t bits = static_cast<std::uint64_t>(p.base);
    if (bits > kMaxCounterBits) return std::nullopt;
    for (int k = 2; k <= p.level; ++k) {
        // bits(k) = Max(k-1) + 1 = 2^bits(k-1)
        if (bits >= 17) return std::nullopt;
        bits = std::uint64_t{1} << bits;
    }
    return bits;
}

inline void check_scale(const CounterParams& p)
{
    if (!counter_bits(p))
        throw ScaleError("level " + std::to_string(p.level) + " counters over base " + std::to_string(p.base) +
                         " exceed the supported size");
}

inline BigNat max_value(const CounterParams& p)
{
    check_scale(p);
    BigNat one = 1;
    return (one << static_cast<unsigned>(*counter_bits(p))) - 1;
}

/// Tower of twos: Tow(1) = 1, Tow(k) = 2^Tow(k-1).
inline BigNat tower(int k)
{
    if (k < 1 || k > 5) throw std::invalid_argument("tower is only tabulated for 1 <= k <= 5");
    BigNat t = 1;
    for (int i = 2; i <= k; ++i) t = BigNat(1) << static_cast<unsigned>(t);
    return t;
}

inline bool is_bit(const StackSymbol& s, int level)
{
    return s.kind == SymbolKind::counter_bit && s.level == level;
}

inline bool is_counter_letter(const StackSymbol& s, int max_level)
{
    return s.kind == SymbolKind::counter_bit && s.level >= 1 && s.level <= max_level;
}

inline CounterWord encode_counter(const CounterParams& p, const BigNat& v)
{
    check_scale(p);
    if (v < 0 || v > max_value(p)) throw std::out_of_range("value does not fit the counter");
    auto bits = *counter_bits(p);
    CounterWord w;
    if (p.level == 1) {
        for (auto i = bits; i-- > 0;) w.push_back(StackSymbol::bit(1, boost::multiprecision::bit_test(v, static_cast<unsigned>(i))));
        return w;
    }
    CounterParams inner{p.level - 1, p.base};
    for (auto i = bits; i-- > 0;) {
        auto addr = encode_counter(inner, BigNat(i));
        w.insert(w.end(), addr.begin(), addr.end());
        w.push_back(StackSymbol::bit(p.level, boost::multiprecision::bit_test(v, static_cast<unsigned>(i))));
    }
    return w;
}

namespace detail {

// Splits a level-k word into (address, bit) blocks, top-first. Fails if a
// letter is foreign or the word does not end in a level-k bit.
inline std::optional<std::vector<std::pair<CounterWord, bool>>> counter_blocks(const CounterParams& p,
                                                                               const CounterWord& w)
{
    std::vector<std::pair<CounterWord, bool>> blocks;
    CounterWord cur;
    for (const auto& s : w) {
        if (is_bit(s, p.level)) {
            blocks.emplace_back(std::move(cur), s.one);
            cur.clear();
        } else if (is_counter_letter(s, p.level - 1)) {
            cur.push_back(s);
        } else {
            return std::nullopt;
        }
    }
    if (!cur.empty()) return std::nullopt;
    return blocks;
}

inline std::optional<BigNat> decode_checked(const CounterParams& p, const CounterWord& w)
{
    auto bits = *counter_bits(p);
    if (p.level == 1) {
        if (w.size() != bits) return std::nullopt;
        BigNat v = 0;
        for (const auto& s : w) {
            if (!is_bit(s, 1)) return std::nullopt;
            v = (v << 1) | (s.one ? 1 : 0);
        }
        return v;
    }
    auto blocks = counter_blocks(p, w);
    if (!blocks || blocks->size() != bits) return std::nullopt;
    CounterParams inner{p.level - 1, p.base};
    BigNat v = 0;
    std::uint64_t expect = bits;
    for (const auto& [addr, one] : *blocks) {
        --expect;
        auto a = decode_checked(inner, addr);
        if (!a || *a != expect) return std::nullopt;
        v = (v << 1) | (one ? 1 : 0);
    }
    return v;
}

}  // namespace detail

/// Checks each address is a valid (k-1)-counter, the top address is
/// maximal, the bottom one is zero and addresses step down by one.
inline bool is_valid_counter(const CounterParams& p, const CounterWord& w)
{
    check_scale(p);
    return detail::decode_checked(p, w).has_value();
}

inline BigNat decode_counter(const CounterParams& p, const CounterWord& w)
{
    check_scale(p);
    auto v = detail::decode_checked(p, w);
    if (!v) throw std::invalid_argument("not a valid level-" + std::to_string(p.level) + " counter");
    return *v;
}

/// Flips the trailing run of ones and the zero above it.
inline CounterWord increment_counter(const CounterParams& p, const CounterWord& w)
{
    if (!is_valid_counter(p, w)) throw std::invalid_argument("not a valid counter");
    CounterWord out = w;
    for (auto i = out.size(); i-- > 0;) {
        if (!is_bit(out[i], p.level)) continue;
        bool was_one = out[i].one;
        out[i].one = !was_one;
        if (!was_one) return out;
    }
    throw std::overflow_error("counter is already at its maximum");
}

inline std::string spell(const std::vector<StackSymbol>& w)
{
    std::string s;
    for (const auto& x : w) {
        if (!s.empty()) s += ' ';
        s += x.spelling();
    }
    return s;
}

}  // namespace mpds
