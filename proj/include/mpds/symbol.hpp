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

#include <cctype>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mpds {

/// Kinds of stack letters. Counter bits carry a level and a polarity
/// (zero = a_level, one = b_level); named letters carry their spelling.
enum class SymbolKind : std::uint8_t {
    bottom,
    counter_bit,
    separator,  // zeta
    filler,     // the `a` used by valuation words
    tm_letter,
    variable,
};

struct StackSymbol {
    SymbolKind kind = SymbolKind::bottom;
    int level = 0;     // counter_bit only
    bool one = false;  // counter_bit only
    std::string name;  // tm_letter / variable only

    static StackSymbol bottom() { return {}; }
    static StackSymbol separator() { return {SymbolKind::separator, 0, false, {}}; }
    static StackSymbol filler() { return {SymbolKind::filler, 0, false, {}}; }
    static StackSymbol bit(int level, bool one) { return {SymbolKind::counter_bit, level, one, {}}; }
    static StackSymbol letter(std::string n) { return {SymbolKind::tm_letter, 0, false, std::move(n)}; }
    static StackSymbol variable(std::string n) { return {SymbolKind::variable, 0, false, std::move(n)}; }

    bool is_bottom() const { return kind == SymbolKind::bottom; }

    /// Document spelling: a1,b1,...,zeta,bot, filler `a`, names verbatim.
    std::string spelling() const
    {
        switch (kind) {
        case SymbolKind::bottom: return "bot";
        case SymbolKind::counter_bit: return (one ? "b" : "a") + std::to_string(level);
        case SymbolKind::separator: return "zeta";
        case SymbolKind::filler: return "a";
        case SymbolKind::tm_letter:
        case SymbolKind::variable: return name;
        }
        return {};
    }

    /// Inverse of spelling(). Unrecognised names become tm letters, so a
    /// document cannot tell a variable from a tape letter; the distinction
    /// only matters to the compilers, which construct symbols directly.
    static StackSymbol parse(const std::string& s)
    {
        if (s.empty()) throw std::invalid_argument("empty symbol name");
        if (s == "bot" || s == "⊥") return bottom();
        if (s == "zeta") return separator();
        if (s == "a") return filler();
        if ((s[0] == 'a' || s[0] == 'b') && s.size() > 1) {
            bool digits = true;
            for (std::size_t i = 1; i < s.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(s[i]));
            if (digits && s[1] != '0') return bit(std::stoi(s.substr(1)), s[0] == 'b');
        }
        return letter(s);
    }

    friend bool operator==(const StackSymbol& x, const StackSymbol& y)
    {
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case SymbolKind::counter_bit: return x.level == y.level && x.one == y.one;
        case SymbolKind::tm_letter:
        case SymbolKind::variable: return x.name == y.name;
        default: return true;
        }
    }
};

}  // namespace mpds
