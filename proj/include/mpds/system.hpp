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
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symbol.hpp"

namespace mpds {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;

/// Symbol id 0 is always the bottom marker.
inline constexpr SymbolId kBottom = 0;
/// Guard value that matches any top of stack, bottom included.
inline constexpr std::int32_t kWildcard = -1;

enum class Player : std::uint8_t { even = 0, odd = 1 };
inline Player opponent(Player p) { return p == Player::even ? Player::odd : Player::even; }

enum class TransKind : std::uint8_t { internal, push, pop, guarded_noop };

struct Transition {
    TransKind kind = TransKind::internal;
    StateId from = 0;
    StateId to = 0;
    int stack = 0;                  // 1-based; 0 for internal moves
    std::int32_t guard = kWildcard; // push / guarded_noop
    SymbolId symbol = kBottom;      // pushed or popped letter

    bool touches_stack() const { return kind != TransKind::internal; }
    bool is_pop() const { return kind == TransKind::pop; }
    bool is_push() const { return kind == TransKind::push; }
};

/// A control state plus one top-first word per stack; every word ends with
/// exactly one kBottom.
struct Configuration {
    StateId state = 0;
    std::vector<std::vector<SymbolId>> stacks;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Builds a configuration whose stack words are given top-first without the
/// trailing bottom marker.
inline Configuration make_config(StateId q, std::vector<std::vector<SymbolId>> words)
{
    for (auto& w : words) w.push_back(kBottom);
    return {q, std::move(words)};
}

/// An immutable multi-pushdown system, optionally annotated as a parity game.
class MpdsSystem {
public:
    MpdsSystem() = default;

    std::size_t state_count() const { return states_.size(); }
    int stack_count() const { return stacks_; }
    StateId initial() const { return initial_; }
    const std::vector<std::string>& state_names() const { return states_; }
    const std::string& state_name(StateId q) const { return states_.at(q); }
    const std::vector<StackSymbol>& alphabet() const { return alphabet_; }
    const StackSymbol& symbol(SymbolId s) const { return alphabet_.at(s); }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const std::vector<std::uint32_t>& outgoing(StateId q) const { return by_source_.at(q); }

    bool is_game() const { return owner_.has_value() || priority_.has_value(); }
    const std::optional<std::vector<Player>>& owner_map() const { return owner_; }
    const std::optional<std::vector<int>>& priority_map() const { return priority_; }
    Player owner(StateId q) const { return owner_ ? (*owner_).at(q) : Player::even; }
    int priority(StateId q) const { return priority_ ? (*priority_).at(q) : 0; }

    std::optional<StateId> find_state(const std::string& name) const
    {
        auto it = state_index_.find(name);
        if (it == state_index_.end()) return std::nullopt;
        return it->second;
    }
    StateId state(const std::string& name) const
    {
        auto q = find_state(name);
        if (!q) throw std::out_of_range("unknown state: " + name);
        return *q;
    }
    std::optional<SymbolId> find_symbol(const StackSymbol& s) const
    {
        for (SymbolId i = 0; i < alphabet_.size(); ++i)
            if (alphabet_[i] == s) return i;
        return std::nullopt;
    }
    SymbolId symbol_id(const StackSymbol& s) const
    {
        auto id = find_symbol(s);
        if (!id) throw std::out_of_range("unknown symbol: " + s.spelling());
        return *id;
    }

    Configuration initial_config() const
    {
        return {initial_, std::vector<std::vector<SymbolId>>(static_cast<std::size_t>(stacks_), {kBottom})};
    }

private:
    friend class SystemBuilder;

    std::vector<std::string> states_;
    std::unordered_map<std::string, StateId> state_index_;
    int stacks_ = 0;
    std::vector<StackSymbol> alphabet_{StackSymbol::bottom()};
    StateId initial_ = 0;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::uint32_t>> by_source_;
    std::optional<std::vector<Player>> owner_;
    std::optional<std::vector<int>> priority_;
};

/// Incremental construction of an MpdsSystem. States and symbols are
/// interned on first mention; build() freezes the result.
class SystemBuilder {
public:
    explicit SystemBuilder(int stacks) { sys_.stacks_ = stacks; }

    StateId state(const std::string& name)
    {
        auto [it, fresh] = sys_.state_index_.try_emplace(name, static_cast<StateId>(sys_.states_.size()));
        if (fresh) sys_.states_.push_back(name);
        return it->second;
    }
    bool has_state(const std::string& name) const { return sys_.state_index_.count(name) != 0; }

    SymbolId symbol(const StackSymbol& s)
    {
        if (auto id = sys_.find_symbol(s)) return *id;
        sys_.alphabet_.push_back(s);
        return static_cast<SymbolId>(sys_.alphabet_.size() - 1);
    }
    const std::vector<StackSymbol>& alphabet() const { return sys_.alphabet_; }
    std::size_t state_count() const { return sys_.states_.size(); }
    std::size_t transition_count() const { return sys_.transitions_.size(); }

    void set_initial(StateId q) { sys_.initial_ = q; }

    void internal(StateId from, StateId to) { add({TransKind::internal, from, to, 0, kWildcard, kBottom}); }
    void push(StateId from, std::int32_t guard, StateId to, int stack, SymbolId sym)
    {
        add({TransKind::push, from, to, stack, guard, sym});
    }
    void pop(StateId from, SymbolId sym, StateId to, int stack) { add({TransKind::pop, from, to, stack, kWildcard, sym}); }
    void noop(StateId from, std::int32_t guard, int stack, StateId to)
    {
        add({TransKind::guarded_noop, from, to, stack, guard, kBottom});
    }
    void add(const Transition& t) { sys_.transitions_.push_back(t); }

    void set_owner(StateId q, Player p)
    {
        if (!sys_.owner_) sys_.owner_.emplace();
        if (sys_.owner_->size() <= q) sys_.owner_->resize(q + 1, Player::even);
        (*sys_.owner_)[q] = p;
    }
    void set_priority(StateId q, int pr)
    {
        if (!sys_.priority_) sys_.priority_.emplace();
        if (sys_.priority_->size() <= q) sys_.priority_->resize(q + 1, 0);
        (*sys_.priority_)[q] = pr;
    }
    /// Extends partial game maps to every state with the given defaults.
    void complete_game_maps(Player owner, int priority)
    {
        if (!sys_.owner_) sys_.owner_.emplace();
        if (!sys_.priority_) sys_.priority_.emplace();
        sys_.owner_->resize(sys_.states_.size(), owner);
        sys_.priority_->resize(sys_.states_.size(), priority);
    }

    /// Raw access used by the document reader to keep partial maps partial.
    void set_raw_game_maps(std::optional<std::vector<Player>> owner, std::optional<std::vector<int>> priority)
    {
        sys_.owner_ = std::move(owner);
        sys_.priority_ = std::move(priority);
    }

    MpdsSystem build() const
    {
        MpdsSystem out = sys_;
        out.by_source_.assign(out.states_.size(), {});
        for (std::uint32_t i = 0; i < out.transitions_.size(); ++i) {
            const auto& t = out.transitions_[i];
            if (t.from < out.by_source_.size()) out.by_source_[t.from].push_back(i);
        }
        return out;
    }

private:
    MpdsSystem sys_;
};

// ---------------------------------------------------------------------------
// One-step semantics

enum class StepErrorKind { state_mismatch, guard_mismatch, pop_on_bottom, symbol_mismatch, bad_stack };

class StepError : public std::runtime_error {
public:
    StepError(StepErrorKind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
    StepErrorKind kind() const { return kind_; }

private:
    StepErrorKind kind_;
};

namespace detail {

inline std::optional<StepErrorKind> check_enabled(const MpdsSystem& sys, const Configuration& c, const Transition& t)
{
    if (c.state != t.from) return StepErrorKind::state_mismatch;
    if (t.kind == TransKind::internal) return std::nullopt;
    if (t.stack < 1 || t.stack > sys.stack_count() || static_cast<std::size_t>(t.stack) > c.stacks.size())
        return StepErrorKind::bad_stack;
    const auto& w = c.stacks[static_cast<std::size_t>(t.stack - 1)];
    SymbolId top = w.front();
    switch (t.kind) {
    case TransKind::push:
    case TransKind::guarded_noop:
        if (t.guard != kWildcard && static_cast<SymbolId>(t.guard) != top) return StepErrorKind::guard_mismatch;
        return std::nullopt;
    case TransKind::pop:
        if (top == kBottom) return StepErrorKind::pop_on_bottom;
        if (top != t.symbol) return StepErrorKind::symbol_mismatch;
        return std::nullopt;
    default: return std::nullopt;
    }
}

inline Configuration apply(const Configuration& c, const Transition& t)
{
    Configuration d = c;
    d.state = t.to;
    if (t.kind == TransKind::push) {
        auto& w = d.stacks[static_cast<std::size_t>(t.stack - 1)];
        w.insert(w.begin(), t.symbol);
    } else if (t.kind == TransKind::pop) {
        auto& w = d.stacks[static_cast<std::size_t>(t.stack - 1)];
        w.erase(w.begin());
    }
    return d;
}

}  // namespace detail

inline bool enabled(const MpdsSystem& sys, const Configuration& c, const Transition& t)
{
    return !detail::check_enabled(sys, c, t).has_value();
}

/// Applies one transition. Throws StepError when it is not enabled at c.
inline Configuration step(const MpdsSystem& sys, const Configuration& c, const Transition& t)
{
    if (auto err = detail::check_enabled(sys, c, t)) {
        switch (*err) {
        case StepErrorKind::state_mismatch: throw StepError(*err, "transition source differs from configuration state");
        case StepErrorKind::guard_mismatch: throw StepError(*err, "top of stack does not match the guard");
        case StepErrorKind::pop_on_bottom: throw StepError(*err, "pop on an empty stack");
        case StepErrorKind::symbol_mismatch: throw StepError(*err, "top of stack differs from the popped letter");
        case StepErrorKind::bad_stack: throw StepError(*err, "stack index out of range");
        }
    }
    return detail::apply(c, t);
}

/// Enabled moves at c in declaration order.
inline std::vector<std::pair<std::uint32_t, Configuration>> successors(const MpdsSystem& sys, const Configuration& c)
{
    std::vector<std::pair<std::uint32_t, Configuration>> out;
    if (c.state >= sys.state_count()) return out;
    for (auto i : sys.outgoing(c.state)) {
        const auto& t = sys.transitions()[i];
        if (enabled(sys, c, t)) out.emplace_back(i, detail::apply(c, t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Context and phase counting

/// Indices into sys.transitions(), in run order.
using RunWord = std::vector<std::uint32_t>;

inline void require_chainable(const MpdsSystem& sys, std::span<const std::uint32_t> w)
{
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (sys.transitions().at(w[i]).to != sys.transitions().at(w[i + 1]).from)
            throw std::invalid_argument("run word is not chainable at position " + std::to_string(i));
}

namespace detail {

template <typename Opens>
std::size_t greedy_blocks(const MpdsSystem& sys, std::span<const std::uint32_t> w, Opens opens)
{
    require_chainable(sys, w);
    if (w.empty()) return 0;
    std::size_t blocks = 0;
    int current = 0;
    for (auto i : w) {
        const auto& t = sys.transitions()[i];
        if (opens(t) && t.stack != current) {
            ++blocks;
            current = t.stack;
        }
    }
    return std::max<std::size_t>(blocks, 1);
}

}  // namespace detail

/// Minimal m such that w splits into m blocks each touching one stack.
/// Internal moves and guarded no-ops fit in any block.
inline std::size_t context_count(const MpdsSystem& sys, std::span<const std::uint32_t> w)
{
    return detail::greedy_blocks(sys, w, [](const Transition& t) { return t.is_push() || t.is_pop(); });
}

/// Minimal m such that w splits into m blocks each popping one stack only.
inline std::size_t phase_count(const MpdsSystem& sys, std::span<const std::uint32_t> w)
{
    return detail::greedy_blocks(sys, w, [](const Transition& t) { return t.is_pop(); });
}

/// The greedy split realising context_count, as [begin, end) index pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> context_decomposition(const MpdsSystem& sys,
                                                                              std::span<const std::uint32_t> w)
{
    require_chainable(sys, w);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    int current = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& t = sys.transitions()[w[i]];
        bool opens = (t.is_push() || t.is_pop()) && t.stack != current;
        if (opens && current != 0) {
            out.back().second = i;
            out.emplace_back(i, w.size());
        } else if (out.empty()) {
            out.emplace_back(0, w.size());
        }
        if (opens) current = t.stack;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<std::string> validate(const MpdsSystem& sys)
{
    std::vector<std::string> diags;
    auto nstates = sys.state_count();
    auto nsyms = sys.alphabet().size();
    if (sys.stack_count() < 1) diags.push_back("stack count must be at least 1");
    if (nstates == 0) diags.push_back("system declares no states");
    else if (sys.initial() >= nstates) diags.push_back("initial state is not declared");
    for (std::size_t i = 0; i < sys.alphabet().size(); ++i)
        if (i > 0 && sys.alphabet()[i].is_bottom()) diags.push_back("bottom marker listed as an ordinary letter");
    for (std::size_t i = 0; i < sys.transitions().size(); ++i) {
        const auto& t = sys.transitions()[i];
        auto where = "transition " + std::to_string(i) + ": ";
        if (t.from >= nstates) diags.push_back(where + "undeclared source state");
        if (t.to >= nstates) diags.push_back(where + "undeclared target state");
        if (t.kind == TransKind::internal) continue;
        if (t.stack < 1 || t.stack > sys.stack_count()) diags.push_back(where + "stack index out of range");
        if (t.kind == TransKind::push || t.kind == TransKind::pop) {
            if (t.symbol >= nsyms) diags.push_back(where + "undeclared letter");
            else if (t.symbol == kBottom) diags.push_back(where + "bottom marker pushed or popped");
        }
        if ((t.kind == TransKind::push || t.kind == TransKind::guarded_noop) && t.guard != kWildcard &&
            (t.guard < 0 || static_cast<std::size_t>(t.guard) >= nsyms))
            diags.push_back(where + "undeclared guard letter");
    }
    if (sys.owner_map() && sys.owner_map()->size() != nstates) diags.push_back("owner map is not total on states");
    if (sys.priority_map()) {
        if (sys.priority_map()->size() != nstates) diags.push_back("priority map is not total on states");
        for (int p : *sys.priority_map())
            if (p < 0) {
                diags.push_back("negative priority");
                break;
            }
    }
    return diags;
}

inline bool well_formed(const MpdsSystem& sys, const Configuration& c)
{
    if (c.state >= sys.state_count() || c.stacks.size() != static_cast<std::size_t>(sys.stack_count())) return false;
    for (const auto& w : c.stacks) {
        if (w.empty() || w.back() != kBottom) return false;
        if (std::count(w.begin(), w.end(), kBottom) != 1) return false;
        for (auto s : w)
            if (s >= sys.alphabet().size()) return false;
    }
    return true;
}

}  // namespace mpds
