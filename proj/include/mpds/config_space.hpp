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

#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "system.hpp"

namespace mpds {

/// Hash-consed stack words. Id 0 is the word holding only the bottom marker;
/// every other id is a (top letter, rest) cell, so equal words share an id.
class StackStore {
public:
    using Id = std::uint32_t;

    StackStore() { cells_.push_back({kBottom, 0, 0}); }

    Id push(Id rest, SymbolId sym)
    {
        std::uint64_t key = (static_cast<std::uint64_t>(rest) << 32) | sym;
        auto [it, fresh] = index_.try_emplace(key, static_cast<Id>(cells_.size()));
        if (fresh) cells_.push_back({sym, rest, cells_[rest].height + 1});
        return it->second;
    }
    SymbolId top(Id w) const { return cells_[w].sym; }
    Id rest(Id w) const { return cells_[w].rest; }
    std::uint32_t height(Id w) const { return cells_[w].height; }

    Id intern(std::span<const SymbolId> top_first)
    {
        Id w = 0;
        for (auto it = top_first.rbegin(); it != top_first.rend(); ++it)
            if (*it != kBottom) w = push(w, *it);
        return w;
    }
    std::vector<SymbolId> word(Id w) const
    {
        std::vector<SymbolId> out;
        for (; w != 0; w = cells_[w].rest) out.push_back(cells_[w].sym);
        out.push_back(kBottom);
        return out;
    }
    std::size_t size() const { return cells_.size(); }

private:
    struct Cell {
        SymbolId sym;
        Id rest;
        std::uint32_t height;
    };
    std::vector<Cell> cells_;
    std::unordered_map<std::uint64_t, Id> index_;
};

/// Bounds applied while enumerating configurations. A successor that would
/// exceed a bound is dropped and its source is marked frontier.
struct SpaceBounds {
    int context_bound = 8;
    std::size_t stack_cap = 64;
    /// Optional per-stack override of stack_cap (index 0 is stack 1).
    std::vector<std::size_t> stack_caps;

    std::size_t cap_for(int stack) const
    {
        auto i = static_cast<std::size_t>(stack - 1);
        return i < stack_caps.size() ? stack_caps[i] : stack_cap;
    }
};

/// Lazily expanded, context-annotated configuration space. Node identity is
/// (configuration, contexts used, current stack); nodes are numbered in
/// creation order.
class ConfigSpace {
public:
    using NodeId = std::uint32_t;

    struct Edge {
        std::uint32_t transition;
        NodeId dst;
    };
    struct Expansion {
        std::vector<Edge> edges;
        bool frontier = false;
    };

    ConfigSpace(const MpdsSystem& sys, SpaceBounds bounds)
        : sys_(&sys), bounds_(std::move(bounds)), width_(3 + static_cast<std::size_t>(sys.stack_count()))
    {
        table_.assign(1u << 12, kEmpty);
    }

    const MpdsSystem& system() const { return *sys_; }
    const SpaceBounds& bounds() const { return bounds_; }
    StackStore& stacks() { return store_; }
    const StackStore& stacks() const { return store_; }

    NodeId intern(const Configuration& c, int contexts = 0, int current = 0)
    {
        std::vector<std::uint32_t> key(width_);
        key[0] = c.state;
        key[1] = static_cast<std::uint32_t>(contexts);
        key[2] = static_cast<std::uint32_t>(current);
        for (std::size_t i = 0; i < c.stacks.size(); ++i) key[3 + i] = store_.intern(c.stacks[i]);
        return intern_key(key);
    }

    std::size_t size() const { return keys_.size() / width_; }
    StateId state(NodeId n) const { return keys_[n * width_]; }
    int contexts(NodeId n) const { return static_cast<int>(keys_[n * width_ + 1]); }
    int current_stack(NodeId n) const { return static_cast<int>(keys_[n * width_ + 2]); }
    StackStore::Id stack(NodeId n, int s) const { return keys_[n * width_ + 2 + static_cast<std::size_t>(s)]; }

    Configuration config(NodeId n) const
    {
        Configuration c;
        c.state = state(n);
        for (int s = 1; s <= sys_->stack_count(); ++s) c.stacks.push_back(store_.word(stack(n, s)));
        return c;
    }

    int max_contexts_seen() const { return max_contexts_; }
    bool any_frontier() const { return any_frontier_; }
    bool expanded(NodeId n) const { return n < expansions_.size() && expansions_[n].has_value(); }

    const Expansion& expand(NodeId n)
    {
        if (expansions_.size() <= n) expansions_.resize(size());
        if (expansions_[n]) return *expansions_[n];
        Expansion ex;
        std::vector<std::uint32_t> key(width_);
        for (auto ti : sys_->outgoing(state(n))) {
            const auto& t = sys_->transitions()[ti];
            std::copy_n(keys_.begin() + static_cast<std::ptrdiff_t>(n * width_), width_, key.begin());
            key[0] = t.to;
            if (t.kind != TransKind::internal) {
                auto& w = key[2 + static_cast<std::size_t>(t.stack)];
                SymbolId top = store_.top(w);
                if (t.kind == TransKind::pop) {
                    if (w == 0 || top != t.symbol) continue;
                    w = store_.rest(w);
                } else {
                    if (t.guard != kWildcard && static_cast<SymbolId>(t.guard) != top) continue;
                    if (t.kind == TransKind::push) {
                        if (store_.height(w) + 1 > bounds_.cap_for(t.stack)) {
                            ex.frontier = true;
                            continue;
                        }
                        w = store_.push(w, t.symbol);
                    }
                }
                if (t.kind != TransKind::guarded_noop && static_cast<int>(key[2]) != t.stack) {
                    if (static_cast<int>(key[1]) + 1 > bounds_.context_bound) {
                        ex.frontier = true;
                        continue;
                    }
                    key[1] += 1;
                    key[2] = static_cast<std::uint32_t>(t.stack);
                }
            }
            ex.edges.push_back({ti, intern_key(key)});
        }
        if (ex.frontier) any_frontier_ = true;
        if (expansions_.size() <= n) expansions_.resize(size());
        expansions_[n] = std::move(ex);
        return *expansions_[n];
    }

private:
    static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

    std::size_t hash_key(std::span<const std::uint32_t> key) const
    {
        std::uint64_t h = 1469598103934665603ull;
        for (auto v : key) {
            h ^= v;
            h *= 1099511628211ull;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }

    NodeId intern_key(std::span<const std::uint32_t> key)
    {
        std::size_t mask = table_.size() - 1;
        for (std::size_t i = hash_key(key) & mask;; i = (i + 1) & mask) {
            auto id = table_[i];
            if (id == kEmpty) break;
            if (std::equal(key.begin(), key.end(), keys_.begin() + static_cast<std::ptrdiff_t>(id * width_)))
                return id;
        }
        auto id = static_cast<NodeId>(size());
        keys_.insert(keys_.end(), key.begin(), key.end());
        max_contexts_ = std::max(max_contexts_, static_cast<int>(key[1]));
        if (size() * 2 > table_.size()) rehash();
        else place(id);
        return id;
    }

    void place(NodeId id)
    {
        std::size_t mask = table_.size() - 1;
        std::span<const std::uint32_t> key(keys_.data() + id * width_, width_);
        std::size_t i = hash_key(key) & mask;
        while (table_[i] != kEmpty) i = (i + 1) & mask;
        table_[i] = id;
    }

    void rehash()
    {
        table_.assign(table_.size() * 2, kEmpty);
        for (NodeId id = 0; id < size(); ++id) place(id);
    }

    const MpdsSystem* sys_;
    SpaceBounds bounds_;
    std::size_t width_;
    StackStore store_;
    std::vector<std::uint32_t> keys_;
    std::vector<std::uint32_t> table_;
    std::vector<std::optional<Expansion>> expansions_;
    int max_contexts_ = 0;
    bool any_frontier_ = false;
};

}  // namespace mpds
