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

#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "config_space.hpp"
#include "system.hpp"

namespace mpds {

struct ExplorationBounds {
    int context_bound = 8;
    std::size_t stack_cap = 64;
    std::size_t node_cap = 1'000'000;
    std::size_t step_cap = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> stack_caps;
    /// Maximum occurrences of a letter in any one stack. Honoured by
    /// build_phase_game only.
    std::vector<std::pair<SymbolId, std::size_t>> letter_caps;

    SpaceBounds space() const { return {context_bound, stack_cap, stack_caps}; }
};

/// Finite truncation of the configuration graph. Node 0 is the initial node;
/// ids follow breadth-first discovery order.
struct ConfigGraph {
    struct Node {
        Configuration config;
        int contexts = 0;
        int current_stack = 0;
        bool frontier = false;
    };
    struct Edge {
        std::uint32_t src;
        std::uint32_t transition;
        std::uint32_t dst;
    };

    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> out;  // edge indices per node
    bool capped = false;

    bool truncated() const
    {
        if (capped) return true;
        for (const auto& n : nodes)
            if (n.frontier) return true;
        return false;
    }
    int max_contexts() const
    {
        int m = 0;
        for (const auto& n : nodes) m = std::max(m, n.contexts);
        return m;
    }
    StateId label(std::uint32_t n) const { return nodes.at(n).config.state; }
};

/// Breadth-first closure from (init, 0 contexts, no current stack).
inline ConfigGraph explore(const MpdsSystem& sys, const Configuration& init, const ExplorationBounds& b)
{
    if (b.node_cap < 1) throw std::invalid_argument("node_cap must be at least 1");
    if (!well_formed(sys, init)) throw std::invalid_argument("initial configuration is not well formed");
    ConfigSpace space(sys, b.space());
    ConfigGraph g;
    std::unordered_map<ConfigSpace::NodeId, std::uint32_t> ids;
    std::vector<ConfigSpace::NodeId> order;
    std::vector<std::size_t> depth;

    auto root = space.intern(init);
    ids.emplace(root, 0);
    order.push_back(root);
    depth.push_back(0);
    g.nodes.push_back({init, 0, 0, false});
    g.out.emplace_back();

    for (std::size_t head = 0; head < order.size(); ++head) {
        auto sn = order[head];
        const auto& ex = space.expand(sn);
        if (depth[head] >= b.step_cap) {
            g.nodes[head].frontier = !ex.edges.empty() || ex.frontier;
            continue;
        }
        g.nodes[head].frontier = ex.frontier;
        for (const auto& e : ex.edges) {
            auto it = ids.find(e.dst);
            if (it == ids.end()) {
                if (g.nodes.size() >= b.node_cap) {
                    g.capped = true;
                    g.nodes[head].frontier = true;
                    continue;
                }
                auto id = static_cast<std::uint32_t>(g.nodes.size());
                it = ids.emplace(e.dst, id).first;
                order.push_back(e.dst);
                depth.push_back(depth[head] + 1);
                g.nodes.push_back({space.config(e.dst), space.contexts(e.dst), space.current_stack(e.dst), false});
                g.out.emplace_back();
            }
            g.out[head].push_back(static_cast<std::uint32_t>(g.edges.size()));
            g.edges.push_back({static_cast<std::uint32_t>(head), e.transition, it->second});
        }
    }
    return g;
}

struct ReachResult {
    bool reachable = false;
    std::optional<RunWord> witness;
    bool truncated = false;
    std::optional<std::uint32_t> node;
};

/// Shortest witness run to a node whose control state satisfies target.
inline ReachResult reachable(const ConfigGraph& g, const std::function<bool(StateId)>& target)
{
    ReachResult r;
    r.truncated = g.truncated();
    if (g.nodes.empty()) return r;
    std::vector<std::int64_t> via(g.nodes.size(), -2);  // incoming edge; -1 for the root
    std::deque<std::uint32_t> queue{0};
    via[0] = -1;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        if (target(g.label(n))) {
            RunWord w;
            for (auto e = via[n]; e >= 0; e = via[g.edges[static_cast<std::size_t>(e)].src])
                w.push_back(g.edges[static_cast<std::size_t>(e)].transition);
            std::reverse(w.begin(), w.end());
            r.reachable = true;
            r.witness = std::move(w);
            r.node = n;
            return r;
        }
        for (auto ei : g.out[n]) {
            auto d = g.edges[ei].dst;
            if (via[d] == -2) {
                via[d] = static_cast<std::int64_t>(ei);
                queue.push_back(d);
            }
        }
    }
    return r;
}

/// Outcome of re-running a query with a larger stack cap.
template <typename Answer>
struct StabilityReport {
    Answer answer;
    Answer answer_raised;
    bool stable;
};

/// Runs query(bounds) at the given caps and at stack_cap + delta (per-stack
/// caps raised as well) and reports whether the answer changed.
template <typename Query>
auto check_stability(const ExplorationBounds& b, std::size_t delta, Query query)
    -> StabilityReport<decltype(query(b))>
{
    auto raised = b;
    raised.stack_cap += delta;
    for (auto& c : raised.stack_caps) c += delta;
    auto a = query(b);
    auto r = query(raised);
    return {a, r, a == r};
}

}  // namespace mpds
