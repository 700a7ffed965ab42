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
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "config_space.hpp"
#include "ctl.hpp"

namespace mpds {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// On-the-fly CTL evaluation over a lazily expanded ConfigSpace. Only the
/// part of the space needed to decide the queried formula is generated.
/// Results agree with global labelling of the same bounded space.
class LocalChecker {
public:
    explicit LocalChecker(ConfigSpace& space, std::size_t node_budget = std::numeric_limits<std::size_t>::max())
        : space_(space), budget_(node_budget)
    {
    }

    bool holds(ConfigSpace::NodeId n, const Ctl& f) { return eval(n, info(f)); }

    ConfigSpace& space() { return space_; }
    /// True once any expansion suppressed a successor because of a bound.
    bool truncated() const { return space_.any_frontier(); }

private:
    struct Info {
        const CtlNode* node;
        CtlOp op;
        StateId state = 0;
        bool known_state = false;
        std::vector<Info*> conjuncts;  // flattened and cost-ordered for conj/disj
        Info* a = nullptr;
        Info* b = nullptr;
        double cost = 1;
        std::uint32_t index = 0;
        // Control states a node must be in to satisfy this formula (empty
        // when unconstrained), and the states that can reach one of them.
        std::vector<StateId> required;
        bool constrained = false;
        std::vector<char> can_reach;
    };

    Info* info(const Ctl& f)
    {
        if (auto it = infos_.find(f.get()); it != infos_.end()) return it->second.get();
        auto owned = std::make_unique<Info>();
        Info* i = owned.get();
        infos_.emplace(f.get(), std::move(owned));
        i->node = f.get();
        i->op = f.op();
        i->index = static_cast<std::uint32_t>(infos_.size() - 1);
        switch (f.op()) {
        case CtlOp::prop:
            if (auto q = space_.system().find_state(f.atom())) {
                i->state = *q;
                i->known_state = true;
            } else {
                throw std::invalid_argument("proposition names no state of the system: " + f.atom());
            }
            i->cost = 0;
            break;
        case CtlOp::conj:
        case CtlOp::disj: {
            std::vector<Ctl> stack{f};
            while (!stack.empty()) {
                auto g = stack.back();
                stack.pop_back();
                if (g.op() == f.op()) {
                    stack.push_back(g.rhs());
                    stack.push_back(g.lhs());
                } else {
                    i->conjuncts.push_back(info(g));
                }
            }
            std::stable_sort(i->conjuncts.begin(), i->conjuncts.end(),
                             [](const Info* x, const Info* y) { return x->cost < y->cost; });
            for (auto* c : i->conjuncts) i->cost += c->cost;
            break;
        }
        case CtlOp::neg:
            i->a = info(f.lhs());
            i->cost = i->a->cost + 0.5;
            break;
        case CtlOp::ex:
            i->a = info(f.lhs());
            i->cost = 2 + i->a->cost;
            break;
        case CtlOp::ef:
        case CtlOp::eg:
            i->a = info(f.lhs());
            i->cost = 100 + i->a->cost;
            break;
        case CtlOp::eu:
            i->a = info(f.lhs());
            i->b = info(f.rhs());
            i->cost = 100 + i->a->cost + i->b->cost;
            break;
        }
        requirement(i);
        return i;
    }

    void requirement(Info* i)
    {
        if (i->op == CtlOp::prop) {
            i->constrained = true;
            i->required = {i->state};
        } else if (i->op == CtlOp::conj) {
            for (auto* c : i->conjuncts)
                if (c->constrained && (!i->constrained || c->required.size() < i->required.size())) {
                    i->constrained = true;
                    i->required = c->required;
                }
        } else if (i->op == CtlOp::disj) {
            i->constrained = true;
            for (auto* c : i->conjuncts) {
                if (!c->constrained) {
                    i->constrained = false;
                    i->required.clear();
                    break;
                }
                i->required.insert(i->required.end(), c->required.begin(), c->required.end());
            }
        }
    }

    // Backward closure of goal->required over the control-flow graph.
    const std::vector<char>& reach_set(Info* goal)
    {
        if (!goal->can_reach.empty()) return goal->can_reach;
        const auto& sys = space_.system();
        if (preds_.empty()) {
            preds_.resize(sys.state_count());
            for (const auto& t : sys.transitions()) preds_[t.to].push_back(t.from);
        }
        goal->can_reach.assign(sys.state_count(), goal->constrained ? 0 : 1);
        if (!goal->constrained) return goal->can_reach;
        std::vector<StateId> stack(goal->required.begin(), goal->required.end());
        for (auto q : stack) goal->can_reach[q] = 1;
        while (!stack.empty()) {
            auto q = stack.back();
            stack.pop_back();
            for (auto p : preds_[q])
                if (!goal->can_reach[p]) {
                    goal->can_reach[p] = 1;
                    stack.push_back(p);
                }
        }
        return goal->can_reach;
    }

    std::int8_t& slot(Info* i, ConfigSpace::NodeId n)
    {
        std::uint64_t key = (static_cast<std::uint64_t>(i->index) << 32) | n;
        return memo_.try_emplace(key, static_cast<std::int8_t>(-1)).first->second;
    }

    std::vector<ConfigSpace::NodeId> succ(ConfigSpace::NodeId n)
    {
        if (space_.size() > budget_) throw BudgetExceeded("node budget exhausted during model checking");
        const auto& ex = space_.expand(n);
        std::vector<ConfigSpace::NodeId> out;
        out.reserve(ex.edges.size());
        for (const auto& e : ex.edges) out.push_back(e.dst);
        return out;
    }

    bool eval(ConfigSpace::NodeId n, Info* i)
    {
        if (i->op == CtlOp::prop) return space_.state(n) == i->state;
        if (auto m = slot(i, n); m >= 0) return m == 1;
        bool r = false;
        switch (i->op) {
        case CtlOp::neg: r = !eval(n, i->a); break;
        case CtlOp::conj:
            r = true;
            for (auto* c : i->conjuncts)
                if (!eval(n, c)) {
                    r = false;
                    break;
                }
            break;
        case CtlOp::disj:
            for (auto* c : i->conjuncts)
                if (eval(n, c)) {
                    r = true;
                    break;
                }
            break;
        case CtlOp::ex:
            for (auto m : succ(n))
                if (eval(m, i->a)) {
                    r = true;
                    break;
                }
            break;
        case CtlOp::ef: r = until(n, i, nullptr, i->a); break;
        case CtlOp::eu: r = until(n, i, i->a, i->b); break;
        case CtlOp::eg: r = globally(n, i); break;
        default: break;
        }
        slot(i, n) = r ? 1 : 0;
        return r;
    }

    // E[through U goal]; through == nullptr means true.
    bool until(ConfigSpace::NodeId start, Info* self, Info* through, Info* goal)
    {
        std::unordered_map<ConfigSpace::NodeId, ConfigSpace::NodeId> parent;
        std::deque<ConfigSpace::NodeId> queue{start};
        parent.emplace(start, start);
        std::vector<ConfigSpace::NodeId> visited;
        const auto& useful = reach_set(goal);
        auto mark_path = [&](ConfigSpace::NodeId v) {
            while (true) {
                slot(self, v) = 1;
                auto p = parent[v];
                if (p == v) break;
                v = p;
            }
        };
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            if (v != start) {
                auto m = slot(self, v);
                if (m == 1) {
                    mark_path(v);
                    return true;
                }
                if (m == 0) continue;
            }
            visited.push_back(v);
            if (eval(v, goal)) {
                mark_path(v);
                return true;
            }
            if (through && !eval(v, through)) continue;
            for (auto w : succ(v))
                if (useful[space_.state(w)] && parent.emplace(w, v).second) queue.push_back(w);
        }
        for (auto v : visited) slot(self, v) = 0;
        return false;
    }

    bool globally(ConfigSpace::NodeId start, Info* self)
    {
        if (!eval(start, self->a)) return false;
        std::unordered_map<ConfigSpace::NodeId, std::uint32_t> index;
        std::vector<ConfigSpace::NodeId> region;
        std::vector<std::vector<std::uint32_t>> inner;  // successors inside the region
        std::vector<char> deadlock;
        std::deque<ConfigSpace::NodeId> queue{start};
        index.emplace(start, 0);
        region.push_back(start);
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            auto vi = index[v];
            auto ss = succ(v);
            if (inner.size() <= vi) {
                inner.resize(vi + 1);
                deadlock.resize(vi + 1, 0);
            }
            deadlock[vi] = ss.empty();
            for (auto w : ss) {
                if (!eval(w, self->a)) continue;
                auto [it, fresh] = index.emplace(w, static_cast<std::uint32_t>(region.size()));
                if (fresh) {
                    region.push_back(w);
                    queue.push_back(w);
                }
                inner[vi].push_back(it->second);
            }
        }
        const auto n = region.size();
        std::vector<std::vector<std::uint32_t>> pred(n);
        std::vector<std::size_t> live(n, 0);
        std::vector<char> in(n, 1);
        std::deque<std::uint32_t> q;
        for (std::uint32_t v = 0; v < n; ++v) {
            for (auto w : inner[v]) pred[w].push_back(v);
            live[v] = inner[v].size();
            if (!deadlock[v] && live[v] == 0) q.push_back(v);
        }
        while (!q.empty()) {
            auto w = q.front();
            q.pop_front();
            if (!in[w]) continue;
            in[w] = 0;
            for (auto v : pred[w])
                if (in[v] && --live[v] == 0) q.push_back(v);
        }
        for (std::uint32_t v = 0; v < n; ++v) slot(self, region[v]) = in[v];
        return in[0] != 0;
    }

    ConfigSpace& space_;
    std::size_t budget_;
    std::unordered_map<const CtlNode*, std::unique_ptr<Info>> infos_;
    std::unordered_map<std::uint64_t, std::int8_t> memo_;
    std::vector<std::vector<StateId>> preds_;
};

}  // namespace mpds
