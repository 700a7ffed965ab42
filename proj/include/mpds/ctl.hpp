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
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "explorer.hpp"
#include "system.hpp"

namespace mpds {

enum class CtlOp : std::uint8_t { prop, neg, conj, disj, ex, ef, eg, eu };

class Ctl;

struct CtlNode {
    CtlOp op;
    std::string atom;
    std::shared_ptr<const CtlNode> lhs;
    std::shared_ptr<const CtlNode> rhs;
    std::size_t hash;
};

/// Immutable CTL formula. Subformulas are shared, and pointer identity is
/// used by the checkers to memoise labelling; equality is structural.
class Ctl {
public:
    Ctl() = default;
    explicit Ctl(std::shared_ptr<const CtlNode> n) : node_(std::move(n)) {}

    static Ctl prop(std::string name)
    {
        auto h = std::hash<std::string>{}(name) * 31 + 7;
        return Ctl(std::make_shared<CtlNode>(CtlNode{CtlOp::prop, std::move(name), nullptr, nullptr, h}));
    }

    CtlOp op() const { return node_->op; }
    const std::string& atom() const { return node_->atom; }
    Ctl lhs() const { return Ctl(node_->lhs); }
    Ctl rhs() const { return Ctl(node_->rhs); }
    const CtlNode* get() const { return node_.get(); }
    std::size_t hash() const { return node_->hash; }
    explicit operator bool() const { return node_ != nullptr; }

    friend bool operator==(const Ctl& a, const Ctl& b) { return same(a.node_.get(), b.node_.get()); }

    static Ctl make(CtlOp op, Ctl a, Ctl b = {})
    {
        std::size_t h = static_cast<std::size_t>(op) * 0x9e3779b97f4a7c15ull;
        h ^= a.hash() + 0x9e3779b9 + (h << 6) + (h >> 2);
        if (b) h ^= b.hash() * 1315423911u + (h << 6) + (h >> 2);
        return Ctl(std::make_shared<CtlNode>(CtlNode{op, {}, a.node_, b.node_, h}));
    }

    /// Number of nodes of the formula as a tree (shared parts counted each
    /// time they occur).
    double tree_size() const
    {
        std::unordered_map<const CtlNode*, double> memo;
        std::function<double(const CtlNode*)> go = [&](const CtlNode* n) -> double {
            if (!n) return 0;
            if (auto it = memo.find(n); it != memo.end()) return it->second;
            double s = 1 + go(n->lhs.get()) + go(n->rhs.get());
            memo.emplace(n, s);
            return s;
        };
        return go(node_.get());
    }
    /// Number of distinct subformula objects.
    std::size_t dag_size() const
    {
        std::unordered_set<const CtlNode*> seen;
        std::function<void(const CtlNode*)> go = [&](const CtlNode* n) {
            if (!n || !seen.insert(n).second) return;
            go(n->lhs.get());
            go(n->rhs.get());
        };
        go(node_.get());
        return seen.size();
    }

    std::string to_string() const
    {
        const auto* n = node_.get();
        switch (n->op) {
        case CtlOp::prop: return quote(n->atom);
        case CtlOp::neg: return "!" + wrap(lhs());
        case CtlOp::conj: return wrap(lhs()) + " & " + wrap(rhs());
        case CtlOp::disj: return wrap(lhs()) + " | " + wrap(rhs());
        case CtlOp::ex: return "EX " + wrap(lhs());
        case CtlOp::ef: return "EF " + wrap(lhs());
        case CtlOp::eg: return "EG " + wrap(lhs());
        case CtlOp::eu: return "E[" + lhs().to_string() + " U " + rhs().to_string() + "]";
        }
        return {};
    }

private:
    static bool same(const CtlNode* a, const CtlNode* b)
    {
        if (a == b) return true;
        if (!a || !b || a->hash != b->hash || a->op != b->op) return false;
        if (a->op == CtlOp::prop) return a->atom == b->atom;
        return same(a->lhs.get(), b->lhs.get()) && same(a->rhs.get(), b->rhs.get());
    }
    static bool plain_atom(const std::string& s)
    {
        if (s.empty() || s == "EX" || s == "EF" || s == "EG" || s == "U" || s == "E") return false;
        for (unsigned char c : s)
            if (!(std::isalnum(c) || c == '_' || c == '.' || c == ':' || c == '/' || c == '-' || c == '#' ||
                  c == '\'' || c == '@' || c == '$'))
                return false;
        return true;
    }
    static std::string quote(const std::string& s) { return plain_atom(s) ? s : "\"" + s + "\""; }
    static std::string wrap(const Ctl& f)
    {
        return f.op() == CtlOp::prop || f.op() == CtlOp::eu ? f.to_string() : "(" + f.to_string() + ")";
    }

    std::shared_ptr<const CtlNode> node_;
};

namespace ctl {
inline Ctl prop(std::string s) { return Ctl::prop(std::move(s)); }
inline Ctl neg(Ctl a) { return Ctl::make(CtlOp::neg, std::move(a)); }
inline Ctl conj(Ctl a, Ctl b) { return Ctl::make(CtlOp::conj, std::move(a), std::move(b)); }
inline Ctl disj(Ctl a, Ctl b) { return Ctl::make(CtlOp::disj, std::move(a), std::move(b)); }
inline Ctl ex(Ctl a) { return Ctl::make(CtlOp::ex, std::move(a)); }
inline Ctl ef(Ctl a) { return Ctl::make(CtlOp::ef, std::move(a)); }
inline Ctl eg(Ctl a) { return Ctl::make(CtlOp::eg, std::move(a)); }
inline Ctl eu(Ctl a, Ctl b) { return Ctl::make(CtlOp::eu, std::move(a), std::move(b)); }

/// Left-nested conjunction / disjunction of a non-empty list.
inline Ctl conj(std::initializer_list<Ctl> fs)
{
    auto it = fs.begin();
    Ctl acc = *it++;
    for (; it != fs.end(); ++it) acc = conj(acc, *it);
    return acc;
}
inline Ctl disj_all(const std::vector<Ctl>& fs)
{
    if (fs.empty()) throw std::invalid_argument("empty disjunction");
    Ctl acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}
/// p => q, expanded as !p | q.
inline Ctl implies(Ctl p, Ctl q) { return disj(neg(std::move(p)), std::move(q)); }
}  // namespace ctl

// ---------------------------------------------------------------------------
// Parser

class CtlParseError : public std::runtime_error {
public:
    CtlParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos)
    {
    }
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

class CtlParser {
public:
    explicit CtlParser(const std::string& s) : s_(s) {}

    Ctl parse()
    {
        auto f = parse_or();
        skip();
        if (pos_ != s_.size()) throw CtlParseError("unexpected input", pos_);
        return f;
    }

private:
    static bool ident_char(char c)
    {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == '.' || c == ':' || c == '/' || c == '-' || c == '#' ||
               c == '\'' || c == '@' || c == '$';
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool keyword(const std::string& kw)
    {
        skip();
        if (s_.compare(pos_, kw.size(), kw) != 0) return false;
        auto end = pos_ + kw.size();
        if (kw.back() != '[' && end < s_.size() && ident_char(s_[end])) return false;
        pos_ = end;
        return true;
    }
    bool symbol(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Ctl parse_or()
    {
        auto f = parse_and();
        while (symbol('|')) f = ctl::disj(f, parse_and());
        return f;
    }
    Ctl parse_and()
    {
        auto f = parse_unary();
        while (symbol('&')) f = ctl::conj(f, parse_unary());
        return f;
    }
    Ctl parse_unary()
    {
        skip();
        if (symbol('!')) return ctl::neg(parse_unary());
        if (keyword("E[")) {
            auto a = parse_or();
            if (!keyword("U")) throw CtlParseError("expected 'U'", pos_);
            auto b = parse_or();
            if (!symbol(']')) throw CtlParseError("expected ']'", pos_);
            return ctl::eu(a, b);
        }
        if (keyword("EX")) return ctl::ex(parse_unary());
        if (keyword("EF")) return ctl::ef(parse_unary());
        if (keyword("EG")) return ctl::eg(parse_unary());
        if (symbol('(')) {
            auto f = parse_or();
            if (!symbol(')')) throw CtlParseError("expected ')'", pos_);
            return f;
        }
        skip();
        if (pos_ < s_.size() && s_[pos_] == '"') {
            auto end = s_.find('"', pos_ + 1);
            if (end == std::string::npos) throw CtlParseError("unterminated quoted atom", pos_);
            auto name = s_.substr(pos_ + 1, end - pos_ - 1);
            pos_ = end + 1;
            return ctl::prop(name);
        }
        auto start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        if (start == pos_) throw CtlParseError(pos_ < s_.size() ? "unexpected character" : "unexpected end", pos_);
        auto name = s_.substr(start, pos_ - start);
        if (name == "U") throw CtlParseError("unexpected 'U'", start);
        return ctl::prop(name);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Ctl parse_ctl(const std::string& text) { return detail::CtlParser(text).parse(); }

// ---------------------------------------------------------------------------
// Global fixpoint labelling over finite graphs

/// Finite Kripke structure whose nodes are labelled by one proposition each
/// (a control-state name). Frontier nodes have already lost their successors.
struct LabeledGraph {
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint32_t>> succ;
    bool truncated = false;

    std::size_t size() const { return labels.size(); }

    static LabeledGraph from(const ConfigGraph& g, const MpdsSystem& sys)
    {
        LabeledGraph out;
        out.truncated = g.truncated();
        out.labels.reserve(g.nodes.size());
        for (const auto& n : g.nodes) out.labels.push_back(sys.state_name(n.config.state));
        out.succ.resize(g.nodes.size());
        for (std::size_t v = 0; v < g.nodes.size(); ++v)
            for (auto e : g.out[v]) out.succ[v].push_back(g.edges[e].dst);
        return out;
    }
};

class CtlChecker {
public:
    explicit CtlChecker(const LabeledGraph& g) : g_(g), pred_(g.size())
    {
        for (std::uint32_t v = 0; v < g.size(); ++v)
            for (auto w : g.succ[v]) pred_[w].push_back(v);
    }

    const std::vector<char>& sat(const Ctl& f)
    {
        if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
        std::vector<char> r = compute(f);
        return memo_.emplace(f.get(), std::move(r)).first->second;
    }

private:
    std::vector<char> compute(const Ctl& f)
    {
        const auto n = g_.size();
        std::vector<char> r(n, 0);
        switch (f.op()) {
        case CtlOp::prop:
            for (std::size_t v = 0; v < n; ++v) r[v] = g_.labels[v] == f.atom();
            break;
        case CtlOp::neg: {
            const auto& a = sat(f.lhs());
            for (std::size_t v = 0; v < n; ++v) r[v] = !a[v];
            break;
        }
        case CtlOp::conj:
        case CtlOp::disj: {
            auto a = sat(f.lhs());
            const auto& b = sat(f.rhs());
            for (std::size_t v = 0; v < n; ++v) r[v] = f.op() == CtlOp::conj ? (a[v] && b[v]) : (a[v] || b[v]);
            break;
        }
        case CtlOp::ex: {
            const auto& a = sat(f.lhs());
            for (std::size_t w = 0; w < n; ++w)
                if (a[w])
                    for (auto v : pred_[w]) r[v] = 1;
            break;
        }
        case CtlOp::ef:
        case CtlOp::eu: {
            std::vector<char> through(n, 1);
            if (f.op() == CtlOp::eu) through = sat(f.lhs());
            const auto& goal = sat(f.op() == CtlOp::eu ? f.rhs() : f.lhs());
            std::deque<std::uint32_t> q;
            for (std::uint32_t v = 0; v < n; ++v)
                if (goal[v]) {
                    r[v] = 1;
                    q.push_back(v);
                }
            while (!q.empty()) {
                auto w = q.front();
                q.pop_front();
                for (auto v : pred_[w])
                    if (!r[v] && through[v]) {
                        r[v] = 1;
                        q.push_back(v);
                    }
            }
            break;
        }
        case CtlOp::eg: {
            r = sat(f.lhs());
            std::vector<std::size_t> live(n, 0);
            std::deque<std::uint32_t> q;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (!r[v] || g_.succ[v].empty()) continue;
                for (auto w : g_.succ[v]) live[v] += r[w] ? 1 : 0;
                if (live[v] == 0) q.push_back(v);
            }
            while (!q.empty()) {
                auto w = q.front();
                q.pop_front();
                if (!r[w]) continue;
                r[w] = 0;
                for (auto v : pred_[w])
                    if (r[v] && --live[v] == 0) q.push_back(v);
            }
            break;
        }
        }
        return r;
    }

    const LabeledGraph& g_;
    std::vector<std::vector<std::uint32_t>> pred_;
    std::unordered_map<const CtlNode*, std::vector<char>> memo_;
};

/// Satisfaction set as a sorted list of node ids.
inline std::vector<std::uint32_t> check(const LabeledGraph& g, const Ctl& f)
{
    CtlChecker c(g);
    const auto& s = c.sat(f);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < s.size(); ++v)
        if (s[v]) out.push_back(v);
    return out;
}

inline bool holds(const LabeledGraph& g, std::uint32_t node, const Ctl& f)
{
    if (node >= g.size()) throw std::out_of_range("unknown node id " + std::to_string(node));
    CtlChecker c(g);
    return c.sat(f)[node] != 0;
}

}  // namespace mpds
