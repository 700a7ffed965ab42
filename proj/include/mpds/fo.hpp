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
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "games.hpp"
#include "system.hpp"

namespace mpds {

enum class FoKind : std::uint8_t { lt, eq, neg, conj, disj, exists, forall };

struct FoNode;
using Fo = std::shared_ptr<const FoNode>;

/// FO(<) over the naturals. Atoms carry two variable names; quantifiers
/// carry the bound name in x.
struct FoNode {
    FoKind kind;
    std::string x, y;
    Fo lhs, rhs;
};

namespace fo {
inline Fo lt(std::string x, std::string y) { return std::make_shared<FoNode>(FoNode{FoKind::lt, std::move(x), std::move(y), {}, {}}); }
inline Fo eq(std::string x, std::string y) { return std::make_shared<FoNode>(FoNode{FoKind::eq, std::move(x), std::move(y), {}, {}}); }
inline Fo neg(Fo f) { return std::make_shared<FoNode>(FoNode{FoKind::neg, {}, {}, std::move(f), {}}); }
inline Fo conj(Fo a, Fo b) { return std::make_shared<FoNode>(FoNode{FoKind::conj, {}, {}, std::move(a), std::move(b)}); }
inline Fo disj(Fo a, Fo b) { return std::make_shared<FoNode>(FoNode{FoKind::disj, {}, {}, std::move(a), std::move(b)}); }
inline Fo exists(std::string x, Fo f) { return std::make_shared<FoNode>(FoNode{FoKind::exists, std::move(x), {}, std::move(f), {}}); }
inline Fo forall(std::string x, Fo f) { return std::make_shared<FoNode>(FoNode{FoKind::forall, std::move(x), {}, std::move(f), {}}); }
}  // namespace fo

inline bool is_quantifier(const Fo& f) { return f->kind == FoKind::exists || f->kind == FoKind::forall; }

/// Fully parenthesised text accepted by parse_fo.
inline std::string to_string(const Fo& f)
{
    switch (f->kind) {
    case FoKind::lt: return f->x + "<" + f->y;
    case FoKind::eq: return f->x + "=" + f->y;
    case FoKind::neg: return "!(" + to_string(f->lhs) + ")";
    case FoKind::conj: return "(" + to_string(f->lhs) + " & " + to_string(f->rhs) + ")";
    case FoKind::disj: return "(" + to_string(f->lhs) + " | " + to_string(f->rhs) + ")";
    case FoKind::exists: return "E " + f->x + ". " + to_string(f->lhs);
    case FoKind::forall: return "A " + f->x + ". " + to_string(f->lhs);
    }
    return {};
}

inline std::size_t fo_size(const Fo& f)
{
    std::size_t n = 1;
    if (f->lhs) n += fo_size(f->lhs);
    if (f->rhs) n += fo_size(f->rhs);
    return n;
}

inline int quantifier_count(const Fo& f)
{
    int n = is_quantifier(f) ? 1 : 0;
    if (f->lhs) n += quantifier_count(f->lhs);
    if (f->rhs) n += quantifier_count(f->rhs);
    return n;
}

inline int quantifier_depth(const Fo& f)
{
    int d = 0;
    if (f->lhs) d = quantifier_depth(f->lhs);
    if (f->rhs) d = std::max(d, quantifier_depth(f->rhs));
    return d + (is_quantifier(f) ? 1 : 0);
}

inline void free_variables(const Fo& f, std::set<std::string>& out, std::set<std::string> bound = {})
{
    switch (f->kind) {
    case FoKind::lt:
    case FoKind::eq:
        if (!bound.count(f->x)) out.insert(f->x);
        if (!bound.count(f->y)) out.insert(f->y);
        return;
    case FoKind::exists:
    case FoKind::forall:
        bound.insert(f->x);
        free_variables(f->lhs, out, bound);
        return;
    default:
        free_variables(f->lhs, out, bound);
        if (f->rhs) free_variables(f->rhs, out, bound);
    }
}

inline std::set<std::string> free_variables(const Fo& f)
{
    std::set<std::string> out;
    free_variables(f, out);
    return out;
}

/// Every variable name occurring in f, free or bound.
inline std::set<std::string> variables(const Fo& f)
{
    std::set<std::string> out;
    if (f->kind == FoKind::lt || f->kind == FoKind::eq) out = {f->x, f->y};
    if (is_quantifier(f)) out.insert(f->x);
    for (const auto& c : {f->lhs, f->rhs})
        if (c) out.merge(variables(c));
    return out;
}

class FoParseError : public std::runtime_error {
public:
    FoParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos)
    {
    }
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

// f := "E" v "." f | "A" v "." f | f "|" f | f "&" f | "!" f | v "<" v | v "=" v | "(" f ")"
// Precedence: ! binds tightest, then &, then |; quantifier bodies extend right.
class FoParser {
public:
    explicit FoParser(const std::string& s) : s_(s) {}

    Fo parse()
    {
        auto f = disj();
        skip();
        if (pos_ != s_.size()) throw FoParseError("unexpected input", pos_);
        return f;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
    bool keyword(char k)
    {
        skip();
        if (pos_ + 1 < s_.size() && s_[pos_] == k && !ident_char(s_[pos_ + 1])) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string var()
    {
        skip();
        auto start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        if (start == pos_) throw FoParseError("expected variable", pos_);
        auto v = s_.substr(start, pos_ - start);
        if (v == "E" || v == "A") throw FoParseError("quantifier keyword used as variable", start);
        return v;
    }

    Fo disj()
    {
        auto f = conj();
        while (eat('|')) f = fo::disj(f, conj());
        return f;
    }
    Fo conj()
    {
        auto f = unary();
        while (eat('&')) f = fo::conj(f, unary());
        return f;
    }
    Fo unary()
    {
        if (eat('!')) return fo::neg(unary());
        if (eat('(')) {
            auto f = disj();
            if (!eat(')')) throw FoParseError("expected ')'", pos_);
            return f;
        }
        for (char k : {'E', 'A'}) {
            if (keyword(k)) {
                auto x = var();
                if (!eat('.')) throw FoParseError("expected '.' after quantified variable", pos_);
                auto body = disj();
                return k == 'E' ? fo::exists(x, body) : fo::forall(x, body);
            }
        }
        auto x = var();
        if (eat('<')) return fo::lt(x, var());
        if (eat('=')) return fo::eq(x, var());
        throw FoParseError("expected '<' or '='", pos_);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

inline bool reserved_name(const std::string& v)
{
    if (v == "a" || v == "zeta" || v == "bot") return true;
    if (v.size() >= 2 && (v[0] == 'a' || v[0] == 'b') && v[1] != '0' &&
        std::all_of(v.begin() + 1, v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return true;
    return false;
}

inline Fo rename(const Fo& f, std::map<std::string, std::string> scope, std::set<std::string>& used)
{
    auto look = [&](const std::string& v) {
        auto it = scope.find(v);
        return it == scope.end() ? v : it->second;
    };
    switch (f->kind) {
    case FoKind::lt: return fo::lt(look(f->x), look(f->y));
    case FoKind::eq: return fo::eq(look(f->x), look(f->y));
    case FoKind::neg: return fo::neg(rename(f->lhs, scope, used));
    case FoKind::conj: return fo::conj(rename(f->lhs, scope, used), rename(f->rhs, scope, used));
    case FoKind::disj: return fo::disj(rename(f->lhs, scope, used), rename(f->rhs, scope, used));
    case FoKind::exists:
    case FoKind::forall: {
        auto name = f->x;
        for (int i = 1; used.count(name) || reserved_name(name); ++i) name = f->x + "_" + std::to_string(i);
        used.insert(name);
        scope[f->x] = name;
        auto body = rename(f->lhs, scope, used);
        return f->kind == FoKind::exists ? fo::exists(name, body) : fo::forall(name, body);
    }
    }
    return f;
}

}  // namespace detail

/// Parses and renames bound variables apart (also away from free names and
/// the names reserved for stack letters).
inline Fo parse_fo(const std::string& text)
{
    auto f = detail::FoParser(text).parse();
    auto used = free_variables(f);
    for (const auto& v : used)
        if (detail::reserved_name(v)) throw FoParseError("free variable uses a reserved name: " + v, 0);
    return detail::rename(f, {}, used);
}

/// Pushes negations to the atoms; the result contains no neg nodes.
inline Fo to_nnf(const Fo& f, bool negate = false)
{
    switch (f->kind) {
    case FoKind::lt:
        return negate ? fo::disj(fo::eq(f->x, f->y), fo::lt(f->y, f->x)) : f;
    case FoKind::eq:
        return negate ? fo::disj(fo::lt(f->x, f->y), fo::lt(f->y, f->x)) : f;
    case FoKind::neg: return to_nnf(f->lhs, !negate);
    case FoKind::conj:
    case FoKind::disj: {
        bool as_conj = (f->kind == FoKind::conj) != negate;
        auto a = to_nnf(f->lhs, negate), b = to_nnf(f->rhs, negate);
        return as_conj ? fo::conj(a, b) : fo::disj(a, b);
    }
    case FoKind::exists:
    case FoKind::forall: {
        bool ex = (f->kind == FoKind::exists) != negate;
        auto body = to_nnf(f->lhs, negate);
        return ex ? fo::exists(f->x, body) : fo::forall(f->x, body);
    }
    }
    return f;
}

inline bool is_nnf(const Fo& f)
{
    if (f->kind == FoKind::neg) return false;
    return (!f->lhs || is_nnf(f->lhs)) && (!f->rhs || is_nnf(f->rhs));
}

using Valuation = std::map<std::string, unsigned>;

/// Top-first valuation word: variables in descending value order, each
/// followed by as many fillers as separate it from the next one down.
inline std::vector<StackSymbol> encode_valuation(const Valuation& rho, const std::vector<std::string>& order)
{
    std::vector<std::pair<std::string, unsigned>> vars;
    for (const auto& v : order)
        if (auto it = rho.find(v); it != rho.end()) vars.emplace_back(v, it->second);
    if (vars.size() != rho.size()) throw std::invalid_argument("variable order does not cover the valuation");
    std::stable_sort(vars.begin(), vars.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<StackSymbol> w;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        w.push_back(StackSymbol::variable(vars[i].first));
        unsigned below = i + 1 < vars.size() ? vars[i + 1].second : 0;
        for (unsigned j = below; j < vars[i].second; ++j) w.push_back(StackSymbol::filler());
    }
    w.push_back(StackSymbol::bottom());
    return w;
}

/// Inverse of encode_valuation; accepts any well-formed word (equal values
/// in any order). Throws on malformed words.
inline Valuation decode_valuation(const std::vector<StackSymbol>& w)
{
    Valuation rho;
    if (w.empty() || w.back().kind != SymbolKind::bottom) throw std::invalid_argument("valuation word must end in bottom");
    if (w.size() > 1 && w.front().kind != SymbolKind::variable && w.front().kind != SymbolKind::tm_letter)
        throw std::invalid_argument("valuation word must start with a variable");
    unsigned fillers = 0;
    for (std::size_t i = w.size() - 1; i-- > 0;) {
        const auto& s = w[i];
        if (s.kind == SymbolKind::filler) {
            ++fillers;
        } else if (s.kind == SymbolKind::variable || s.kind == SymbolKind::tm_letter) {
            if (!rho.emplace(s.name, fillers).second) throw std::invalid_argument("variable occurs twice: " + s.name);
        } else {
            throw std::invalid_argument("unexpected letter in valuation word: " + s.spelling());
        }
    }
    return rho;
}

struct FoReport {
    std::size_t states = 0;
    std::size_t transitions = 0;
    int quantifiers = 0;
    int phase_bound = 1;
    std::size_t formula_size = 0;
    std::size_t variables = 0;
};

struct CompiledGame {
    MpdsSystem system;
    Fo formula;
    std::vector<std::string> variables;  // symbol order used for the stack alphabet
    FoReport report;

    Configuration initial(const Valuation& rho = {}) const
    {
        Configuration c;
        c.state = system.initial();
        std::vector<SymbolId> w;
        for (const auto& s : encode_valuation(rho, variables)) w.push_back(system.symbol_id(s));
        c.stacks = {w, {kBottom}};
        return c;
    }
};

namespace detail {

class FoCompiler {
public:
    explicit FoCompiler(const Fo& f) : b_(2)
    {
        auto vs = mpds::variables(f);
        vars_.assign(vs.begin(), vs.end());
        b_.symbol(StackSymbol::filler());
        for (const auto& v : vars_) b_.symbol(StackSymbol::variable(v));
        t_ = b_.state("T");
        f_ = b_.state("F");
        b_.internal(t_, t_);
        b_.internal(f_, f_);
        b_.set_owner(t_, Player::even);
        b_.set_priority(t_, 0);
        b_.set_owner(f_, Player::even);
        b_.set_priority(f_, 1);
        root_ = compile(f);
    }

    CompiledGame finish(const Fo& f)
    {
        b_.set_initial(root_);
        b_.complete_game_maps(Player::even, 0);
        CompiledGame g{b_.build(), f, vars_, {}};
        g.report.states = g.system.state_count();
        g.report.transitions = g.system.transitions().size();
        g.report.quantifiers = quantifier_count(f);
        g.report.phase_bound = 2 * g.report.quantifiers + 1;
        g.report.formula_size = fo_size(f);
        g.report.variables = vars_.size();
        return g;
    }

private:
    SymbolId sym(const std::string& v) { return b_.symbol(StackSymbol::variable(v)); }
    SymbolId filler() { return b_.symbol(StackSymbol::filler()); }

    StateId fresh(const std::string& name, Player owner, int prio)
    {
        auto q = b_.state(name);
        b_.set_owner(q, owner);
        b_.set_priority(q, prio);
        return q;
    }

    StateId compile(const Fo& f)
    {
        auto name = to_string(f);
        if (b_.has_state(name)) return b_.state(name);
        bool p1 = f->kind == FoKind::forall || f->kind == FoKind::conj;
        auto own = p1 ? Player::odd : Player::even;
        auto q = fresh(name, own, 0);
        switch (f->kind) {
        case FoKind::conj:
        case FoKind::disj:
            b_.internal(q, compile(f->lhs));
            b_.internal(q, compile(f->rhs));
            break;
        case FoKind::exists:
        case FoKind::forall: quantifier(f, q, own); break;
        case FoKind::eq: equality(f, q); break;
        case FoKind::lt: less(f, q); break;
        case FoKind::neg: throw std::invalid_argument("formula is not in negation normal form");
        }
        return q;
    }

    void quantifier(const Fo& f, StateId q, Player own)
    {
        const auto name = to_string(f);
        const auto x = sym(f->x);
        auto tag = [&](const std::string& t) { return "(" + name + "," + t + ")"; };
        auto right = fresh(tag(">"), own, f->kind == FoKind::forall ? 0 : 1);
        auto between = fresh(tag("<"), own, 0);
        auto to2 = fresh(tag("1t2"), own, 0);
        auto to1 = fresh(tag("2t1"), own, 0);
        auto body = compile(f->lhs);
        b_.internal(q, between);
        b_.internal(q, right);
        b_.push(right, kWildcard, right, 1, filler());
        b_.push(right, kWildcard, body, 1, x);
        b_.internal(between, to2);
        std::vector<std::pair<std::string, SymbolId>> letters{{"a", filler()}};
        for (const auto& v : vars_) letters.emplace_back(v, sym(v));
        for (const auto& [spell, c] : letters) {
            auto hold2 = fresh(tag("1t2," + spell), own, 0);
            b_.pop(to2, c, hold2, 1);
            b_.push(hold2, kWildcard, to2, 2, c);
        }
        b_.push(to2, kWildcard, to1, 1, x);
        for (const auto& [spell, c] : letters) {
            auto hold1 = fresh(tag("2t1," + spell), own, 0);
            b_.pop(to1, c, hold1, 2);
            b_.push(hold1, kWildcard, to1, 1, c);
        }
        b_.noop(to1, static_cast<std::int32_t>(kBottom), 2, body);
    }

    // Pops stack 1 until one of the two variables shows up.
    void equality(const Fo& f, StateId q)
    {
        b_.pop(q, filler(), q, 1);
        for (const auto& v : vars_)
            if (v != f->x && v != f->y) b_.pop(q, sym(v), q, 1);
        if (f->x == f->y) {
            b_.pop(q, sym(f->x), t_, 1);
            return;
        }
        b_.pop(q, sym(f->x), seek(f->y), 1);
        b_.pop(q, sym(f->y), seek(f->x), 1);
    }

    // The larger value sits higher on the stack, so y must come first and
    // at least one filler must separate it from x.
    void less(const Fo& f, StateId q)
    {
        if (f->x == f->y) {
            b_.internal(q, f_);
            return;
        }
        b_.pop(q, filler(), q, 1);
        for (const auto& v : vars_)
            if (v != f->x && v != f->y) b_.pop(q, sym(v), q, 1);
        b_.pop(q, sym(f->x), f_, 1);
        b_.pop(q, sym(f->y), gap(f->x), 1);
    }

    StateId seek(const std::string& x)
    {
        auto name = "seek:" + x;
        if (b_.has_state(name)) return b_.state(name);
        auto s = fresh(name, Player::even, 0);
        for (const auto& v : vars_)
            if (v != x) b_.pop(s, sym(v), s, 1);
        b_.pop(s, filler(), f_, 1);
        b_.pop(s, sym(x), t_, 1);
        return s;
    }

    StateId gap(const std::string& x)
    {
        auto name = "gap:" + x;
        if (b_.has_state(name)) return b_.state(name);
        auto s = fresh(name, Player::even, 0);
        for (const auto& v : vars_)
            if (v != x) b_.pop(s, sym(v), s, 1);
        b_.pop(s, filler(), t_, 1);
        b_.pop(s, sym(x), f_, 1);
        return s;
    }

    SystemBuilder b_;
    std::vector<std::string> vars_;
    StateId t_ = 0, f_ = 0, root_ = 0;
};

}  // namespace detail

/// Compiles an NNF formula into a two-stack game whose initial state is the
/// formula itself. Stack 1 holds the valuation; stack 2 is scratch space for
/// inserting a variable below the top.
inline CompiledGame compile_fo(const Fo& f)
{
    if (!is_nnf(f)) throw std::invalid_argument("formula is not in negation normal form");
    detail::FoCompiler c(f);
    return c.finish(f);
}

/// Follows the deterministic atomic checker from c to T or F.
inline bool atomic_verdict_trace(const CompiledGame& g, const Configuration& c, RunWord* run = nullptr)
{
    const auto& sys = g.system;
    const auto t = sys.state("T"), f = sys.state("F");
    auto cur = c;
    for (std::size_t steps = 0;; ++steps) {
        if (cur.state == t) return true;
        if (cur.state == f) return false;
        auto next = successors(sys, cur);
        if (next.size() != 1) throw std::invalid_argument("atomic check is stuck or not deterministic; malformed valuation");
        if (run) run->push_back(next.front().first);
        cur = std::move(next.front().second);
        if (steps > 1'000'000) throw std::runtime_error("atomic check does not terminate");
    }
}

struct FoGameResult {
    Player winner = Player::even;
    bool truncated = false;
    std::size_t positions = 0;
    int max_phases_seen = 0;
};

/// Fillers that fit on stack 1 under `stack_cap` once every variable is
/// placed; the game then ranges over the domain {0..N}.
inline std::size_t fo_domain_bound(const CompiledGame& g, std::size_t stack_cap)
{
    if (stack_cap < g.variables.size()) throw std::invalid_argument("stack cap cannot hold every variable");
    return stack_cap - g.variables.size();
}

/// Winner of the compiled game from the empty valuation at phase bound
/// 2q+1 with the given stack cap. Fillers are capped so that variable
/// placement never runs out of room; otherwise the player who moves last
/// could be cornered by the cap rather than by the formula.
inline FoGameResult solve_fo_game(const CompiledGame& g, std::size_t stack_cap,
                                  std::size_t node_cap = 1'000'000)
{
    ExplorationBounds b;
    b.stack_cap = stack_cap;
    b.node_cap = node_cap;
    b.letter_caps = {{g.system.symbol_id(StackSymbol::filler()), fo_domain_bound(g, stack_cap)}};
    auto graph = build_phase_game(g.system, g.initial(), g.report.phase_bound, b);
    auto sol = solve_parity(graph.game);
    return {winner_from(graph, sol, 0), graph.truncated(), graph.size(), graph.max_phases_seen()};
}

}  // namespace mpds
