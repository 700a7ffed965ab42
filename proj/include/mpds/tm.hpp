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
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "counters.hpp"
#include "ctl.hpp"
#include "gadgets.hpp"
#include "system.hpp"

namespace mpds {

/// One move of a space-bounded machine: rewrite the scanned cell or move
/// the head, never both.
struct TmTransition {
    std::string from;
    std::string read;
    std::string to;
    bool moves = false;
    char dir = 'R';      // 'L' or 'R' when moves
    std::string write;   // when !moves
};

struct TmMachine {
    std::vector<std::string> states;
    std::vector<std::string> tape_alphabet;
    std::string blank;
    std::string initial;
    std::vector<std::string> finals;
    std::vector<TmTransition> transitions;

    bool is_state(const std::string& s) const { return std::find(states.begin(), states.end(), s) != states.end(); }
    bool is_tape(const std::string& s) const
    {
        return std::find(tape_alphabet.begin(), tape_alphabet.end(), s) != tape_alphabet.end();
    }
    bool is_final(const std::string& s) const { return std::find(finals.begin(), finals.end(), s) != finals.end(); }
};

class TmError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void validate(const TmMachine& m)
{
    auto fail = [](const std::string& what) { throw TmError("turing machine: " + what); };
    if (m.states.empty()) fail("no states");
    if (m.tape_alphabet.empty()) fail("empty tape alphabet");
    std::set<std::string> seen;
    for (const auto& s : m.states)
        if (!seen.insert(s).second) fail("duplicate state " + s);
    for (const auto& s : m.tape_alphabet)
        if (!seen.insert(s).second) fail("symbol " + s + " is both a state and a tape letter, or repeated");
    for (const auto& s : seen)
        if (StackSymbol::parse(s).kind != SymbolKind::tm_letter) fail("name " + s + " is reserved for stack letters");
    if (!m.is_tape(m.blank)) fail("blank is not a tape letter");
    if (!m.is_state(m.initial)) fail("unknown initial state");
    for (const auto& f : m.finals)
        if (!m.is_state(f)) fail("unknown final state " + f);
    for (const auto& t : m.transitions) {
        if (!m.is_state(t.from) || !m.is_state(t.to)) fail("transition uses an unknown state");
        if (!m.is_tape(t.read)) fail("transition reads an unknown letter");
        if (t.moves) {
            if (t.dir != 'L' && t.dir != 'R') fail("move direction must be L or R");
            if (!t.write.empty()) fail("a move may not also write (write xor move)");
        } else if (!m.is_tape(t.write)) {
            fail("transition writes an unknown letter");
        }
    }
}

/// A configuration over a fixed number of tape cells. The head scans
/// tape[head].
struct TmConfig {
    std::string state;
    std::vector<std::string> tape;
    std::size_t head = 0;

    friend bool operator==(const TmConfig&, const TmConfig&) = default;
};

/// Addressed positions of a k-configuration: Max(k,n)+1. The state letter
/// takes one of them, so the tape has Max(k,n) cells.
inline std::size_t tm_positions(const CounterParams& p)
{
    auto m = max_value(p);
    if (m > 1'000'000) throw ScaleError("configuration too long to materialise");
    return static_cast<std::size_t>(m) + 1;
}
inline std::size_t tm_cells(const CounterParams& p) { return tm_positions(p) - 1; }

/// Letters left to right: cells before the head, the state, the rest.
inline std::vector<std::string> tm_letters(const TmConfig& c)
{
    std::vector<std::string> out(c.tape.begin(), c.tape.begin() + static_cast<std::ptrdiff_t>(c.head));
    out.push_back(c.state);
    out.insert(out.end(), c.tape.begin() + static_cast<std::ptrdiff_t>(c.head), c.tape.end());
    return out;
}

/// Stack word, top-first: position Max (right end) first, each position as
/// its level-k address followed by its letter, then zeta.
inline std::vector<StackSymbol> encode_tm_config(const TmMachine& m, const CounterParams& p, const TmConfig& c)
{
    auto n = tm_positions(p);
    if (c.tape.size() + 1 != n)
        throw std::invalid_argument("tape has " + std::to_string(c.tape.size()) + " cells, expected " +
                                    std::to_string(n - 1));
    if (c.head >= c.tape.size()) throw std::invalid_argument("head outside the tape");
    if (!m.is_state(c.state)) throw std::invalid_argument("unknown state " + c.state);
    for (const auto& x : c.tape)
        if (!m.is_tape(x)) throw std::invalid_argument("tape holds a non-tape letter " + x);
    auto letters = tm_letters(c);
    std::vector<StackSymbol> w;
    for (auto i = n; i-- > 0;) {
        auto addr = encode_counter(p, BigNat(i));
        w.insert(w.end(), addr.begin(), addr.end());
        w.push_back(StackSymbol::letter(letters[i]));
    }
    w.push_back(StackSymbol::separator());
    return w;
}

/// Inverse of encode_tm_config; nullopt unless the word is a valid
/// k-configuration terminated by zeta.
inline std::optional<TmConfig> decode_tm_config(const TmMachine& m, const CounterParams& p,
                                                const std::vector<StackSymbol>& w)
{
    auto n = tm_positions(p);
    if (w.empty() || w.back().kind != SymbolKind::separator) return std::nullopt;
    std::vector<std::string> letters(n);
    std::size_t at = 0;
    for (auto i = n; i-- > 0;) {
        CounterWord addr;
        while (at < w.size() && is_counter_letter(w[at], p.level)) addr.push_back(w[at++]);
        if (at >= w.size() || w[at].kind != SymbolKind::tm_letter) return std::nullopt;
        if (!is_valid_counter(p, addr) || decode_counter(p, addr) != i) return std::nullopt;
        letters[i] = w[at++].name;
    }
    if (at + 1 != w.size()) return std::nullopt;
    TmConfig c;
    std::optional<std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) {
        if (m.is_state(letters[i])) {
            if (pos) return std::nullopt;
            pos = i;
            c.state = letters[i];
        } else if (m.is_tape(letters[i])) {
            c.tape.push_back(letters[i]);
        } else {
            return std::nullopt;
        }
    }
    if (!pos || *pos + 1 == n) return std::nullopt;
    c.head = *pos;
    return c;
}

inline bool is_valid_tm_config(const TmMachine& m, const CounterParams& p, const std::vector<StackSymbol>& w)
{
    return decode_tm_config(m, p, w).has_value();
}

/// Initial configuration on input w: head on the first cell, w then blanks.
inline TmConfig initial_tm_config(const TmMachine& m, const std::vector<std::string>& input, std::size_t cells)
{
    if (input.size() > cells) throw std::invalid_argument("input longer than the tape");
    TmConfig c{m.initial, std::vector<std::string>(cells, m.blank), 0};
    std::copy(input.begin(), input.end(), c.tape.begin());
    return c;
}

/// Splits an input string into tape letters: single characters, or
/// whitespace-separated names when it contains spaces.
inline std::vector<std::string> split_input(const std::string& w)
{
    std::vector<std::string> out;
    if (w.find(' ') == std::string::npos) {
        for (char ch : w) out.emplace_back(1, ch);
        return out;
    }
    std::string cur;
    for (char ch : w) {
        if (ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Configurations reachable in one move, in transition order.
inline std::vector<TmConfig> tm_successors(const TmMachine& m, const TmConfig& c)
{
    std::vector<TmConfig> out;
    for (const auto& t : m.transitions) {
        if (t.from != c.state || t.read != c.tape.at(c.head)) continue;
        TmConfig d = c;
        d.state = t.to;
        if (!t.moves) d.tape[d.head] = t.write;
        else if (t.dir == 'R' && d.head + 1 < d.tape.size()) ++d.head;
        else if (t.dir == 'L' && d.head > 0) --d.head;
        else continue;
        out.push_back(std::move(d));
    }
    return out;
}

/// Number of configurations on a shortest accepting run within `cells`
/// cells, or nullopt if there is none.
inline std::optional<std::size_t> shortest_accepting_run(const TmMachine& m, const std::vector<std::string>& input,
                                                         std::size_t cells, std::size_t visit_cap = 1'000'000)
{
    auto start = initial_tm_config(m, input, cells);
    std::map<std::tuple<std::string, std::vector<std::string>, std::size_t>, std::size_t> depth;
    std::vector<TmConfig> layer{start};
    depth[{start.state, start.tape, start.head}] = 1;
    for (std::size_t d = 1; !layer.empty(); ++d) {
        std::vector<TmConfig> next;
        for (const auto& c : layer) {
            if (m.is_final(c.state)) return d;
            for (auto& e : tm_successors(m, c))
                if (depth.emplace(std::make_tuple(e.state, e.tape, e.head), d + 1).second) next.push_back(std::move(e));
            if (depth.size() > visit_cap) throw std::runtime_error("machine explores too many configurations");
        }
        layer = std::move(next);
    }
    return std::nullopt;
}

/// Interns zeta and every letter of Sigma_M. Must run before a
/// GadgetLibrary is created on the same builder.
inline void intern_tm_letters(SystemBuilder& b, const TmMachine& m)
{
    b.symbol(StackSymbol::separator());
    for (const auto& x : m.tape_alphabet) b.symbol(StackSymbol::letter(x));
    for (const auto& x : m.states) b.symbol(StackSymbol::letter(x));
}

/// Subroutines over k-configurations, built on the counter gadgets. Each
/// Gadget formula holds at a host state with an internal move to the entry
/// iff the host configuration violates the predicate.
class TmGadgets {
public:
    TmGadgets(GadgetLibrary& lib, const TmMachine& m, std::vector<std::string> input)
        : lib_(lib), b_(lib.builder()), m_(m), input_(std::move(input)), k_(lib.max_level())
    {
        validate(m_);
        zeta_ = b_.symbol(StackSymbol::separator());
        for (const auto& x : m_.tape_alphabet) tape_.insert(b_.symbol(StackSymbol::letter(x)));
        for (const auto& x : m_.states) states_.insert(b_.symbol(StackSymbol::letter(x)));
        sigma_ = GadgetLibrary::join(tape_, states_);
        addr_ = lib_.upto(k_);
        rest_ = lib_.outside(GadgetLibrary::join(addr_, sigma_));
        for (const auto& x : input_)
            if (!m_.is_tape(x) || x == m_.blank) throw TmError("input letter " + x + " is not a non-blank tape letter");
        if (input_.empty()) throw TmError("input word must be non-empty");
        if (input_.size() > tm_cells({k_, static_cast<int>(input_.size())}))
            throw TmError("input does not fit the tape");
    }

    GadgetLibrary& library() { return lib_; }
    const SymbolSet& addresses() const { return addr_; }
    const SymbolSet& sigma() const { return sigma_; }
    SymbolId zeta() const { return zeta_; }

    /// ValidConf on stack p: a valid k-configuration followed by zeta.
    Gadget valid_conf(int p = 1)
    {
        auto key = "qvalidconf" + GadgetLibrary::tag(p);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto sfx = "conf" + GadgetLibrary::tag(p);

        // Exactly one letter of Q_M.
        auto c0 = fresh("qconfone" + GadgetLibrary::tag(p));
        auto c1 = fresh("qconfone" + GadgetLibrary::tag(p) + ".seen");
        lib_.pop_each(c0, GadgetLibrary::join(addr_, tape_), c0, p);
        lib_.pop_each(c0, states_, c1, p);
        lib_.noop_each(c0, rest_, p, lib_.q_err());
        lib_.pop_each(c1, GadgetLibrary::join(addr_, tape_), c1, p);
        lib_.pop_each(c1, states_, lib_.q_err(), p);
        Gadget one{c0, err_from(c0), 1};

        // The rightmost position holds no state letter.
        auto t0 = fresh("qconftop" + GadgetLibrary::tag(p));
        lib_.pop_each(t0, addr_, t0, p);
        lib_.pop_each(t0, states_, lib_.q_err(), p);
        Gadget top{t0, err_from(t0), 1};

        auto g = lib_.valid_blocks(key, k_, sigma_, {zeta_}, p, sfx, {one, top});
        return memo_[key] = g;
    }

    /// InitConf on stack 1: the configuration is s_M w blank...blank.
    Gadget init()
    {
        if (auto it = memo_.find("qinit"); it != memo_.end()) return it->second;
        auto blank = sym(m_.blank);
        auto entry = fresh("qinit");
        // expect[i]: positions above i are matched; expect[0] wants s_M.
        std::vector<StateId> expect(input_.size());
        for (std::size_t i = 0; i < input_.size(); ++i) expect[i] = fresh("qinit." + std::to_string(i));
        auto accept = fresh("qinit.done");
        auto wrong_except = [&](StateId q, SymbolId ok) {
            for (auto x : sigma_)
                if (x != ok) b_.pop(q, x, lib_.q_err(), 1);
        };
        lib_.pop_each(entry, addr_, entry, 1);
        b_.pop(entry, blank, entry, 1);
        auto n = input_.size();
        b_.pop(entry, sym(input_[n - 1]), n == 1 ? expect[0] : expect[n - 1], 1);
        for (auto x : sigma_)
            if (x != blank && x != sym(input_[n - 1])) b_.pop(entry, x, lib_.q_err(), 1);
        for (std::size_t i = n; i-- > 1;) {
            // expect[i] wants input letter i-1 (0-based), i.e. the letter at position i.
            auto want = sym(input_[i - 1]);
            lib_.pop_each(expect[i], addr_, expect[i], 1);
            b_.pop(expect[i], want, i == 1 ? expect[0] : expect[i - 1], 1);
            wrong_except(expect[i], want);
        }
        auto s = sym(m_.initial);
        lib_.pop_each(expect[0], addr_, expect[0], 1);
        b_.pop(expect[0], s, accept, 1);
        wrong_except(expect[0], s);
        lib_.pop_each(accept, addr_, accept, 1);
        lib_.pop_each(accept, sigma_, lib_.q_err(), 1);
        Gadget g{entry, err_from(entry), 1};
        return memo_["qinit"] = g;
    }

    /// FinalConf on stack 1: some letter of F_M occurs before zeta.
    Gadget final_conf()
    {
        if (auto it = memo_.find("qfinal"); it != memo_.end()) return it->second;
        auto q = fresh("qfinal");
        auto seen = fresh("qfinal.seen");
        lib_.pop_each(q, addr_, q, 1);
        for (const auto& x : m_.tape_alphabet) b_.pop(q, sym(x), q, 1);
        for (const auto& x : m_.states) b_.pop(q, sym(x), m_.is_final(x) ? seen : q, 1);
        lib_.noop_each(q, rest_, 1, lib_.q_err());
        Gadget g{q, err_from(q), 1};
        return memo_["qfinal"] = g;
    }

    /// EqConf: the configurations on top of the two stacks are equal.
    Gadget eq_conf()
    {
        if (auto it = memo_.find("qeqconfig"); it != memo_.end()) return it->second;
        auto g = lib_.eq_blocks("qeqconfig", k_, sigma_, 1, "conf");
        return memo_["qeqconfig"] = g;
    }

    /// Move: the configuration on stack 2 follows from the one on stack 1
    /// by one step of the machine.
    Gadget move()
    {
        if (auto it = memo_.find("qmove"); it != memo_.end()) return it->second;
        auto q = fresh("qmove");
        auto eqk = lib_.eq(k_, 1);

        // Far from the head: some position i with no state letter at
        // i-1, i, i+1 on stack 1 differs between the stacks.
        auto at0 = fresh("qsimple");
        auto atg = fresh("qsimple.g");
        auto atq = fresh("qsimple.q");
        auto in = fresh("qsimple.in");
        auto fin = fresh("qsimplef");
        for (auto a : {at0, atg, atq}) lib_.pop_each(a, addr_, in, 1);
        lib_.pop_each(in, addr_, in, 1);
        lib_.pop_each(in, tape_, atg, 1);
        lib_.pop_each(in, states_, atq, 1);
        lib_.noop_each(at0, addr_, 1, fin);
        lib_.noop_each(atg, addr_, 1, fin);

        auto nf = fresh("qnotfromq");
        auto nf1 = fresh("qnotfromq.cur");
        auto nf2 = fresh("qnotfromq.next");
        lib_.pop_each(nf, addr_, nf, 1);
        lib_.pop_each(nf, sigma_, nf1, 1);
        lib_.noop_each(nf1, rest_, 1, lib_.q_win());
        lib_.pop_each(nf1, addr_, nf2, 1);
        lib_.pop_each(nf2, addr_, nf2, 1);
        lib_.pop_each(nf2, tape_, lib_.q_win(), 1);
        b_.internal(fin, nf);

        auto rfin = fresh("rsimplef");
        auto rs = lib_.skip_blocks("rsimple", addr_, sigma_, 2, rfin, addr_);
        b_.internal(fin, rs);
        b_.internal(rfin, eqk.entry);
        auto rc = fresh("qrcchkn");
        lib_.pop_each(rc, addr_, rc, 2);
        for (auto x : sigma_) {
            auto hold = fresh("qrcchkn.read" + std::to_string(x));
            b_.pop(rc, x, hold, 2);
            lib_.pop_each(hold, addr_, hold, 1);
            for (auto y : tape_)
                if (y != x) b_.pop(hold, y, lib_.q_err(), 1);
        }
        b_.internal(rfin, rc);
        auto simple = ctl::ef(ctl::conj(
            {ctl::prop("qsimplef"), ctl::ex(ctl::conj(ctl::prop("qnotfromq"), ef_win())),
             ctl::ex(ctl::conj(ctl::prop("rsimple"),
                               ctl::ef(ctl::conj({ctl::prop("rsimplef"), ctl::neg(eqk.formula),
                                                  ctl::ex(ctl::conj(ctl::prop("qrcchkn"), ef_err()))}))))}));

        // Near the head: the window (sigma_i, sigma_{i-1}, sigma_{i-2}) around
        // the state letter on stack 1 and the same window on stack 2 are
        // not related by a transition.
        auto hfin = fresh("rhardf");
        auto rh = lib_.skip_blocks("rhard", addr_, sigma_, 2, hfin, addr_);
        auto qh = lib_.skip_blocks("qhard", addr_, sigma_, 1, rh, addr_);
        b_.internal(hfin, eqk.entry);
        std::vector<Window> before;
        for (const auto& x : m_.tape_alphabet)
            for (const auto& s : m_.states) {
                for (const auto& z : m_.tape_alphabet) before.push_back({x, s, z});
                before.push_back({x, s, ""});
            }
        std::vector<Window> after;
        std::vector<std::string> all = m_.tape_alphabet;
        all.insert(all.end(), m_.states.begin(), m_.states.end());
        for (const auto& x : all) {
            after.push_back({x, "", ""});
            for (const auto& y : all) {
                after.push_back({x, y, ""});
                for (const auto& z : all) after.push_back({x, y, z});
            }
        }
        std::map<Window, Ctl> left, right;
        for (const auto& w : before) {
            auto e = window_chain("q_" + spell_window(w), 1, w);
            b_.internal(hfin, e);
            left.emplace(w, ctl::ex(ctl::conj(ctl::prop("q_" + spell_window(w)), ef_win())));
        }
        for (const auto& w : after) {
            auto e = window_chain("r_" + spell_window(w), 2, w);
            b_.internal(hfin, e);
            right.emplace(w, ctl::ex(ctl::conj(ctl::prop("r_" + spell_window(w)), ef_win())));
        }
        std::vector<Ctl> violations;
        for (const auto& w : before) {
            auto ok = successors(w);
            for (const auto& v : after)
                if (!ok.count(v)) violations.push_back(ctl::conj(left.at(w), right.at(v)));
        }
        violation_count_ = violations.size();
        auto hard = ctl::ef(ctl::conj({ctl::prop("rhardf"), ctl::neg(eqk.formula), ctl::disj_all(violations)}));

        b_.internal(q, at0);
        b_.internal(q, qh);
        auto f = ctl::ex(ctl::conj(ctl::prop("qmove"), ctl::disj(ctl::ex(ctl::conj(ctl::prop("qsimple"), simple)),
                                                               ctl::ex(ctl::conj(ctl::prop("qhard"), hard)))));
        Gadget g{q, f, 2 + eqk.contexts};
        return memo_["qmove"] = g;
    }

    /// Step: stack 1 holds rho1 zeta rho2 zeta ... and rho2 yields rho1.
    /// rho1 is copied to stack 2 by guessing, then removed from stack 1.
    Gadget step()
    {
        if (auto it = memo_.find("qstep"); it != memo_.end()) return it->second;
        auto q = fresh("qstep");
        auto w = fresh("qstep.write");
        auto chk = fresh("qguessconfchk");
        lib_.pop_each(q, lib_.outside({kBottom}), q, 2);
        b_.noop(q, static_cast<std::int32_t>(kBottom), 2, w);
        write_config(w, 2, chk, "qstep.w");
        auto valid2 = valid_conf(2);
        auto same = eq_conf();
        b_.internal(chk, valid2.entry);
        b_.internal(chk, same.entry);
        auto rc = fresh("qrcmove");
        auto rcf = fresh("qrcmovef");
        b_.internal(chk, rc);
        lib_.pop_each(rc, GadgetLibrary::join(addr_, sigma_), rc, 1);
        b_.pop(rc, zeta_, rcf, 1);
        auto mv = move();
        b_.internal(rcf, mv.entry);
        auto f = ctl::ex(ctl::conj(
            ctl::prop("qstep"),
            ctl::ef(ctl::conj({ctl::prop("qguessconfchk"), ctl::neg(valid2.formula), ctl::neg(same.formula),
                               ctl::ex(ctl::conj(ctl::prop("qrcmove"),
                                                 ctl::ef(ctl::conj(ctl::prop("qrcmovef"), mv.formula))))}))));
        int contexts = 1 + std::max({valid2.contexts, same.contexts, 1 + mv.contexts});
        Gadget g{q, f, contexts};
        return memo_["qstep"] = g;
    }

    /// Pushes zeta and then one candidate configuration onto stack s.
    /// Free mode writes any word over Sigma^k and Sigma_M; shaped mode
    /// writes the fixed address sequence with a free letter per position.
    void write_config(StateId start, int s, StateId done, const std::string& name)
    {
        auto mid = fresh(name + ".body");
        b_.push(start, kWildcard, mid, s, zeta_);
        if (lib_.guess_mode() == GuessMode::free) {
            for (auto x : GadgetLibrary::join(addr_, sigma_)) b_.push(mid, kWildcard, mid, s, x);
            b_.internal(mid, done);
            return;
        }
        CounterParams p{k_, lib_.base()};
        auto positions = tm_positions(p);
        StateId at = mid;
        int step = 0;
        auto next = [&]() { return fresh(name + "." + std::to_string(++step)); };
        for (std::size_t i = 0; i < positions; ++i) {
            auto to = next();
            for (auto x : sigma_) b_.push(at, kWildcard, to, s, x);
            at = to;
            auto addr = encode_counter(p, BigNat(i));
            for (auto it = addr.rbegin(); it != addr.rend(); ++it) {
                auto t2 = next();
                b_.push(at, kWildcard, t2, s, b_.symbol(*it));
                at = t2;
            }
        }
        b_.internal(at, done);
    }

    std::size_t violation_count() const { return violation_count_; }

    Ctl ef_err() const { return ctl::ef(ctl::prop("q_err")); }
    Ctl ef_win() const { return ctl::ef(ctl::prop("q_win")); }

private:
    // Three letters in pop order; "" marks a missing position.
    using Window = std::array<std::string, 3>;

    static std::string spell_window(const Window& w)
    {
        std::string s = "(";
        for (int i = 0; i < 3; ++i) {
            if (i) s += ",";
            s += w[static_cast<std::size_t>(i)].empty() ? "#" : w[static_cast<std::size_t>(i)];
        }
        return s + ")";
    }

    // Windows on the successor side allowed for a head window (b, q, a):
    // b scanned at i, q at i-1, a at i-2.
    std::set<Window> successors(const Window& w) const
    {
        std::set<Window> ok;
        const auto& [b, q, a] = w;
        for (const auto& t : m_.transitions) {
            if (t.from != q || t.read != b) continue;
            if (!t.moves) ok.insert({t.write, t.to, a});
            else if (t.dir == 'R') ok.insert({t.to, b, a});
            else if (!a.empty()) ok.insert({b, a, t.to});
        }
        return ok;
    }

    // Pops stack s up to the first three letters of Sigma_M and enters
    // q_win iff they match w; a missing letter matches the terminator.
    StateId window_chain(const std::string& name, int s, const Window& w)
    {
        auto entry = fresh(name);
        StateId at = entry;
        for (std::size_t i = 0; i < 3; ++i) {
            lib_.pop_each(at, addr_, at, s);
            if (w[i].empty()) {
                lib_.noop_each(at, rest_, s, lib_.q_win());
                return entry;
            }
            auto to = i == 2 ? lib_.q_win() : fresh(name + "." + std::to_string(i + 1));
            b_.pop(at, sym(w[i]), to, s);
            at = to;
        }
        return entry;
    }

    Ctl err_from(StateId q) const { return ctl::ex(ctl::conj(ctl::prop(names_.at(q)), ef_err())); }

    SymbolId sym(const std::string& x) { return b_.symbol(StackSymbol::letter(x)); }

    StateId fresh(const std::string& n)
    {
        if (b_.has_state(n)) throw std::logic_error("state defined twice: " + n);
        auto q = b_.state(n);
        names_[q] = n;
        return q;
    }

    GadgetLibrary& lib_;
    SystemBuilder& b_;
    TmMachine m_;
    std::vector<std::string> input_;
    int k_;
    SymbolId zeta_ = 0;
    SymbolSet tape_, states_, sigma_, addr_, rest_;
    std::map<std::string, Gadget> memo_;
    std::map<StateId, std::string> names_;
    std::size_t violation_count_ = 0;
};

struct TmOptions {
    /// Build the EU variant (checks interleaved with writing) instead of
    /// the EF/EX-only one that writes the whole run first.
    bool eu = false;
    GuessMode guesses = GuessMode::free;
};

struct TmReport {
    int level = 1;
    int base = 1;
    std::size_t positions = 0;
    std::size_t cells = 0;
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t sigma_size = 0;
    std::size_t violations = 0;
    std::size_t formula_dag = 0;
    double formula_tree = 0;
    /// Declared upper bounds on context blocks: 4+2k for the EF/EX
    /// variant, 5+2k with EU.
    int context_bound = 0;
    int move_contexts = 0;
    int step_contexts = 0;
    /// Letters of one encoded configuration, zeta included.
    std::size_t config_length = 0;
};

struct TmCompiled {
    MpdsSystem system;
    Ctl formula;
    TmReport report;
    /// Stack 1 cap that fits a run of r configurations.
    std::size_t stack_cap_for(std::size_t run_length) const { return run_length * report.config_length; }
};

/// Compiles (M, w, k) into an MPDS and an accepting-run formula; the
/// formula holds at the initial configuration iff M accepts w within
/// Max(k, |w|) cells, given stack caps that fit the accepting run.
inline TmCompiled compile_tm(const TmMachine& m, const std::vector<std::string>& input, int k, TmOptions opt = {})
{
    validate(m);
    CounterParams p{k, static_cast<int>(input.size())};
    check_scale(p);
    SystemBuilder b(2);
    intern_tm_letters(b, m);
    GadgetLibrary lib(b, k, p.base, opt.guesses);
    TmGadgets g(lib, m, input);
    auto valid = g.valid_conf(1);
    auto init = g.init();
    auto fin = g.final_conf();
    auto step = g.step();
    auto letters = GadgetLibrary::join(g.addresses(), g.sigma());
    auto prop = [](const char* s) { return ctl::prop(s); };
    auto win = ctl::ef(ctl::prop("q_win"));
    Ctl f;
    if (!opt.eu) {
        auto start = b.state("qstart");
        auto more = b.state("qstart.more");
        auto run = b.state("qruncheck");
        g.write_config(start, 1, more, "qstart.w");
        b.internal(more, start);
        b.internal(more, run);
        for (auto e : {valid.entry, fin.entry, step.entry}) b.internal(run, e);

        auto rm = b.state("qremoveconf");
        auto rm_in = b.state("qremoveconf.in");
        b.internal(run, rm);
        lib.pop_each(rm, letters, rm_in, 1);
        b.pop(rm, g.zeta(), rm, 1);
        lib.pop_each(rm_in, letters, rm_in, 1);
        b.pop(rm_in, g.zeta(), rm, 1);
        auto one = b.state("qonemore");
        auto one_in = b.state("qonemore.in");
        lib.pop_each(one, letters, one_in, 1);
        lib.pop_each(one_in, letters, one_in, 1);
        b.pop(one_in, g.zeta(), lib.q_win(), 1);
        auto two = b.state("qtwomore");
        auto two_in = b.state("qtwomore.in");
        auto two_mid = b.state("qtwomore.mid");
        auto two_in2 = b.state("qtwomore.in2");
        lib.pop_each(two, letters, two_in, 1);
        lib.pop_each(two_in, letters, two_in, 1);
        b.pop(two_in, g.zeta(), two_mid, 1);
        lib.pop_each(two_mid, letters, two_in2, 1);
        lib.pop_each(two_in2, letters, two_in2, 1);
        b.pop(two_in2, g.zeta(), lib.q_win(), 1);
        for (auto e : {valid.entry, step.entry, init.entry, one, two}) b.internal(rm, e);
        b.set_initial(start);

        auto has_one = ctl::ex(ctl::conj(prop("qonemore"), win));
        f = ctl::conj(
            prop("qstart"),
            ctl::ef(ctl::conj(
                {ctl::conj({prop("qruncheck"), ctl::neg(valid.formula), ctl::neg(step.formula), ctl::neg(fin.formula)}),
                 ctl::neg(ctl::ef(ctl::conj({prop("qremoveconf"), has_one, valid.formula}))),
                 ctl::neg(ctl::ef(
                     ctl::conj({prop("qremoveconf"), ctl::ex(ctl::conj(prop("qtwomore"), win)), step.formula}))),
                 ctl::neg(ctl::ef(ctl::conj({prop("qremoveconf"), has_one,
                                             ctl::ex(ctl::conj(prop("qtwomore"), ctl::neg(win))), init.formula})))})));
    } else {
        auto start = b.state("qstart");
        auto initchk = b.state("qinitcheck");
        auto write = b.state("qwrite");
        auto movechk = b.state("qmovecheck");
        g.write_config(start, 1, initchk, "qstart.w");
        g.write_config(write, 1, movechk, "qwrite.w");
        for (auto e : {valid.entry, init.entry, fin.entry, write}) b.internal(initchk, e);
        for (auto e : {valid.entry, step.entry, fin.entry, write}) b.internal(movechk, e);
        b.set_initial(start);

        auto good = ctl::conj(ctl::neg(valid.formula), ctl::neg(step.formula));
        auto until = ctl::eu(ctl::implies(prop("qmovecheck"), good),
                             ctl::conj({prop("qmovecheck"), good, ctl::neg(fin.formula)}));
        f = ctl::conj(prop("qstart"),
                      ctl::ef(ctl::conj({prop("qinitcheck"), ctl::neg(init.formula), ctl::neg(valid.formula),
                                         ctl::disj(ctl::neg(fin.formula), until)})));
    }
    auto sys = b.build();
    TmReport r;
    r.level = k;
    r.base = p.base;
    r.positions = tm_positions(p);
    r.cells = r.positions - 1;
    r.states = sys.state_count();
    r.transitions = sys.transitions().size();
    r.sigma_size = m.states.size() + m.tape_alphabet.size();
    r.violations = g.violation_count();
    r.formula_dag = f.dag_size();
    r.formula_tree = f.tree_size();
    r.context_bound = (opt.eu ? 5 : 4) + 2 * k;
    r.move_contexts = g.move().contexts;
    r.step_contexts = step.contexts;
    r.config_length = r.positions * (encode_counter(p, 0).size() + 1) + 1;
    return {std::move(sys), f, r};
}

}  // namespace mpds
