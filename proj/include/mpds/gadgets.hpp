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

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "counters.hpp"
#include "ctl.hpp"
#include "system.hpp"

namespace mpds {

/// A subroutine fragment: entering `entry` by an internal move from a host
/// state q, the host configuration violates the predicate iff it satisfies
/// `formula` at q. `contexts` bounds the context blocks of any gadget run.
struct Gadget {
    StateId entry = 0;
    Ctl formula;
    int contexts = 0;
};

using SymbolSet = std::set<SymbolId>;

/// How copy-by-guessing writers choose their words. `free` writes any word
/// of the block language, bounded only by the stack cap. `shaped` writes
/// only words with the layout of a valid counter (fixed addresses, free
/// bits); every other guess is rejected by the validity conjunct anyway.
enum class GuessMode { free, shaped };

/// Builds counter subroutines into a SystemBuilder on demand. Every stack
/// letter the host will ever use must be interned before construction,
/// since "letter outside a set" tests are expanded into guarded moves.
class GadgetLibrary {
public:
    GadgetLibrary(SystemBuilder& b, int max_level, int base, GuessMode mode = GuessMode::free)
        : b_(b), max_level_(max_level), base_(base), mode_(mode)
    {
        check_scale({max_level, base});
        for (int i = 1; i <= max_level; ++i) {
            b_.symbol(StackSymbol::bit(i, false));
            b_.symbol(StackSymbol::bit(i, true));
        }
        alphabet_size_ = b_.alphabet().size();
        err_ = sink("q_err");
        win_ = sink("q_win");
        eq_ = sink("q_eq");
        neq_ = sink("q_neq");
    }

    SystemBuilder& builder() { return b_; }
    int base() const { return base_; }
    int max_level() const { return max_level_; }
    GuessMode guess_mode() const { return mode_; }
    StateId q_err() const { return err_; }
    StateId q_win() const { return win_; }

    SymbolId zero(int level) { return b_.symbol(StackSymbol::bit(level, false)); }
    SymbolId one(int level) { return b_.symbol(StackSymbol::bit(level, true)); }
    SymbolSet bits(int level) { return {zero(level), one(level)}; }
    /// Letters of all counter levels 1..level (empty for level 0).
    SymbolSet upto(int level)
    {
        SymbolSet s;
        for (int i = 1; i <= level; ++i) s.merge(bits(i));
        return s;
    }
    /// Every letter outside s, the bottom marker included.
    SymbolSet outside(const SymbolSet& s) const
    {
        check_alphabet();
        SymbolSet out;
        for (SymbolId i = 0; i < alphabet_size_; ++i)
            if (!s.count(i)) out.insert(i);
        return out;
    }
    static SymbolSet join(SymbolSet a, const SymbolSet& b)
    {
        a.insert(b.begin(), b.end());
        return a;
    }

    void pop_each(StateId from, const SymbolSet& s, StateId to, int stack)
    {
        for (auto x : s) b_.pop(from, x, to, stack);
    }
    void noop_each(StateId from, const SymbolSet& s, int stack, StateId to)
    {
        for (auto x : s) b_.noop(from, static_cast<std::int32_t>(x), stack, to);
    }

    /// Pops whole blocks (inner+ letter-from-block)* on stack s. The returned
    /// boundary state is the entry; `exit` is entered from a block boundary
    /// whose top letter lies in `next` (any top if next is empty).
    StateId skip_blocks(const std::string& name, const SymbolSet& inner, const SymbolSet& block, int s, StateId exit,
                        const SymbolSet& next)
    {
        auto at = fresh(name);
        auto in = fresh(name + ".in");
        pop_each(at, inner, in, s);
        pop_each(in, inner, in, s);
        pop_each(in, block, at, s);
        if (next.empty()) b_.internal(at, exit);
        else noop_each(at, next, s, exit);
        return at;
    }

    static std::string tag(int p) { return p == 1 ? "" : "(2)"; }
    static int other(int p) { return 3 - p; }

    Ctl ef_err() { return ctl::ef(ctl::prop("q_err")); }
    Ctl ex_err(StateId q) { return ctl::ex(ctl::conj(ctl::prop(name(q)), ef_err())); }
    std::string name(StateId q) const { return names_.at(q); }

    /// Last_k: pops stack p through the level-k prefix; errs on a zero bit.
    Gadget max(int k, int p = 1) { return extreme(k, p, true); }
    /// First_k: errs on a one bit.
    Gadget min(int k, int p = 1) { return extreme(k, p, false); }

    /// Equal_k between the counters on top of stacks p and other(p).
    Gadget eq(int k, int p = 1)
    {
        auto key = "qeqcheck_" + std::to_string(k) + tag(p);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Gadget g = k == 1 ? eq_base(key, p) : eq_blocks(key, k - 1, bits(k), p, "_" + std::to_string(k) + tag(p));
        return memo_[key] = g;
    }

    /// Equal over block words whose addresses are level-j counters and whose
    /// payload letters come from `block`; Equal_k is the case j = k-1.
    Gadget eq_blocks(const std::string& entry, int j, const SymbolSet& block, int p, const std::string& suffix)
    {
        const int o = other(p);
        auto inner = upto(j);
        auto q = fresh(entry);
        auto fin = fresh("qskipfinal" + suffix);
        auto second = skip_blocks("qskip" + suffix + ".o", inner, block, o, fin, inner);
        auto first = skip_blocks("qskip" + suffix + ".p", inner, block, p, second, inner);
        b_.internal(q, first);
        auto sub = eq(j, p);
        b_.internal(fin, sub.entry);
        auto rc = rcchk(j, block, p, false, suffix);
        b_.internal(fin, rc);
        auto f = ctl::ex(ctl::conj(
            ctl::prop(entry),
            ctl::ef(ctl::conj({ctl::prop(name(fin)), ctl::neg(sub.formula), ex_err(rc)}))));
        return {q, f, 2 + sub.contexts};
    }

    /// Succ_k: the value on stack other(p) is the value on stack p plus one.
    Gadget succ(int k, int p = 1)
    {
        auto key = "qsuccheck_" + std::to_string(k) + tag(p);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Gadget g = k == 1 ? succ_base(key, p) : succ_induct(key, k, p);
        return memo_[key] = g;
    }

    /// Valid_k: stack p starts with a valid level-k counter followed by a
    /// letter outside Sigma^k.
    Gadget valid(int k, int p = 1)
    {
        auto key = "qvalid_" + std::to_string(k) + tag(p);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Gadget g;
        if (k == 1) {
            g = valid_base(key, p);
        } else {
            g = valid_blocks(key, k - 1, bits(k), outside(upto(k)), p, "_" + std::to_string(k) + tag(p), {});
        }
        return memo_[key] = g;
    }

    /// Valid over block words: conditions on addresses (each valid, top one
    /// maximal, bottom one zero, consecutive ones successive) plus a shape
    /// check that the word is ((Sigma^j)+ block)+ followed by a letter in
    /// `terminal`. Extra gadgets become further violation disjuncts.
    Gadget valid_blocks(const std::string& entry, int j, const SymbolSet& block, const SymbolSet& terminal, int p,
                        const std::string& suffix, const std::vector<Gadget>& extra)
    {
        const int o = other(p);
        auto inner = upto(j);
        auto q = fresh(entry);

        // 1: every address is a valid level-j counter.
        auto induct = fresh("qvalinduct" + suffix);
        auto skip1 = skip_blocks("qvalskip" + suffix, inner, block, p, induct, inner);
        auto sub = valid(j, p);
        b_.internal(induct, sub.entry);
        auto c1 = ctl::ex(ctl::conj(ctl::prop(name(skip1)), ctl::ef(ctl::conj(ctl::prop(name(induct)), sub.formula))));

        // 2: the top address is maximal.
        auto last = max(j, p);
        auto c2 = last.formula;

        // 3: the bottom address is zero.
        auto induct3 = fresh("qvalinductp" + suffix);
        auto skip3 = skip_blocks("qvalskipp" + suffix, inner, block, p, induct3, inner);
        auto first = min(j, p);
        b_.internal(induct3, first.entry);
        auto chk = fresh("qchklast" + suffix);
        auto chk2 = fresh("qchklast" + suffix + ".end");
        b_.internal(induct3, chk);
        pop_each(chk, inner, chk, p);
        pop_each(chk, block, chk2, p);
        noop_each(chk2, terminal, p, win_);
        auto c3 = ctl::ex(ctl::conj(
            ctl::prop(name(skip3)),
            ctl::ef(ctl::conj({ctl::prop(name(induct3)), first.formula,
                               ctl::ex(ctl::conj(ctl::prop(name(chk)), ctl::ef(ctl::prop("q_win"))))}))));

        // 4: some address is not the successor of the one below it. The
        // address is copied to the other stack by guessing and checking.
        auto guess = fresh("qguess" + suffix);
        auto skip4 = skip_blocks("qvalskipr" + suffix, inner, block, p, guess, inner);
        auto write0 = fresh("qwrite" + suffix);
        auto chkguess = fresh("qchkguess" + suffix);
        auto everything = outside({kBottom});
        pop_each(guess, everything, guess, o);
        b_.noop(guess, static_cast<std::int32_t>(kBottom), o, write0);
        write_counter(write0, j, o, chkguess, suffix);
        auto copy_ok = valid(j, o);
        auto same = eq(j, p);
        b_.internal(chkguess, copy_ok.entry);
        b_.internal(chkguess, same.entry);
        auto remove = fresh("qremovelj" + suffix);
        auto remove2 = fresh("qremovelj" + suffix + ".end");
        auto before = fresh("qbeforesucccheck" + suffix);
        b_.internal(chkguess, remove);
        pop_each(remove, inner, remove, p);
        pop_each(remove, block, remove2, p);
        noop_each(remove2, inner, p, before);
        auto step = succ(j, p);
        b_.internal(before, step.entry);
        auto c4 = ctl::ex(ctl::conj(
            ctl::prop(name(skip4)),
            ctl::ef(ctl::conj(
                ctl::prop(name(guess)),
                ctl::ef(ctl::conj({ctl::prop(name(chkguess)), ctl::neg(copy_ok.formula), ctl::neg(same.formula),
                                   ctl::ex(ctl::conj(ctl::prop(name(remove)),
                                                     ctl::ef(ctl::conj(ctl::prop(name(before)), step.formula))))}))))));

        // Shape of the word itself.
        auto s0 = fresh("qvalshape" + suffix);
        auto s1 = fresh("qvalshape" + suffix + ".addr");
        auto s2 = fresh("qvalshape" + suffix + ".cell");
        pop_each(s0, inner, s1, p);
        noop_each(s0, outside(inner), p, err_);
        pop_each(s1, inner, s1, p);
        pop_each(s1, block, s2, p);
        noop_each(s1, outside(join(inner, block)), p, err_);
        pop_each(s2, inner, s1, p);
        noop_each(s2, outside(join(join(inner, block), terminal)), p, err_);
        noop_each(s2, block, p, err_);
        auto c5 = ex_err(s0);

        b_.internal(q, last.entry);
        b_.internal(q, skip1);
        b_.internal(q, skip3);
        b_.internal(q, skip4);
        b_.internal(q, s0);
        std::vector<Ctl> cases{c1, c2, c3, c4, c5};
        int contexts = std::max({sub.contexts, 2 + copy_ok.contexts - 1, 2 + same.contexts, 2 + step.contexts});
        for (const auto& g : extra) {
            b_.internal(q, g.entry);
            cases.push_back(g.formula);
            contexts = std::max(contexts, g.contexts);
        }
        auto f = ctl::ex(ctl::conj(ctl::prop(entry), ctl::disj_all(cases)));
        return {q, f, contexts};
    }

    /// Writes a guessed level-j counter onto stack s, bottom letter first,
    /// then enters done.
    void write_counter(StateId start, int j, int s, StateId done, const std::string& suffix)
    {
        if (mode_ == GuessMode::free) {
            // (Sigma_j (Sigma^{j-1})*)* in push order.
            auto mid = fresh("qwrite" + suffix + ".mid");
            for (auto x : bits(j)) {
                b_.push(start, kWildcard, mid, s, x);
                b_.push(mid, kWildcard, mid, s, x);
            }
            for (auto x : upto(j - 1)) b_.push(mid, kWildcard, mid, s, x);
            b_.internal(start, done);
            b_.internal(mid, done);
            return;
        }
        // Bottom block first: payload bit, then its address read bottom-up.
        StateId at = start;
        int step = 0;
        auto next = [&]() { return fresh("qwrite" + suffix + "." + std::to_string(++step)); };
        auto emit_fixed = [&](const CounterWord& w) {
            for (auto it = w.rbegin(); it != w.rend(); ++it) {
                auto to = next();
                b_.push(at, kWildcard, to, s, b_.symbol(*it));
                at = to;
            }
        };
        auto emit_bit = [&](int level) {
            auto to = next();
            for (auto x : bits(level)) b_.push(at, kWildcard, to, s, x);
            at = to;
        };
        if (j == 1) {
            for (int i = 0; i < base_; ++i) emit_bit(1);
        } else {
            CounterParams inner{j - 1, base_};
            auto m = max_value(inner);
            for (BigNat i = 0; i <= m; ++i) {
                emit_bit(j);
                emit_fixed(encode_counter(inner, i));
            }
        }
        b_.internal(at, done);
    }

    /// Checks the payload letters after the current addresses: pops an
    /// address and letter on other(p), then on p, and errs if they differ
    /// (or, with neq, if they agree).
    StateId rcchk(int j, const SymbolSet& block, int p, bool neq, const std::string& suffix)
    {
        auto key = std::string(neq ? "qrcchkneq" : "qrcchk") + suffix;
        if (b_.has_state(key)) return b_.state(key);
        const int o = other(p);
        auto inner = upto(j);
        auto r = fresh(key);
        pop_each(r, inner, r, o);
        for (auto x : block) {
            auto hold = fresh(key + ".read" + std::to_string(x));
            b_.pop(r, x, hold, o);
            pop_each(hold, inner, hold, p);
            for (auto y : block)
                if ((x == y) == neq) b_.pop(hold, y, err_, p);
        }
        return r;
    }

private:
    void check_alphabet() const
    {
        if (b_.alphabet().size() != alphabet_size_)
            throw std::logic_error("stack letters were added after the gadget library was created");
    }

    StateId fresh(const std::string& n)
    {
        if (b_.has_state(n)) throw std::logic_error("gadget state defined twice: " + n);
        auto q = b_.state(n);
        names_[q] = n;
        return q;
    }

    StateId sink(const std::string& n)
    {
        auto q = b_.state(n);
        names_[q] = n;
        b_.internal(q, q);
        return q;
    }

    Gadget extreme(int k, int p, bool want_max)
    {
        auto key = std::string(want_max ? "qmax_" : "qmin_") + std::to_string(k) + tag(p);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto q = fresh(key);
        auto bad = want_max ? zero(k) : one(k);
        for (auto x : upto(k)) b_.pop(q, x, x == bad ? err_ : q, p);
        return memo_[key] = Gadget{q, ex_err(q), 1};
    }

    Gadget eq_base(const std::string& key, int p)
    {
        const int o = other(p);
        const int n = base_;
        auto l1 = bits(1);
        std::vector<StateId> count(static_cast<std::size_t>(n));
        count[0] = fresh(key);
        for (int c = 1; c < n; ++c) count[static_cast<std::size_t>(c)] = fresh(key + ".skip" + std::to_string(c));
        for (int c = 0; c < n; ++c) {
            auto here = count[static_cast<std::size_t>(c)];
            if (c + 1 < n) pop_each(here, l1, count[static_cast<std::size_t>(c + 1)], p);
            for (auto x : l1) {
                // Now pop c letters on the other stack, then compare.
                StateId prev = 0;
                for (int r = c; r >= 0; --r) {
                    auto s = fresh(key + ".hold" + std::to_string(x) + "." + std::to_string(c) + "." + std::to_string(r));
                    if (r == c) b_.pop(here, x, s, p);
                    else pop_each(prev, l1, s, o);
                    prev = s;
                }
                for (auto y : l1)
                    if (y != x) b_.pop(prev, y, err_, o);
            }
        }
        return {count[0], ex_err(count[0]), 2};
    }

    // Faulty position at depth c from the top of stack p: below it on p we
    // learn whether every less significant bit is one (the carry reaches c).
    Gadget succ_base(const std::string& key, int p)
    {
        const int o = other(p);
        const int n = base_;
        auto l1 = bits(1);
        auto entry = fresh(key);
        std::vector<StateId> count{entry};
        for (int c = 1; c < n; ++c) count.push_back(fresh(key + ".skip" + std::to_string(c)));
        for (int c = 0; c < n; ++c) {
            auto here = count[static_cast<std::size_t>(c)];
            if (c + 1 < n) pop_each(here, l1, count[static_cast<std::size_t>(c + 1)], p);
            for (auto x : l1) {
                // below[r][f]: r bits of p left to pop, f = all popped so far are one.
                auto below = [&](int r, bool f) {
                    auto nm = key + ".below" + std::to_string(x) + "." + std::to_string(c) + "." + std::to_string(r) +
                              (f ? ".ones" : ".mixed");
                    return b_.has_state(nm) ? b_.state(nm) : fresh(nm);
                };
                int rest = n - 1 - c;
                b_.pop(here, x, below(rest, true), p);
                for (int r = rest; r > 0; --r)
                    for (bool f : {true, false}) {
                        b_.pop(below(r, f), one(1), below(r - 1, f), p);
                        b_.pop(below(r, f), zero(1), below(r - 1, false), p);
                    }
                for (bool flip : {true, false}) {
                    StateId prev = below(0, flip);
                    for (int r = c; r > 0; --r) {
                        auto s = fresh(key + ".other" + std::to_string(x) + "." + std::to_string(c) + "." +
                                       std::to_string(r) + (flip ? ".flip" : ".keep"));
                        pop_each(prev, l1, s, o);
                        prev = s;
                    }
                    for (auto y : l1)
                        if ((x == y) == flip) b_.pop(prev, y, err_, o);
                }
            }
        }
        auto top = all_ones(key, 1, p);
        b_.internal(entry, top);
        return {entry, ex_err(entry), 2};
    }

    // Errs iff the level-k counter on stack p is all ones: it has no successor.
    StateId all_ones(const std::string& key, int k, int p)
    {
        auto q = fresh(key + ".max");
        auto dead = fresh(key + ".max.no");
        for (auto x : upto(k)) b_.pop(q, x, x == zero(k) ? dead : q, p);
        noop_each(q, outside(upto(k)), p, err_);
        return q;
    }

    Gadget succ_induct(const std::string& key, int k, int p)
    {
        const int o = other(p);
        const int j = k - 1;
        auto inner = upto(j);
        const auto suffix = "_" + std::to_string(k) + tag(p);
        auto q = fresh(key);
        auto fin = fresh("qskipfinalsuc" + suffix);
        auto second = skip_blocks("qsucskip" + suffix + ".o", inner, bits(k), o, fin, inner);
        auto first = skip_blocks("qsucskip" + suffix + ".p", inner, bits(k), p, second, inner);
        b_.internal(q, first);
        auto sub = eq(j, p);
        b_.internal(fin, sub.entry);
        auto rc = rcchk(j, bits(k), p, false, suffix);
        auto rcn = rcchk(j, bits(k), p, true, suffix);
        b_.internal(fin, rc);
        b_.internal(fin, rcn);
        auto scan = scantype(k, p);
        b_.internal(fin, scan);
        auto top = all_ones(key, k, p);
        b_.internal(q, top);
        auto same = ctl::conj(ctl::ef(ctl::prop("q_eq")), ex_err(rc));
        auto differ = ctl::conj(ctl::ef(ctl::prop("q_neq")), ex_err(rcn));
        auto f = ctl::ex(ctl::conj(
            ctl::prop(key),
            ctl::disj(ctl::ef(ctl::conj({ctl::prop(name(fin)), ctl::neg(sub.formula), ctl::disj(same, differ)})),
                      ex_err(top))));
        return {q, f, 2 + sub.contexts};
    }

    // Pops l_i sigma_i on stack p and reports q_eq if a zero bit of level k
    // lies further down in the counter, q_neq otherwise.
    StateId scantype(int k, int p)
    {
        auto key = "qscantype_" + std::to_string(k - 1) + tag(p);
        if (b_.has_state(key)) return b_.state(key);
        auto inner = upto(k - 1);
        auto q = fresh(key);
        auto none = fresh(key + ".noa");
        auto some = fresh(key + ".hasa");
        pop_each(q, inner, q, p);
        pop_each(q, bits(k), none, p);
        pop_each(none, inner, none, p);
        b_.pop(none, one(k), none, p);
        b_.pop(none, zero(k), some, p);
        pop_each(some, upto(k), some, p);
        noop_each(none, outside(upto(k)), p, neq_);
        noop_each(some, outside(upto(k)), p, eq_);
        return q;
    }

    Gadget valid_base(const std::string& key, int p)
    {
        const int n = base_;
        auto l1 = bits(1);
        std::vector<StateId> v{fresh(key)};
        for (int i = 1; i <= n; ++i) v.push_back(fresh(key + ".len" + std::to_string(i)));
        for (int i = 0; i < n; ++i) {
            pop_each(v[static_cast<std::size_t>(i)], l1, v[static_cast<std::size_t>(i + 1)], p);
            noop_each(v[static_cast<std::size_t>(i)], outside(l1), p, err_);
        }
        noop_each(v.back(), l1, p, err_);
        return {v[0], ex_err(v[0]), 1};
    }

    SystemBuilder& b_;
    int max_level_;
    int base_;
    GuessMode mode_;
    std::size_t alphabet_size_ = 0;
    StateId err_ = 0, win_ = 0, eq_ = 0, neq_ = 0;
    std::map<std::string, Gadget> memo_;
    std::map<StateId, std::string> names_;
};

}  // namespace mpds
