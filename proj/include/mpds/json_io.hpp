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

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "explorer.hpp"
#include "system.hpp"
#include "tm.hpp"

namespace mpds {

using Json = nlohmann::ordered_json;

class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw DocumentError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* what)
{
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DocumentError(std::string("field \"") + what + "\" has the wrong type");
    }
}

inline const char* kind_name(TransKind k)
{
    switch (k) {
    case TransKind::internal: return "internal";
    case TransKind::push: return "push";
    case TransKind::pop: return "pop";
    case TransKind::guarded_noop: return "noop";
    }
    return "?";
}

}  // namespace detail

// --- MPDS document ------------------------------------------------------------

/// Reads {states, stacks, alphabet, initial, transitions, owner?, priority?}.
/// Guards are symbol spellings, "_" for the wildcard, "⊥" or "bot" for
/// the bottom marker.
inline MpdsSystem read_mpds(const Json& doc)
{
    using detail::field;
    using detail::get_as;
    auto stacks = get_as<int>(field(doc, "stacks"), "stacks");
    if (stacks < 1) throw DocumentError("an MPDS needs at least one stack");
    SystemBuilder b(stacks);
    for (const auto& s : field(doc, "states")) b.state(get_as<std::string>(s, "states"));
    for (const auto& s : field(doc, "alphabet")) b.symbol(StackSymbol::parse(get_as<std::string>(s, "alphabet")));
    auto state = [&](const Json& j, const char* what) {
        auto name = get_as<std::string>(j, what);
        if (!b.has_state(name)) throw DocumentError("unknown state \"" + name + "\"");
        return b.state(name);
    };
    auto symbol = [&](const Json& j, const char* what) -> SymbolId {
        auto s = StackSymbol::parse(get_as<std::string>(j, what));
        const auto& alpha = b.alphabet();
        for (SymbolId i = 0; i < alpha.size(); ++i)
            if (alpha[i] == s) return i;
        throw DocumentError("symbol \"" + s.spelling() + "\" is not in the alphabet");
    };
    auto stack_of = [&](const Json& t) {
        auto s = get_as<int>(field(t, "stack"), "stack");
        if (s < 1 || s > stacks) throw DocumentError("stack index out of range");
        return s;
    };
    auto guard_of = [&](const Json& t) -> std::int32_t {
        if (!t.contains("guard")) return kWildcard;
        auto g = get_as<std::string>(t.at("guard"), "guard");
        if (g == "_") return kWildcard;
        return static_cast<std::int32_t>(symbol(t.at("guard"), "guard"));
    };
    b.set_initial(state(field(doc, "initial"), "initial"));
    for (const auto& t : field(doc, "transitions")) {
        auto kind = get_as<std::string>(field(t, "kind"), "kind");
        auto from = state(field(t, "from"), "from");
        auto to = state(field(t, "to"), "to");
        if (kind == "internal") {
            b.internal(from, to);
        } else if (kind == "push") {
            b.push(from, guard_of(t), to, stack_of(t), symbol(field(t, "symbol"), "symbol"));
        } else if (kind == "pop") {
            b.pop(from, symbol(field(t, "symbol"), "symbol"), to, stack_of(t));
        } else if (kind == "noop" || kind == "guarded_noop") {
            b.noop(from, guard_of(t), stack_of(t), to);
        } else {
            throw DocumentError("unknown transition kind \"" + kind + "\"");
        }
    }
    if (doc.contains("owner")) {
        for (const auto& [name, who] : doc.at("owner").items()) {
            auto p = get_as<int>(who, "owner");
            if (p != 0 && p != 1) throw DocumentError("owner must be 0 or 1");
            if (!b.has_state(name)) throw DocumentError("owner names unknown state \"" + name + "\"");
            b.set_owner(b.state(name), p == 0 ? Player::even : Player::odd);
        }
    }
    if (doc.contains("priority")) {
        for (const auto& [name, pr] : doc.at("priority").items()) {
            auto v = get_as<int>(pr, "priority");
            if (v < 0) throw DocumentError("priorities must be non-negative");
            if (!b.has_state(name)) throw DocumentError("priority names unknown state \"" + name + "\"");
            b.set_priority(b.state(name), v);
        }
    }
    if (doc.contains("owner") || doc.contains("priority")) b.complete_game_maps(Player::even, 0);
    auto sys = b.build();
    auto problems = validate(sys);
    if (!problems.empty()) throw DocumentError(problems.front());
    return sys;
}

inline Json write_mpds(const MpdsSystem& sys)
{
    Json doc;
    doc["states"] = sys.state_names();
    doc["stacks"] = sys.stack_count();
    Json alpha = Json::array();
    for (SymbolId i = 1; i < sys.alphabet().size(); ++i) alpha.push_back(sys.symbol(i).spelling());
    doc["alphabet"] = alpha;
    doc["initial"] = sys.state_name(sys.initial());
    Json ts = Json::array();
    for (const auto& t : sys.transitions()) {
        Json j;
        j["kind"] = detail::kind_name(t.kind);
        j["from"] = sys.state_name(t.from);
        j["to"] = sys.state_name(t.to);
        if (t.kind != TransKind::internal) j["stack"] = t.stack;
        if (t.kind == TransKind::push || t.kind == TransKind::guarded_noop)
            j["guard"] = t.guard == kWildcard ? std::string("_") : sys.symbol(static_cast<SymbolId>(t.guard)).spelling();
        if (t.kind == TransKind::push || t.kind == TransKind::pop) j["symbol"] = sys.symbol(t.symbol).spelling();
        ts.push_back(j);
    }
    doc["transitions"] = ts;
    if (sys.is_game()) {
        Json owner = Json::object(), prio = Json::object();
        for (StateId q = 0; q < sys.state_count(); ++q) {
            owner[sys.state_name(q)] = sys.owner(q) == Player::even ? 0 : 1;
            prio[sys.state_name(q)] = sys.priority(q);
        }
        doc["owner"] = owner;
        doc["priority"] = prio;
    }
    return doc;
}

inline Json parse_json_text(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DocumentError(std::string("malformed JSON: ") + e.what());
    }
}

// --- Configurations and graphs ------------------------------------------------

/// Stack words top-first, bottom marker included.
inline Json stacks_json(const MpdsSystem& sys, const Configuration& c)
{
    Json out = Json::array();
    for (const auto& w : c.stacks) {
        Json s = Json::array();
        for (auto x : w) s.push_back(sys.symbol(x).spelling());
        out.push_back(s);
    }
    return out;
}

inline Json graph_json(const MpdsSystem& sys, const ConfigGraph& g)
{
    Json nodes = Json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        nodes.push_back({{"id", i},
                         {"state", sys.state_name(n.config.state)},
                         {"stacks", stacks_json(sys, n.config)},
                         {"contexts", n.contexts},
                         {"frontier", n.frontier}});
    }
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back({{"src", e.src}, {"transition", e.transition}, {"dst", e.dst}});
    return {{"nodes", nodes}, {"edges", edges}, {"capped", g.capped}};
}

// --- Turing machine document -------------------------------------------------------

inline TmMachine read_tm(const Json& doc)
{
    using detail::field;
    using detail::get_as;
    TmMachine m;
    m.states = get_as<std::vector<std::string>>(field(doc, "states"), "states");
    m.tape_alphabet = get_as<std::vector<std::string>>(field(doc, "tape_alphabet"), "tape_alphabet");
    m.blank = get_as<std::string>(field(doc, "blank"), "blank");
    m.initial = get_as<std::string>(field(doc, "initial"), "initial");
    m.finals = get_as<std::vector<std::string>>(field(doc, "finals"), "finals");
    for (const auto& t : field(doc, "transitions")) {
        TmTransition tr;
        tr.from = get_as<std::string>(field(t, "from"), "from");
        tr.read = get_as<std::string>(field(t, "read"), "read");
        tr.to = get_as<std::string>(field(t, "to"), "to");
        const auto& act = field(t, "action");
        bool writes = act.contains("write"), moves = act.contains("move");
        if (writes == moves) throw DocumentError("a transition action is exactly one of write or move");
        if (writes) {
            tr.write = get_as<std::string>(act.at("write"), "write");
        } else {
            auto d = get_as<std::string>(act.at("move"), "move");
            if (d != "L" && d != "R") throw DocumentError("move must be \"L\" or \"R\"");
            tr.moves = true;
            tr.dir = d[0];
        }
        m.transitions.push_back(tr);
    }
    try {
        validate(m);
    } catch (const TmError& e) {
        throw DocumentError(e.what());
    }
    return m;
}

inline Json write_tm(const TmMachine& m)
{
    Json ts = Json::array();
    for (const auto& t : m.transitions) {
        Json act = t.moves ? Json{{"move", std::string(1, t.dir)}} : Json{{"write", t.write}};
        ts.push_back({{"from", t.from}, {"read", t.read}, {"to", t.to}, {"action", act}});
    }
    return {{"states", m.states},   {"tape_alphabet", m.tape_alphabet}, {"blank", m.blank},
            {"initial", m.initial}, {"finals", m.finals},               {"transitions", ts}};
}

}  // namespace mpds
