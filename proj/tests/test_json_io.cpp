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
#include <gtest/gtest.h>

#include "support.hpp"

using namespace mpds;

namespace {

const char* kDoc = R"({
  "states": ["q0", "q1"],
  "stacks": 2,
  "alphabet": ["a", "zeta", "b1"],
  "initial": "q0",
  "transitions": [
    {"kind": "push", "from": "q0", "guard": "_", "to": "q1", "stack": 1, "symbol": "a"},
    {"kind": "pop", "from": "q1", "symbol": "a", "to": "q0", "stack": 1},
    {"kind": "noop", "from": "q1", "guard": "bot", "to": "q1", "stack": 2},
    {"kind": "internal", "from": "q1", "to": "q0"}
  ]
})";

}  // namespace

TEST(MpdsDocument, ReadWriteRoundTrip)
{
    auto sys = read_mpds(parse_json_text(kDoc));
    EXPECT_EQ(sys.state_count(), 2u);
    EXPECT_EQ(sys.transitions().size(), 4u);
    EXPECT_EQ(sys.transitions()[2].kind, TransKind::guarded_noop);
    EXPECT_EQ(sys.transitions()[2].guard, static_cast<std::int32_t>(kBottom));
    auto again = read_mpds(write_mpds(sys));
    EXPECT_EQ(write_mpds(again).dump(), write_mpds(sys).dump());
}

TEST(MpdsDocument, GameMaps)
{
    auto doc = parse_json_text(kDoc);
    doc["owner"] = {{"q1", 1}};
    doc["priority"] = {{"q0", 2}};
    auto sys = read_mpds(doc);
    ASSERT_TRUE(sys.is_game());
    EXPECT_EQ(sys.owner(sys.state("q1")), Player::odd);
    EXPECT_EQ(sys.owner(sys.state("q0")), Player::even);
    EXPECT_EQ(sys.priority(sys.state("q0")), 2);
    EXPECT_EQ(sys.priority(sys.state("q1")), 0);
    auto back = write_mpds(sys);
    EXPECT_EQ(back["owner"]["q1"], 1);
}

TEST(MpdsDocument, Errors)
{
    EXPECT_THROW(parse_json_text("{"), DocumentError);
    auto doc = parse_json_text(kDoc);
    auto bad_state = doc;
    bad_state["transitions"][0]["to"] = "nowhere";
    EXPECT_THROW(read_mpds(bad_state), DocumentError);
    auto bad_symbol = doc;
    bad_symbol["transitions"][0]["symbol"] = "c";
    EXPECT_THROW(read_mpds(bad_symbol), DocumentError);
    auto bad_kind = doc;
    bad_kind["transitions"][0]["kind"] = "jump";
    EXPECT_THROW(read_mpds(bad_kind), DocumentError);
    auto bad_stack = doc;
    bad_stack["transitions"][0]["stack"] = 3;
    EXPECT_THROW(read_mpds(bad_stack), DocumentError);
    auto missing = doc;
    missing.erase("initial");
    EXPECT_THROW(read_mpds(missing), DocumentError);
    auto bad_owner = doc;
    bad_owner["owner"] = {{"q0", 2}};
    EXPECT_THROW(read_mpds(bad_owner), DocumentError);
}

TEST(GraphDocument, ListsNodesAndEdges)
{
    auto sys = read_mpds(parse_json_text(kDoc));
    ExplorationBounds b;
    b.stack_cap = 2;
    auto g = explore(sys, sys.initial_config(), b);
    auto j = graph_json(sys, g);
    EXPECT_EQ(j["nodes"].size(), g.nodes.size());
    EXPECT_EQ(j["edges"].size(), g.edges.size());
    EXPECT_EQ(j["nodes"][0]["state"], "q0");
    EXPECT_EQ(j["nodes"][0]["stacks"][0][0], "bot");
}

TEST(TmDocument, RoundTripAndErrors)
{
    auto m = testkit::fixture("flip");
    auto back = read_tm(write_tm(m));
    EXPECT_EQ(write_tm(back).dump(), write_tm(m).dump());
    auto doc = write_tm(m);
    doc["transitions"][0]["action"] = {{"write", "0"}, {"move", "L"}};
    EXPECT_THROW(read_tm(doc), DocumentError);
    doc["transitions"][0]["action"] = {{"move", "U"}};
    EXPECT_THROW(read_tm(doc), DocumentError);
    doc["transitions"][0]["action"] = {{"write", "7"}};
    EXPECT_THROW(read_tm(doc), DocumentError);
}
