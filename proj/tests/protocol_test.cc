/*
 * Copyright 2026 The secagg-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "secagg/client.h"
#include "secagg/errors.h"
#include "secagg/reference.h"
#include "secagg/server.h"

using namespace secagg;

namespace {

std::unique_ptr<RandomSource> rng_for(std::uint64_t seed, std::uint32_t id) {
  return std::make_unique<DeterministicRandom>(
      derive_subkey(SymmetricKey{}, "protocol test", seed ^ (id * 1000003)));
}

// Typed stage-by-stage driver; no wire framing, no dropout logic beyond the
// `silent_after` map. Gives tests direct access to every intermediate
// message.
struct TestRound {
  SecAggConfig cfg;
  SecAggServer server;
  std::vector<SecAggClient> clients;
  std::map<std::uint32_t, int> silent_after;  // id -> stage

  std::vector<std::pair<std::uint32_t, NeighborKeysPayload>> key_msgs;
  std::vector<std::pair<std::uint32_t, RoutedSharesPayload>> routed_msgs;
  std::vector<std::pair<std::uint32_t, UnmaskRequestPayload>> unmask_msgs;
  std::map<std::uint32_t, ShareKeysReply> share_replies;

  TestRound(const SecAggParams& params, std::uint32_t n, std::uint64_t l,
            const std::vector<ClientInput>& inputs, std::uint64_t seed)
      : cfg(validate(fill_defaults(params, n, l), n, l)), server(cfg) {
    clients.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      clients.emplace_back(inputs[i].values, inputs[i].weight,
                           rng_for(seed, i));
    }
  }

  bool alive(std::uint32_t id, int stage) const {
    auto it = silent_after.find(id);
    return it == silent_after.end() || it->second >= stage;
  }

  void run_stage1() {
    for (auto& [to, payload] : server.setup()) {
      if (!alive(to, 1)) continue;
      server.receive_ask_keys(to, clients[to].handle_setup(payload));
    }
  }

  void run_stage2() {
    key_msgs = server.broadcast_keys();
    for (auto& [to, payload] : key_msgs) {
      if (!alive(to, 2)) continue;
      share_replies[to] = clients[to].handle_neighbor_keys(payload);
      server.receive_share_keys(to, share_replies[to]);
    }
  }

  void run_stage3() {
    routed_msgs = server.route_shares();
    for (auto& [to, payload] : routed_msgs) {
      if (!alive(to, 3)) continue;
      server.receive_masked_vector(to,
                                   clients[to].handle_routed_shares(payload));
    }
  }

  void run_stage4() {
    unmask_msgs = server.unmask_request();
    for (auto& [to, payload] : unmask_msgs) {
      if (!alive(to, 4)) continue;
      server.receive_unmask_reply(to,
                                  clients[to].handle_unmask_request(payload));
    }
  }

  RoundResult run_all() {
    run_stage1();
    run_stage2();
    run_stage3();
    run_stage4();
    return server.finalize();
  }
};

std::vector<ClientInput> constant_inputs(std::uint32_t n, std::uint64_t l,
                                         double value) {
  return std::vector<ClientInput>(n, ClientInput{RealVector(l, value), 1});
}

}  // namespace

TEST_CASE("two-client weighted round matches the plaintext oracle") {
  // Weights 1 and 3, scalar models 2.0 and 6.0: average (2 + 18)/4 = 5.
  SecAggParams params;
  params.share_num = 2;
  params.threshold = 2;
  params.clipping_range = 8.0;
  params.target_range = 1 << 16;
  params.max_weights_factor = 4;
  std::vector<ClientInput> inputs{{{2.0}, 1}, {{6.0}, 3}};

  TestRound round(params, 2, 1, inputs, 1);
  const auto result = round.run_all();
  REQUIRE(result.aggregate.size() == 1);
  const double tol = quantization_tolerance(8.0, 1 << 16);
  CHECK(std::fabs(result.aggregate[0] - 5.0) <= tol);
  CHECK(result.survivor_count == 2);
}

TEST_CASE("identical inputs aggregate to themselves") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  TestRound round(params, 5, 3, constant_inputs(5, 3, 1.25), 2);
  const auto result = round.run_all();
  const double tol = quantization_tolerance(3.0, 1 << 16);
  for (double v : result.aggregate) CHECK(std::fabs(v - 1.25) <= tol);
}

TEST_CASE("handlers reject out-of-order and repeated invocation") {
  SecAggParams params;
  params.share_num = 2;
  params.threshold = 2;
  TestRound round(params, 2, 1, constant_inputs(2, 1, 0.5), 3);

  auto setup_msgs = round.server.setup();
  CHECK_THROWS_AS(round.server.setup(), StateError);

  round.server.receive_ask_keys(
      0, round.clients[0].handle_setup(setup_msgs[0].second));
  CHECK_THROWS_AS(round.clients[0].handle_setup(setup_msgs[0].second),
                  StateError);
  CHECK_THROWS_AS(round.clients[1].handle_unmask_request({}), StateError);
  CHECK_THROWS_AS(round.server.finalize(), StateError);
}

TEST_CASE("round aborts when too few clients send keys") {
  SecAggParams params;
  params.share_num = 3;
  params.threshold = 3;
  TestRound round(params, 3, 1, constant_inputs(3, 1, 0.5), 4);
  round.silent_after[2] = 0;  // |U1| = 2 = threshold - 1
  round.run_stage1();
  CHECK_THROWS_AS(round.server.broadcast_keys(), AbortError);
  try {
    TestRound again(params, 3, 1, constant_inputs(3, 1, 0.5), 4);
    again.silent_after[2] = 0;
    again.run_stage1();
    again.server.broadcast_keys();
  } catch (const AbortError& e) {
    CHECK(e.reason() == AbortReason::kTooFewClients);
    CHECK(e.stage() == 1);
  }
}

TEST_CASE("neighbor key lists carry exactly the graph neighbors") {
  SecAggParams params;
  params.share_num = 3;
  params.threshold = 2;
  TestRound round(params, 6, 1, constant_inputs(6, 1, 0.5), 5);
  round.run_stage1();
  round.run_stage2();
  for (const auto& [to, payload] : round.key_msgs) {
    CHECK(payload.neighbors.size() == 2);  // k - 1, self excluded
    for (const auto& entry : payload.neighbors) {
      CHECK(round.server.graph().are_neighbors(to, entry.id));
      CHECK(entry.id != to);
    }
  }
}

TEST_CASE("complete graph: every client gets n-1 neighbor keys") {
  SecAggParams params;
  params.share_num = 4;
  params.threshold = 2;
  TestRound round(params, 4, 1, constant_inputs(4, 1, 0.5), 6);
  round.run_stage1();
  round.run_stage2();
  for (const auto& [to, payload] : round.key_msgs) {
    CHECK(payload.neighbors.size() == 3);
  }
}

TEST_CASE("share replies hold one ciphertext per listed neighbor") {
  SecAggParams params;
  params.share_num = 51;
  params.threshold = 26;
  TestRound round(params, 51, 1, constant_inputs(51, 1, 0.5), 7);
  round.run_stage1();
  round.run_stage2();
  for (const auto& [id, reply] : round.share_replies) {
    CHECK(reply.shares.size() == 50);  // 51 pairs, one kept locally
  }
}

TEST_CASE("routing preserves ciphertext bytes and counts") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  TestRound round(params, 5, 2, constant_inputs(5, 2, 0.5), 8);
  round.run_stage1();
  round.run_stage2();
  auto routed = round.server.route_shares();

  std::size_t delivered = 0;
  for (const auto& [to, payload] : routed) {
    CHECK(payload.shares.size() == 4);  // k - 1, no dropouts
    for (const auto& entry : payload.shares) {
      // The relayed bytes are exactly what the origin sent for this target.
      const auto& sent = round.share_replies.at(entry.id).shares;
      bool found = false;
      for (const auto& upload : sent) {
        if (upload.id == to) {
          CHECK(upload.ciphertext == entry.ciphertext);
          found = true;
        }
      }
      CHECK(found);
      ++delivered;
    }
  }
  CHECK(delivered == 5 * 4);
}

TEST_CASE("a stage-1 dropout shrinks routed bundles by one and proceeds") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  params.min_frac = 0.2;
  TestRound round(params, 5, 1, constant_inputs(5, 1, 0.5), 18);
  round.silent_after[2] = 1;  // sent keys, never sends shares
  round.run_stage1();
  round.run_stage2();
  auto routed = round.server.route_shares();
  CHECK(routed.size() == 4);
  for (const auto& [to, payload] : routed) {
    CHECK(payload.shares.size() == 3);  // k - 2
  }
  for (auto& [to, payload] : routed) {
    round.server.receive_masked_vector(
        to, round.clients[to].handle_routed_shares(payload));
  }
  round.run_stage4();
  const auto result = round.server.finalize();
  CHECK(result.survivor_count == 4);
}

TEST_CASE("a tampered routed ciphertext is caught by the receiver") {
  SecAggParams params;
  params.share_num = 3;
  params.threshold = 2;
  TestRound round(params, 3, 1, constant_inputs(3, 1, 0.5), 9);
  round.run_stage1();
  round.run_stage2();
  auto routed = round.server.route_shares();
  auto& [to, payload] = routed.front();
  payload.shares.front().ciphertext.back() ^= 0x01;
  CHECK_THROWS_AS(round.clients[to].handle_routed_shares(payload),
                  AuthenticationError);
}

TEST_CASE("masked vectors have length l+1 and differ across clients") {
  SecAggParams params;
  params.share_num = 2;
  params.threshold = 2;
  TestRound round(params, 2, 4, constant_inputs(2, 4, 0.75), 10);
  round.run_stage1();
  round.run_stage2();
  auto routed = round.server.route_shares();
  const auto y0 = round.clients[0].handle_routed_shares(routed[0].second);
  const auto y1 = round.clients[1].handle_routed_shares(routed[1].second);
  CHECK(y0.values.size() == 5);
  CHECK(y1.values.size() == 5);
  CHECK(y0.values != y1.values);  // same input, different seeds
}

TEST_CASE("white-box: subtracting all masks recovers the extended vector") {
  SecAggParams params;
  params.share_num = 3;
  params.threshold = 2;
  params.clipping_range = 2.0;
  params.max_weights_factor = 4;
  std::vector<ClientInput> inputs{{{0.5, -1.0}, 2}, {{1.0, 1.0}, 1},
                                  {{-0.25, 0.125}, 3}};
  TestRound round(params, 3, 2, inputs, 11);
  round.run_stage1();
  round.run_stage2();
  auto routed = round.server.route_shares();
  const auto reply = round.clients[0].handle_routed_shares(routed[0].second);

  const auto& cfg = round.cfg;
  FieldVector y(reply.values, cfg.mod_range);
  sub_in_place(y, prg_expand(round.clients[0].self_mask_seed(), 3,
                             cfg.mod_range));
  for (const auto& [j, seed] : round.clients[0].active_pairwise_seeds()) {
    const auto mask = prg_expand(seed, 3, cfg.mod_range);
    if (pairwise_sign(0, j) > 0) {
      sub_in_place(y, mask);
    } else {
      add_in_place(y, mask);
    }
  }
  const auto expected = extend_with_weight(
      quantize(inputs[0].values, cfg.clipping_range, cfg.target_range),
      inputs[0].weight, cfg.max_weights_factor, cfg.mod_range);
  CHECK(y == expected);
}

TEST_CASE("unmask requests split survivors and dropped disjointly") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  params.min_num = 3;
  params.min_frac = 0.1;

  SUBCASE("no dropouts: only seed shares are requested") {
    TestRound round(params, 5, 1, constant_inputs(5, 1, 0.5), 12);
    round.run_stage1();
    round.run_stage2();
    round.run_stage3();
    round.run_stage4();
    for (const auto& [to, req] : round.unmask_msgs) {
      CHECK(req.b_ids.size() == 5);
      CHECK(req.key_ids.empty());
    }
  }

  SUBCASE("a share-keys dropout moves ids to the key list") {
    TestRound round(params, 5, 1, constant_inputs(5, 1, 0.5), 13);
    round.silent_after[1] = 2;
    round.run_stage1();
    round.run_stage2();
    round.run_stage3();
    round.run_stage4();
    for (const auto& [to, req] : round.unmask_msgs) {
      CHECK(req.b_ids == std::vector<std::uint32_t>{0, 2, 3, 4});
      CHECK(req.key_ids == std::vector<std::uint32_t>{1});
      std::set<std::uint32_t> b(req.b_ids.begin(), req.b_ids.end());
      for (std::uint32_t id : req.key_ids) CHECK(!b.contains(id));
    }
    const auto result = round.server.finalize();
    CHECK(result.survivor_count == 4);
    CHECK_FALSE(round.server.dual_secret_breach());
  }
}

TEST_CASE("clients refuse a request naming both kinds for one id") {
  SecAggParams params;
  params.share_num = 3;
  params.threshold = 2;
  TestRound round(params, 3, 1, constant_inputs(3, 1, 0.5), 14);
  round.run_stage1();
  round.run_stage2();
  round.run_stage3();

  UnmaskRequestPayload conflicted;
  conflicted.b_ids = {0, 1};
  conflicted.key_ids = {1};
  CHECK_THROWS_AS(round.clients[0].handle_unmask_request(conflicted),
                  ProtocolError);
}

TEST_CASE("server rejects unknown senders and duplicate replies") {
  SecAggParams params;
  params.share_num = 2;
  params.threshold = 2;
  TestRound round(params, 2, 1, constant_inputs(2, 1, 0.5), 15);
  auto setup_msgs = round.server.setup();
  const auto reply = round.clients[0].handle_setup(setup_msgs[0].second);
  round.server.receive_ask_keys(0, reply);
  CHECK_THROWS_AS(round.server.receive_ask_keys(0, reply), ProtocolError);
  CHECK_THROWS_AS(round.server.receive_ask_keys(7, reply), ProtocolError);
}

TEST_CASE("abort wipes client secrets and parks the state machine") {
  SecAggParams params;
  params.share_num = 2;
  params.threshold = 2;
  TestRound round(params, 2, 1, constant_inputs(2, 1, 0.5), 16);
  round.run_stage1();
  round.run_stage2();
  AbortPayload abort;
  abort.reason = static_cast<std::uint8_t>(AbortReason::kTooFewClients);
  round.clients[0].handle_abort(abort);
  CHECK(round.clients[0].stage() == SecAggClient::Stage::kAborted);
  const Seed zero{};
  CHECK(round.clients[0].self_mask_seed() == zero);
  CHECK_THROWS_AS(round.clients[0].handle_unmask_request({}), StateError);
}

TEST_CASE("survivor sets stay nested through a dropout round") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  params.min_num = 3;
  params.min_frac = 0.2;
  TestRound round(params, 6, 2, constant_inputs(6, 2, 0.5), 17);
  round.silent_after[0] = 1;
  round.silent_after[4] = 2;
  round.run_stage1();
  round.run_stage2();
  round.run_stage3();
  round.run_stage4();
  round.server.finalize();
  for (int s = 1; s <= 4; ++s) {
    const auto& outer = round.server.survivors(s - 1);
    const auto& inner = round.server.survivors(s);
    CHECK(std::includes(outer.begin(), outer.end(), inner.begin(),
                        inner.end()));
  }
  CHECK(round.server.survivors(2) ==
        std::vector<std::uint32_t>{1, 2, 3, 4, 5});
  CHECK(round.server.survivors(3) == std::vector<std::uint32_t>{1, 2, 3, 5});
}
