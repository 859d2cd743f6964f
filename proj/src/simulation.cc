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

#include "secagg/simulation.h"

#include <algorithm>
#include <chrono>
#include <memory>
#include <set>
#include <utility>

#include "secagg/bytes.h"
#include "secagg/client.h"

namespace secagg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// One round's plumbing: framing, metering, transcript and dropout filtering.
class Router {
 public:
  static constexpr int kNeverDrops = 99;

  Router(const RoundSpec& spec, std::uint32_t n, TrafficMeter& meter,
         RoundOutcome& outcome)
      : meter_(meter), outcome_(outcome), drop_after_(n, kNeverDrops) {
    for (const auto& event : spec.schedule.events) {
      drop_after_[event.client_id] = event.after_stage;
    }
    keep_transcript_ = spec.keep_transcript;
  }

  bool alive_at(std::uint32_t id, int stage) const {
    return drop_after_[id] >= stage;
  }

  // Server -> client. Returns true if the client is still up to receive it;
  // the server's sent bytes are metered either way.
  bool deliver(StageTag tag, int stage_slot, std::uint32_t to,
               std::vector<std::uint8_t> payload, int reply_stage) {
    const auto frame =
        encode_frame(Frame{tag, kServerId, std::move(payload)});
    record(kServerId, to, tag, frame);
    meter_.record_server(stage_slot, frame.size(), 0);
    if (!alive_at(to, reply_stage)) return false;
    meter_.record_client(to, stage_slot, 0, frame.size());
    return true;
  }

  // Client -> server. Runs the payload through the wire codec and returns
  // the decoded frame for the server to consume.
  Frame submit(StageTag tag, int stage_slot, std::uint32_t from,
               std::vector<std::uint8_t> payload) {
    const auto frame = encode_frame(Frame{tag, from, std::move(payload)});
    record(from, kServerId, tag, frame);
    meter_.record_client(from, stage_slot, frame.size(), 0);
    meter_.record_server(stage_slot, 0, frame.size());
    return decode_frame(frame);
  }

 private:
  void record(std::uint32_t from, std::uint32_t to, StageTag tag,
              const std::vector<std::uint8_t>& frame) {
    ByteWriter w;
    w.u32be(to);
    const auto addressing = w.take();
    hash_.update(addressing);
    hash_.update(frame);
    if (keep_transcript_) {
      outcome_.transcript.push_back({from, to, tag, frame});
    }
  }

 public:
  std::array<std::uint8_t, 32> finish_hash() { return hash_.finish(); }

 private:
  TrafficMeter& meter_;
  RoundOutcome& outcome_;
  std::vector<int> drop_after_;
  bool keep_transcript_ = false;
  HashAccumulator hash_;
};

template <typename T>
void shuffle_replies(std::vector<T>& replies, RandomSource& rng) {
  for (std::size_t i = replies.size(); i > 1; --i) {
    const std::size_t j = rng.uniform(i);
    std::swap(replies[i - 1], replies[j]);
  }
}

}  // namespace

void DropoutSchedule::validate(std::uint32_t n) const {
  std::set<std::uint32_t> seen;
  for (const auto& event : events) {
    if (event.client_id >= n) {
      throw std::invalid_argument("dropout schedule names client " +
                                  std::to_string(event.client_id) +
                                  " but only " + std::to_string(n) +
                                  " are sampled");
    }
    if (event.after_stage < 0 || event.after_stage > 3) {
      throw std::invalid_argument("dropout stage must be in 0..3");
    }
    if (!seen.insert(event.client_id).second) {
      throw std::invalid_argument("duplicate client in dropout schedule");
    }
  }
}

RoundOutcome run_round(const RoundSpec& spec) {
  if (spec.inputs.empty()) {
    throw std::invalid_argument("need at least one client input");
  }
  const auto n = static_cast<std::uint32_t>(spec.inputs.size());
  const std::uint64_t l = spec.inputs.front().values.size();
  for (const auto& input : spec.inputs) {
    if (input.values.size() != l) {
      throw std::invalid_argument("all client vectors must share one length");
    }
  }
  spec.schedule.validate(n);

  RoundOutcome outcome;
  outcome.config = validate(fill_defaults(spec.params, n, l), n, l);
  const SecAggConfig& cfg = outcome.config;

  Router router(spec, n, outcome.meter, outcome);

  const SymmetricKey root =
      derive_subkey(SymmetricKey{}, "secagg sim root", spec.master_seed);
  DeterministicRandom arrival_rng(
      derive_subkey(root, "arrival", spec.arrival_salt));

  SecAggServer server(cfg, &outcome.meter);
  std::vector<SecAggClient> clients;
  clients.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    clients.emplace_back(spec.inputs[i].values, spec.inputs[i].weight,
                         std::make_unique<DeterministicRandom>(
                             derive_subkey(root, "client", i)),
                         &outcome.meter);
  }

  auto timed_client = [&](std::uint32_t id, auto&& fn) {
    const auto start = Clock::now();
    auto result = fn();
    outcome.meter.client_seconds[id] += seconds_since(start);
    return result;
  };
  auto timed_server = [&](auto&& fn) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      outcome.meter.server_seconds += seconds_since(start);
    } else {
      auto result = fn();
      outcome.meter.server_seconds += seconds_since(start);
      return result;
    }
  };

  auto snapshot_survivors = [&] {
    for (int s = 0; s <= 4; ++s) outcome.survivors[s] = server.survivors(s);
    outcome.dual_secret_breach = server.dual_secret_breach();
  };

  auto broadcast_abort = [&](const AbortError& e, int stage) {
    AbortPayload payload;
    payload.reason = static_cast<std::uint8_t>(e.reason());
    payload.stage = static_cast<std::uint8_t>(stage);
    payload.message = e.what();
    // The server notifies the survivor set it fixed at the failed barrier;
    // anyone outside it is already known to be gone. Delivery still depends
    // on the client listening past the abort stage.
    for (std::uint32_t i : server.survivors(stage)) {
      if (router.deliver(StageTag::kAbort, 5, i, payload.encode(),
                         stage + 1)) {
        clients[i].handle_abort(payload);
      }
    }
    outcome.abort = AbortInfo{e.reason(), e.stage(), e.what()};
    snapshot_survivors();
    outcome.transcript_hash = router.finish_hash();
  };

  auto stage_mark = Clock::now();
  auto close_stage = [&](int slot) {
    outcome.meter.stage_seconds[slot] += seconds_since(stage_mark);
    stage_mark = Clock::now();
  };

  try {
    // Stage 0 -> 1: parameters out, public keys back.
    auto setup_msgs = timed_server([&] { return server.setup(); });
    std::vector<std::pair<std::uint32_t, AskKeysReply>> key_replies;
    for (auto& msg : setup_msgs) {
      const std::uint32_t to = msg.first;
      const auto bytes = msg.second.encode();
      if (!router.deliver(StageTag::kSetup, 0, to, bytes, 1)) continue;
      const SetupPayload decoded = SetupPayload::decode(bytes);
      key_replies.emplace_back(to, timed_client(to, [&] {
        return clients[to].handle_setup(decoded);
      }));
    }
    close_stage(0);
    shuffle_replies(key_replies, arrival_rng);
    for (auto& reply : key_replies) {
      const Frame frame =
          router.submit(StageTag::kAskKeys, 1, reply.first,
                        reply.second.encode());
      timed_server([&] {
        server.receive_ask_keys(frame.sender,
                                AskKeysReply::decode(frame.payload));
      });
    }
    close_stage(1);

    // Stage 2: neighbor keys out, encrypted share pairs back.
    auto key_msgs = timed_server([&] { return server.broadcast_keys(); });
    std::vector<std::pair<std::uint32_t, ShareKeysReply>> share_replies;
    for (auto& msg : key_msgs) {
      const std::uint32_t to = msg.first;
      const auto bytes = msg.second.encode();
      if (!router.deliver(StageTag::kShareKeys, 2, to, bytes, 2)) continue;
      const auto decoded = NeighborKeysPayload::decode(bytes);
      share_replies.emplace_back(to, timed_client(to, [&] {
        return clients[to].handle_neighbor_keys(decoded);
      }));
    }
    shuffle_replies(share_replies, arrival_rng);
    for (auto& reply : share_replies) {
      const Frame frame =
          router.submit(StageTag::kShareKeys, 2, reply.first,
                        reply.second.encode());
      timed_server([&] {
        server.receive_share_keys(frame.sender,
                                  ShareKeysReply::decode(frame.payload));
      });
    }
    close_stage(2);

    // Stage 3: routed ciphertexts out, masked vectors back.
    auto routed_msgs = timed_server([&] { return server.route_shares(); });
    std::vector<std::pair<std::uint32_t, MaskedVectorReply>> vector_replies;
    for (auto& msg : routed_msgs) {
      const std::uint32_t to = msg.first;
      const auto bytes = msg.second.encode();
      if (!router.deliver(StageTag::kAskVectors, 3, to, bytes, 3)) continue;
      const auto decoded = RoutedSharesPayload::decode(bytes);
      vector_replies.emplace_back(to, timed_client(to, [&] {
        return clients[to].handle_routed_shares(decoded);
      }));
    }
    shuffle_replies(vector_replies, arrival_rng);
    for (auto& reply : vector_replies) {
      const Frame frame =
          router.submit(StageTag::kAskVectors, 3, reply.first,
                        reply.second.encode());
      timed_server([&] {
        server.receive_masked_vector(frame.sender,
                                     MaskedVectorReply::decode(frame.payload));
      });
    }
    close_stage(3);

    // Stage 4: share requests out, held shares back, then unmask.
    auto unmask_msgs = timed_server([&] { return server.unmask_request(); });
    std::vector<std::pair<std::uint32_t, UnmaskReply>> unmask_replies;
    for (auto& msg : unmask_msgs) {
      const std::uint32_t to = msg.first;
      const auto bytes = msg.second.encode();
      if (!router.deliver(StageTag::kUnmask, 4, to, bytes, 4)) continue;
      const auto decoded = UnmaskRequestPayload::decode(bytes);
      unmask_replies.emplace_back(to, timed_client(to, [&] {
        return clients[to].handle_unmask_request(decoded);
      }));
    }
    shuffle_replies(unmask_replies, arrival_rng);
    for (auto& reply : unmask_replies) {
      const Frame frame =
          router.submit(StageTag::kUnmask, 4, reply.first,
                        reply.second.encode());
      timed_server([&] {
        server.receive_unmask_reply(frame.sender,
                                    UnmaskReply::decode(frame.payload));
      });
    }

    outcome.result = timed_server([&] { return server.finalize(); });
    close_stage(4);
    snapshot_survivors();
    outcome.transcript_hash = router.finish_hash();
  } catch (const AbortError& e) {
    broadcast_abort(e, e.stage());
  }
  return outcome;
}

std::vector<ClientInput> random_inputs(std::uint32_t n, std::uint64_t l,
                                       double amplitude,
                                       std::uint64_t max_weight,
                                       RandomSource& rng) {
  if (max_weight < 1) {
    throw std::invalid_argument("max_weight must be >= 1");
  }
  std::vector<ClientInput> inputs(n);
  for (auto& input : inputs) {
    input.values.resize(l);
    for (auto& v : input.values) {
      // 53-bit mantissa draw mapped onto [-amplitude, amplitude].
      const double unit =
          static_cast<double>(rng.u64() >> 11) / 9007199254740992.0;
      v = (2.0 * unit - 1.0) * amplitude;
    }
    input.weight = 1 + rng.uniform(max_weight);
  }
  return inputs;
}

DropoutSchedule random_dropouts(std::uint32_t n, double frac, int stage,
                                RandomSource& rng) {
  if (frac < 0 || frac > 1) {
    throw std::invalid_argument("dropout fraction must be in [0, 1]");
  }
  const auto count =
      static_cast<std::uint32_t>(frac * static_cast<double>(n));
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.uniform(n - i));
    std::swap(ids[i], ids[j]);
  }
  DropoutSchedule schedule;
  for (std::uint32_t i = 0; i < count; ++i) {
    schedule.events.push_back({ids[i], stage});
  }
  std::sort(schedule.events.begin(), schedule.events.end(),
            [](const auto& a, const auto& b) {
              return a.client_id < b.client_id;
            });
  return schedule;
}

}  // namespace secagg
