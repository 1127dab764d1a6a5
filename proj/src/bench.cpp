// Copyright 2026 The privdisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "privdisc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>

#include "privdisc/ibe.hpp"
#include "privdisc/mutual_auth.hpp"

namespace privdisc::bench {

namespace {

double median_ms(std::size_t iterations, const std::function<void()>& body) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = clock::now();
    body();
    samples.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
}

// Keeps results observable so the optimizer cannot drop the work.
volatile std::uint8_t g_sink = 0;

}  // namespace

std::vector<Row> ibe(std::size_t iterations, Entropy& entropy) {
  iterations = std::max(iterations, kMinIterations);
  using namespace pairing;
  const auto params = GroupParams::bls12_381();
  const auto kp = ibe::setup(params, entropy);
  const Bytes id = to_bytes("dev.v.io/u/Alice/Devices/TV");
  const Bytes msg(32, 0x5a);
  const auto key = ibe::extract(kp.msk, id, entropy);
  const auto ct = ibe::encrypt(kp.mpk, id, msg, entropy);

  const G1 a = G1::generator() * Scalar::random_nonzero(entropy);
  const G2 b = G2::generator() * Scalar::random_nonzero(entropy);

  std::vector<Row> rows;
  rows.push_back({"Pairing", median_ms(iterations, [&] { g_sink = g_sink ^ pair(a, b).to_bytes()[0]; }), "ms",
                  iterations});
  rows.push_back({"Encrypt",
                  median_ms(iterations, [&] { g_sink = g_sink ^ ibe::encrypt(kp.mpk, id, msg, entropy).sym_ct[0]; }),
                  "ms", iterations});
  rows.push_back({"Decrypt", median_ms(iterations, [&] {
                    auto pt = ibe::decrypt(kp.mpk, key, ct);
                    g_sink = g_sink ^ (pt ? (*pt)[0] : 0);
                  }),
                  "ms", iterations});
  rows.push_back({"Extract",
                  median_ms(iterations, [&] { g_sink = g_sink ^ ibe::extract(kp.msk, id, entropy).K.to_bytes()[0]; }),
                  "ms", iterations});
  return rows;
}

std::vector<Row> handshake(std::size_t iterations, Entropy& entropy) {
  iterations = std::max(iterations, kMinIterations);
  const Principal root = new_root("bench", entropy);
  const PrefixPolicy all({HierName::parse("bench")});
  auto client = std::make_shared<const Principal>(make_principal(root, HierName::parse("bench/client"), entropy, all));
  auto server = std::make_shared<const Principal>(make_principal(root, HierName::parse("bench/server"), entropy, all));
  const TrustAnchors anchors{root.trust_anchor()};
  const auto cached = mutual_auth::make_cached_identity(*server, entropy);

  auto run = [&](AuthMode mode) {
    mutual_auth::ClientSession c({client, anchors, all, mode});
    mutual_auth::ServerSession s({server, anchors, all, mode}, cached);
    auto m2 = s.on_init(c.start(entropy), entropy);
    auto m3 = c.on_response(*m2);
    if (!m3 || !s.on_finish(*m3)) throw Error(Errc::kUnsupported, "benchmark handshake failed");
  };

  const double sigma = median_ms(iterations, [&] { run(AuthMode::kSigmaBaseline); });
  const double priv = median_ms(iterations, [&] { run(AuthMode::kCacheable); });
  return {{"SIGMA-I", sigma, "ms", iterations},
          {"Private Mutual Auth", priv, "ms", iterations},
          {"Slowdown", sigma > 0 ? priv / sigma : 0, "x", iterations}};
}

const Row* find(const std::vector<Row>& rows, std::string_view name) {
  for (const auto& r : rows)
    if (r.row == name) return &r;
  return nullptr;
}

std::string to_tsv(const std::vector<Row>& rows) {
  std::string out = "row\tvalue\tunit\titerations\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.3f", r.value);
    out += r.row + '\t' + buf + '\t' + r.unit + '\t' + std::to_string(r.iterations) + '\n';
  }
  return out;
}

}  // namespace privdisc::bench
