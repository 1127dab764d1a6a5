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


#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "privdisc/crypto.hpp"

namespace privdisc::bench {

constexpr std::size_t kMinIterations = 50;

struct Row {
  std::string row;
  double value = 0;
  std::string unit;
  std::size_t iterations = 0;
};

/// Pairing, Encrypt, Decrypt, Extract: median milliseconds.
std::vector<Row> ibe(std::size_t iterations, Entropy& entropy);

/// SIGMA-I, Private Mutual Auth (cached ct_S), Slowdown: median
/// milliseconds for one full in-process handshake, then the ratio.
std::vector<Row> handshake(std::size_t iterations, Entropy& entropy);

const Row* find(const std::vector<Row>& rows, std::string_view name);

/// Header row then one tab-separated line per row.
std::string to_tsv(const std::vector<Row>& rows);

}  // namespace privdisc::bench
