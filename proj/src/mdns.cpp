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


#include <sodium.h>

#include <algorithm>

#include "privdisc/wire.hpp"

namespace privdisc::wire {

std::string base64url_encode(ByteView b) {
  ensure_sodium();
  const auto variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(b.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), b.data(), b.size(), variant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

Bytes base64url_decode(std::string_view s) {
  ensure_sodium();
  Bytes out(s.size() * 3 / 4 + 1);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), s.data(), s.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_URLSAFE_NO_PADDING) != 0 ||
      end != s.data() + s.size())
    throw Error(Errc::kMalformed, "invalid base64url text");
  out.resize(len);
  return out;
}

TxtRecord to_mdns_txt(const Broadcast& b) { return to_mdns_txt(encode(b)); }

TxtRecord to_mdns_txt(ByteView encoded_broadcast) {
  if (encoded_broadcast.size() > kMdnsBudget)
    throw Error(Errc::kOversize, "broadcast of " + std::to_string(encoded_broadcast.size()) +
                                     " bytes exceeds the " + std::to_string(kMdnsBudget) +
                                     "-byte mDNS budget; use a BLE pointer");
  TxtRecord txt{std::string(kServiceLabel), {}};
  const std::string text = base64url_encode(encoded_broadcast);
  for (std::size_t off = 0, i = 0; off < text.size(); off += kTxtChunk, ++i)
    txt.entries.emplace_back("p" + std::to_string(i), text.substr(off, kTxtChunk));
  return txt;
}

Bytes from_mdns_txt(const TxtRecord& txt) {
  if (txt.service != kServiceLabel) throw Error(Errc::kMalformed, "unexpected service label");
  if (txt.entries.empty()) throw Error(Errc::kMalformed, "empty TXT record");
  std::string text;
  for (std::size_t i = 0; i < txt.entries.size(); ++i) {
    const auto& [key, value] = txt.entries[i];
    if (key != "p" + std::to_string(i)) throw Error(Errc::kMalformed, "TXT keys out of sequence");
    const bool last = i + 1 == txt.entries.size();
    if (value.empty() || value.size() > kTxtChunk || (!last && value.size() != kTxtChunk))
      throw Error(Errc::kMalformed, "bad TXT chunk size");
    text += value;
  }
  auto bytes = base64url_decode(text);
  if (bytes.size() > kMdnsBudget) throw Error(Errc::kOversize, "TXT payload exceeds budget");
  return bytes;
}

std::string txt_to_text(const TxtRecord& txt) {
  std::string out = "service=" + txt.service + "\n";
  for (const auto& [k, v] : txt.entries) out += k + "=" + v + "\n";
  return out;
}

std::array<std::uint8_t, kBlePointerSize> to_ble_pointer(const Endpoint& ep) {
  std::array<std::uint8_t, kBlePointerSize> out{};
  out[0] = kBleMagic[0];
  out[1] = kBleMagic[1];
  out[2] = kBleVersion;
  std::copy(ep.address.begin(), ep.address.end(), out.begin() + 3);
  out[19] = static_cast<std::uint8_t>(ep.port >> 8);
  out[20] = static_cast<std::uint8_t>(ep.port);
  return out;
}

Endpoint from_ble_pointer(ByteView record) {
  if (record.size() != kBlePointerSize) throw Error(Errc::kMalformed, "BLE pointer must be 31 bytes");
  if (record[0] != kBleMagic[0] || record[1] != kBleMagic[1]) throw Error(Errc::kMalformed, "bad BLE magic");
  if (record[2] != kBleVersion) throw Error(Errc::kUnknownVersion, "unknown BLE pointer version");
  if (!std::all_of(record.begin() + 21, record.end(), [](std::uint8_t b) { return b == 0; }))
    throw Error(Errc::kMalformed, "non-zero reserved bytes");
  Endpoint ep;
  std::copy(record.begin() + 3, record.begin() + 19, ep.address.begin());
  ep.port = static_cast<std::uint16_t>(record[19] << 8 | record[20]);
  return ep;
}

}  // namespace privdisc::wire
