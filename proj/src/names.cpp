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

#include "privdisc/names.hpp"

#include <algorithm>

#include "privdisc/bytes.hpp"

namespace privdisc {

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = cp << 6 | (cc & 0x3f);
    }
    // Overlong forms, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += len;
  }
  return true;
}

}  // namespace

bool is_valid_component(std::string_view component) {
  if (component.empty() || component.size() > kMaxComponentBytes) return false;
  if (component.find('/') != std::string_view::npos) return false;
  return valid_utf8(component);
}

HierName::HierName(std::vector<std::string> components) : components_(std::move(components)) {
  if (components_.empty() || components_.size() > kMaxNameComponents)
    throw Error(Errc::kInvalidName, "name must have 1.." + std::to_string(kMaxNameComponents) + " components");
  for (const auto& c : components_)
    if (!is_valid_component(c)) throw Error(Errc::kInvalidName, "invalid name component '" + c + "'");
}

HierName HierName::parse(std::string_view canonical) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = canonical.find('/', start);
    parts.emplace_back(canonical.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return HierName(std::move(parts));
}

std::optional<HierName> HierName::try_parse(std::string_view canonical) {
  try {
    return parse(canonical);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string HierName::str() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out.push_back('/');
    out += components_[i];
  }
  return out;
}

HierName HierName::prefix(std::size_t n) const {
  if (n == 0 || n > components_.size()) throw Error(Errc::kInvalidName, "prefix length out of range");
  return HierName(std::vector<std::string>(components_.begin(), components_.begin() + n));
}

HierName HierName::child(std::string_view component) const {
  auto parts = components_;
  parts.emplace_back(component);
  return HierName(std::move(parts));
}

bool HierName::has_prefix(const HierName& p) const {
  if (p.components_.size() > components_.size()) return false;
  return std::equal(p.components_.begin(), p.components_.end(), components_.begin());
}

std::strong_ordering HierName::operator<=>(const HierName& o) const { return str() <=> o.str(); }

PrefixPolicy::PrefixPolicy(std::vector<HierName> prefixes) {
  if (prefixes.empty()) throw Error(Errc::kInvalidName, "policy must contain at least one prefix");
  std::sort(prefixes.begin(), prefixes.end());
  prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
  for (const auto& p : prefixes) {
    bool redundant = std::any_of(prefixes.begin(), prefixes.end(),
                                 [&](const HierName& q) { return !(q == p) && p.has_prefix(q); });
    if (!redundant) prefixes_.push_back(p);
  }
}

PrefixPolicy PrefixPolicy::parse(std::string_view list) {
  std::vector<HierName> names;
  std::size_t start = 0;
  while (true) {
    auto pos = list.find(',', start);
    names.push_back(HierName::parse(list.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return PrefixPolicy(std::move(names));
}

std::string PrefixPolicy::str() const {
  std::string out;
  for (std::size_t i = 0; i < prefixes_.size(); ++i) {
    if (i) out.push_back(',');
    out += prefixes_[i].str();
  }
  return out;
}

bool PrefixPolicy::is_normalized(const std::vector<HierName>& prefixes) {
  if (prefixes.empty()) return false;
  try {
    return PrefixPolicy(prefixes).prefixes_ == prefixes;
  } catch (const Error&) {
    return false;
  }
}

bool satisfies(const HierName& name, const PrefixPolicy& policy) {
  return first_match(name, policy) != nullptr;
}

const HierName* first_match(const HierName& name, const PrefixPolicy& policy) {
  for (const auto& p : policy.prefixes())
    if (name.has_prefix(p)) return &p;
  return nullptr;
}

}  // namespace privdisc
