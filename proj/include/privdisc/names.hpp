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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privdisc {

constexpr std::size_t kMaxNameComponents = 16;
constexpr std::size_t kMaxComponentBytes = 64;

/// Non-empty, at most kMaxComponentBytes, valid UTF-8, no '/'.
bool is_valid_component(std::string_view component);

/// Hierarchical human-readable name such as "Alice/Devices/TV".
class HierName {
 public:
  /// Throws Error(kInvalidName).
  explicit HierName(std::vector<std::string> components);
  static HierName parse(std::string_view canonical);
  static std::optional<HierName> try_parse(std::string_view canonical);

  const std::vector<std::string>& components() const { return components_; }
  std::size_t depth() const { return components_.size(); }
  /// Components joined by '/'.
  std::string str() const;
  /// The leading `n` components, 1 <= n <= depth().
  HierName prefix(std::size_t n) const;
  HierName child(std::string_view component) const;
  /// Whole-component prefix test: "a/b" is a prefix of "a/b/c" but not of "a/bc".
  bool has_prefix(const HierName& p) const;

  bool operator==(const HierName&) const = default;
  /// Orders by canonical string, bytewise.
  std::strong_ordering operator<=>(const HierName& o) const;

 private:
  std::vector<std::string> components_;
};

/// A set of name prefixes. Normalized on construction: sorted by canonical
/// string, deduplicated, and with any prefix that extends another removed
/// (it would authorize nothing new).
class PrefixPolicy {
 public:
  /// Throws Error(kInvalidName) when empty.
  explicit PrefixPolicy(std::vector<HierName> prefixes);
  /// Comma-separated canonical names, e.g. "Alice/Family,Bob".
  static PrefixPolicy parse(std::string_view list);

  const std::vector<HierName>& prefixes() const { return prefixes_; }
  std::size_t size() const { return prefixes_.size(); }
  std::string str() const;
  /// True if `prefixes` is already in normalized form.
  static bool is_normalized(const std::vector<HierName>& prefixes);

  bool operator==(const PrefixPolicy&) const = default;

 private:
  std::vector<HierName> prefixes_;
};

bool satisfies(const HierName& name, const PrefixPolicy& policy);
/// First policy prefix (in policy order) that `name` extends.
const HierName* first_match(const HierName& name, const PrefixPolicy& policy);

}  // namespace privdisc
