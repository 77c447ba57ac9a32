// Copyright 2026 The patternfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PFUZZ_COMMON_MONEY_HPP_
#define PFUZZ_COMMON_MONEY_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pfuzz {

/// Exact currency amount stored as an integer count of 1e-12 units.
///
/// A price quoted per million tokens with at most six decimals is an integral
/// number of units per token, so `tokens * price` never rounds and ledger
/// totals are exact sums.
class Money {
 public:
  static constexpr std::int64_t kUnitsPerWhole = 1'000'000'000'000;

  constexpr Money() = default;
  static constexpr Money from_units(std::int64_t units) { return Money(units); }

  // Parses "89.07", "-0.5", "3". At most 12 fractional digits.
  static Money parse(std::string_view text);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const {
    return static_cast<double>(units_) / static_cast<double>(kUnitsPerWhole);
  }
  // Shortest decimal form: "89.07", "0.003", "0".
  std::string to_string() const;

  constexpr Money& operator+=(Money other) {
    units_ += other.units_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator*(Money a, std::int64_t n) {
    return Money(a.units_ * n);
  }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

/// Price of a model, quoted per one million tokens.
struct ModelPrice {
  Money input_per_million;
  Money output_per_million;

  // Exact as long as the quoted prices use <= 6 decimals.
  Money cost(std::int64_t prompt_tokens, std::int64_t completion_tokens) const;
};

}  // namespace pfuzz

#endif  // PFUZZ_COMMON_MONEY_HPP_
