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

#include "pfuzz/common/money.hpp"

#include <cctype>
#include <cstdlib>

#include "pfuzz/common/error.hpp"

namespace pfuzz {

namespace {
constexpr int kFractionDigits = 12;
constexpr std::int64_t kUnitsPerToken = 1'000'000;  // per-million -> per-token
}  // namespace

Money Money::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty amount");
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) throw ParseError("malformed amount: " + std::string(text));
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed amount: " + std::string(text));
    any_digit = true;
    if (seen_dot) {
      if (++frac_digits > kFractionDigits)
        throw ParseError("too many decimals in amount: " + std::string(text));
      frac = frac * 10 + (c - '0');
    } else {
      whole = whole * 10 + (c - '0');
      if (whole > 9'000'000) throw ParseError("amount out of range");
    }
  }
  if (!any_digit) throw ParseError("malformed amount: " + std::string(text));
  for (int i = frac_digits; i < kFractionDigits; ++i) frac *= 10;
  std::int64_t units = whole * kUnitsPerWhole + frac;
  return Money(negative ? -units : units);
}

std::string Money::to_string() const {
  std::int64_t u = units_;
  std::string sign;
  if (u < 0) {
    sign = "-";
    u = -u;
  }
  std::string out = sign + std::to_string(u / kUnitsPerWhole);
  std::int64_t frac = u % kUnitsPerWhole;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, kFractionDigits - digits.size(), '0');
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

Money ModelPrice::cost(std::int64_t prompt_tokens,
                       std::int64_t completion_tokens) const {
  if (input_per_million.units() % kUnitsPerToken != 0 ||
      output_per_million.units() % kUnitsPerToken != 0)
    throw InvariantError("model prices must have at most 6 decimals");
  const std::int64_t in = input_per_million.units() / kUnitsPerToken;
  const std::int64_t out = output_per_million.units() / kUnitsPerToken;
  return Money::from_units(prompt_tokens * in + completion_tokens * out);
}

}  // namespace pfuzz
