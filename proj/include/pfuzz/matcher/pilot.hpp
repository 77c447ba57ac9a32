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

#ifndef PFUZZ_MATCHER_PILOT_HPP_
#define PFUZZ_MATCHER_PILOT_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::matcher {

// Pearson's r is undefined when either sample has zero variance.
class UndefinedCorrelationError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

struct Correlation {
  double r = 0;
  double p_value = 1;  // two-sided, t distribution with n - 2 degrees of freedom
  std::size_t n = 0;
};

// Two-sided p-value for Pearson's r over n samples.
double pearson_p_value(double r, std::size_t n);

/// Pearson correlation of two equally long samples (n >= 3).
template <typename DerivedX, typename DerivedY>
Correlation pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) throw InvariantError("pearson samples differ in length");
  if (x.size() < 3) throw InvariantError("pearson needs at least 3 samples");
  const Eigen::ArrayXd xc = x.template cast<double>().array() - x.template cast<double>().mean();
  const Eigen::ArrayXd yc = y.template cast<double>().array() - y.template cast<double>().mean();
  const double sxx = xc.square().sum();
  const double syy = yc.square().sum();
  if (sxx == 0) throw UndefinedCorrelationError("pearson undefined: x is constant");
  if (syy == 0) throw UndefinedCorrelationError("pearson undefined: y is constant");
  Correlation c;
  c.n = static_cast<std::size_t>(x.size());
  c.r = std::clamp((xc * yc).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
  c.p_value = pearson_p_value(c.r, c.n);
  return c;
}

/// One historical issue seen three ways: what the API does, how the bug is
/// triggered, and how it is detected.
struct PilotTriplet {
  std::string issue_ref;
  Eigen::VectorXd v_func;
  Eigen::VectorXd v_context;
  Eigen::VectorXd v_oracle;
};

inline constexpr double kPilotBinWidth = 0.05;

struct PilotBin {
  int index = 0;        // floor(x / width)
  double bin_low = 0;   // index * width
  double mean_y = 0;
  std::size_t count = 0;
};

struct PilotResult {
  Eigen::VectorXd x;  // 0.5 cos(func) + 0.5 cos(context), one per ordered pair
  Eigen::VectorXd y;  // cos(oracle)
  std::vector<PilotBin> bins;  // ascending, non-empty bins only
  Correlation correlation;

  std::size_t pair_count() const { return static_cast<std::size_t>(x.size()); }
  Json summary_json() const;
};

/// Every ordered pair (i, j), i != j, of at least three triplets. Throws
/// UndefinedCorrelationError when x or y is constant.
PilotResult pilot_analysis(const std::vector<PilotTriplet>& triplets);

// Bin index of one x value; shared with tests so the rule lives in one place.
int pilot_bin_index(double x);

// pairs.csv ("x,y" header) and summary.json under `dir`.
void write_pilot_outputs(const std::filesystem::path& dir, const PilotResult& result);

}  // namespace pfuzz::matcher

#endif  // PFUZZ_MATCHER_PILOT_HPP_
