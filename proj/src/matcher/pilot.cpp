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

#include "pfuzz/matcher/pilot.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cstdio>
#include <map>

#include "pfuzz/common/text.hpp"
#include "pfuzz/matcher/similarity.hpp"

namespace pfuzz::matcher {

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw InvariantError("p-value needs at least 3 samples");
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

int pilot_bin_index(double x) {
  // Multiplying by 20 instead of dividing by 0.05 keeps exact multiples of
  // the width (0.15, 0.35, ...) in their own bin.
  return static_cast<int>(std::floor(x * 20.0));
}

PilotResult pilot_analysis(const std::vector<PilotTriplet>& triplets) {
  const std::size_t n = triplets.size();
  if (n < 3) throw InvariantError("pilot analysis needs at least 3 triplets");
  PilotResult res;
  const auto pairs = static_cast<Eigen::Index>(n * (n - 1));
  res.x.resize(pairs);
  res.y.resize(pairs);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& a = triplets[i];
      const auto& b = triplets[j];
      res.x(k) = 0.5 * cosine_similarity(a.v_func, b.v_func) +
                 0.5 * cosine_similarity(a.v_context, b.v_context);
      res.y(k) = cosine_similarity(a.v_oracle, b.v_oracle);
      ++k;
    }
  }

  std::map<int, std::pair<double, std::size_t>> acc;
  for (Eigen::Index p = 0; p < pairs; ++p) {
    auto& slot = acc[pilot_bin_index(res.x(p))];
    slot.first += res.y(p);
    ++slot.second;
  }
  for (const auto& [idx, sum_count] : acc)
    res.bins.push_back({idx, idx / 20.0, sum_count.first / static_cast<double>(sum_count.second),
                        sum_count.second});

  res.correlation = pearson(res.x, res.y);
  return res;
}

Json PilotResult::summary_json() const {
  Json bins_json = Json::array();
  for (const auto& b : bins)
    bins_json.push_back({{"bin_low", b.bin_low},
                         {"bin_high", (b.index + 1) / 20.0},
                         {"mean_y", b.mean_y},
                         {"count", b.count}});
  return {{"pairs", pair_count()},
          {"pearson_r", correlation.r},
          {"p_value", correlation.p_value},
          {"bin_width", kPilotBinWidth},
          {"bins", bins_json}};
}

void write_pilot_outputs(const std::filesystem::path& dir, const PilotResult& result) {
  std::filesystem::create_directories(dir);
  std::string csv = "x,y\n";
  char line[64];
  for (Eigen::Index i = 0; i < result.x.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", result.x(i), result.y(i));
    csv += line;
  }
  write_file_atomic(dir / "pairs.csv", csv);
  write_file_atomic(dir / "summary.json", result.summary_json().dump(2) + "\n");
}

}  // namespace pfuzz::matcher
