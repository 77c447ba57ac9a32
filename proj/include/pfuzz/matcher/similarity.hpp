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

#ifndef PFUZZ_MATCHER_SIMILARITY_HPP_
#define PFUZZ_MATCHER_SIMILARITY_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::matcher {

/// Cosine of the angle between two vectors, clamped to [-1, 1].
/// Throws InvariantError on a dimension mismatch or an all-zero input.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                                            const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw InvariantError("cosine of vectors with different dimensions");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw InvariantError("cosine of a zero vector");
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// Embeddings of one model, one row per API, rows ordered by name.
template <typename Scalar>
class EmbeddingDb {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  EmbeddingDb() = default;

  /// Throws InvariantError on repeated names, mixed dimensions or a zero row.
  EmbeddingDb(std::string model_id, std::vector<std::pair<std::string, Vector>> rows)
      : model_id_(std::move(model_id)) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const Eigen::Index dim = rows.empty() ? 0 : rows.front().second.size();
    matrix_.resize(static_cast<Eigen::Index>(rows.size()), dim);
    norms_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].first == names_.back())
        throw InvariantError("duplicate embedding for " + rows[i].first);
      if (rows[i].second.size() != dim)
        throw InvariantError("embedding for " + rows[i].first + " has the wrong dimension");
      const auto r = static_cast<Eigen::Index>(i);
      matrix_.row(r) = rows[i].second.transpose();
      norms_(r) = rows[i].second.norm();
      if (norms_(r) == Scalar(0)) throw InvariantError("zero embedding for " + rows[i].first);
      names_.push_back(std::move(rows[i].first));
    }
  }

  const std::string& model_id() const { return model_id_; }
  Eigen::Index size() const { return matrix_.rows(); }
  Eigen::Index dim() const { return matrix_.cols(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }
  const Matrix& matrix() const { return matrix_; }

  // Row index or -1.
  Eigen::Index index_of(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    return it != names_.end() && *it == name ? static_cast<Eigen::Index>(it - names_.begin())
                                             : Eigen::Index(-1);
  }
  bool contains(const std::string& name) const { return index_of(name) >= 0; }
  Vector vector(const std::string& name) const {
    Eigen::Index i = index_of(name);
    if (i < 0) throw InvariantError("no embedding for " + name);
    return matrix_.row(i).transpose();
  }

  /// Cosine of `anchor` against every row, clamped to [-1, 1].
  template <typename Derived>
  Vector cosines(const Eigen::MatrixBase<Derived>& anchor) const {
    if (anchor.size() != dim()) throw InvariantError("anchor dimension does not match the db");
    const Scalar na = anchor.norm();
    if (na == Scalar(0)) throw InvariantError("cosine of a zero vector");
    Vector c = (matrix_ * anchor).cwiseQuotient(norms_ * na);
    return c.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
  }

  // embeddings.jsonl: {qualified_name, model_id, values} per line.
  void save(const std::filesystem::path& path) const {
    std::vector<Json> docs;
    for (Eigen::Index i = 0; i < size(); ++i) {
      std::vector<Scalar> values(matrix_.row(i).begin(), matrix_.row(i).end());
      docs.push_back({{"qualified_name", names_[static_cast<std::size_t>(i)]},
                      {"model_id", model_id_},
                      {"values", values}});
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_jsonl(path, docs);
  }

  static EmbeddingDb load(const std::filesystem::path& path) {
    std::string model;
    std::vector<std::pair<std::string, Vector>> rows;
    for (const auto& doc : read_jsonl(path)) {
      std::string m = require_string(doc, "model_id");
      if (!model.empty() && m != model)
        throw InvariantError("embeddings from two models in " + path.string());
      model = m;
      std::vector<Scalar> values;
      try {
        values = require_field(doc, "values").get<std::vector<Scalar>>();
      } catch (const Json::exception&) {
        throw ParseError("field 'values' must be a number array");
      }
      rows.emplace_back(require_string(doc, "qualified_name"),
                        Eigen::Map<const Vector>(values.data(),
                                                 static_cast<Eigen::Index>(values.size())));
    }
    return EmbeddingDb(model, std::move(rows));
  }

 private:
  std::string model_id_;
  std::vector<std::string> names_;
  Matrix matrix_;
  Vector norms_;
};

struct QueueEntry {
  std::string api;
  double score = 0;
  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

struct SimilarApiQueue {
  std::string anchor_api;
  std::size_t capacity = 0;
  std::vector<QueueEntry> entries;  // score descending, then name ascending
  friend bool operator==(const SimilarApiQueue&, const SimilarApiQueue&) = default;
};

inline constexpr std::size_t kDefaultQueueDepth = 1000;

/// Top-`k` rows of `db` by cosine to `anchor`; equal scores are ordered by
/// name so the queue is a total, reproducible order.
template <typename Scalar, typename Derived>
SimilarApiQueue similar_queue(const std::string& anchor_api,
                              const Eigen::MatrixBase<Derived>& anchor,
                              const EmbeddingDb<Scalar>& db, std::size_t k) {
  if (k < 1) throw InvariantError("queue capacity must be at least 1");
  SimilarApiQueue q{anchor_api, k, {}};
  if (db.empty()) return q;
  const auto scores = db.cosines(anchor);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(db.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  const std::size_t n = std::min(k, order.size());
  // Rows are already sorted by name, so index order breaks ties.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      return scores(a) != scores(b) ? scores(a) > scores(b) : a < b;
                    });
  for (std::size_t i = 0; i < n; ++i)
    q.entries.push_back({db.names()[static_cast<std::size_t>(order[i])],
                         static_cast<double>(scores(order[i]))});
  return q;
}

}  // namespace pfuzz::matcher

#endif  // PFUZZ_MATCHER_SIMILARITY_HPP_
