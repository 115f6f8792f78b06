#pragma once

// Multi-criteria decision mathematics used by the MCDM scheduling strategies:
// matrix validation, Shannon-entropy criterion weighting and the EDAS, ARAS
// and MABAC scoring methods. Everything here is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowd/error.hpp"

namespace crowd::decision {

enum class CriterionDirection { Benefit, Cost };

struct Criterion {
  std::string name;
  CriterionDirection direction = CriterionDirection::Benefit;

  bool operator==(const Criterion&) const = default;
};

/// Alternatives (rows) scored against criteria (columns). Every entry is a
/// strictly positive finite real; the constructor rejects anything else.
class DecisionMatrix {
 public:
  DecisionMatrix(std::vector<std::string> alternative_ids, std::vector<Criterion> criteria,
                 std::vector<double> row_major_values)
      : ids_(std::move(alternative_ids)),
        criteria_(std::move(criteria)),
        values_(std::move(row_major_values)) {
    if (ids_.empty()) fail(ErrorCode::InvalidMatrix, "decision matrix needs at least one alternative");
    if (criteria_.empty()) fail(ErrorCode::InvalidMatrix, "decision matrix needs at least one criterion");
    if (values_.size() != ids_.size() * criteria_.size()) {
      fail(ErrorCode::InvalidMatrix, "value count " + std::to_string(values_.size()) + " does not match " +
                                         std::to_string(ids_.size()) + "x" + std::to_string(criteria_.size()));
    }
    if (std::set<std::string>(ids_.begin(), ids_.end()).size() != ids_.size()) {
      fail(ErrorCode::InvalidMatrix, "alternative ids must be unique");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const double v = values_[k];
      if (!std::isfinite(v) || v <= 0.0) {
        fail(ErrorCode::InvalidMatrix, "entry (" + std::to_string(k / cols()) + "," + std::to_string(k % cols()) +
                                           ") must be positive and finite");
      }
    }
  }

  DecisionMatrix(std::vector<std::string> alternative_ids, std::vector<Criterion> criteria,
                 const std::vector<std::vector<double>>& rows)
      : DecisionMatrix(std::move(alternative_ids), std::move(criteria), flatten(rows)) {}

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return criteria_.size(); }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

  const std::vector<std::string>& alternative_ids() const noexcept { return ids_; }
  const std::vector<Criterion>& criteria() const noexcept { return criteria_; }
  bool is_benefit(std::size_t j) const { return criteria_[j].direction == CriterionDirection::Benefit; }

  double column_min(std::size_t j) const {
    double lo = at(0, j);
    for (std::size_t i = 1; i < rows(); ++i) lo = std::min(lo, at(i, j));
    return lo;
  }
  double column_max(std::size_t j) const {
    double hi = at(0, j);
    for (std::size_t i = 1; i < rows(); ++i) hi = std::max(hi, at(i, j));
    return hi;
  }
  bool column_constant(std::size_t j) const { return column_min(j) == column_max(j); }

 private:
  static std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> out;
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != width) fail(ErrorCode::InvalidMatrix, "ragged decision matrix rows");
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::vector<std::string> ids_;
  std::vector<Criterion> criteria_;
  std::vector<double> values_;
};

/// Non-negative criterion weights summing to one.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) fail(ErrorCode::InvalidInput, "weight vector is empty");
    double sum = 0.0;
    for (double x : w_) {
      if (!std::isfinite(x) || x < 0.0) fail(ErrorCode::InvalidInput, "weights must be finite and non-negative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      fail(ErrorCode::InvalidInput, "weights must sum to 1 (got " + std::to_string(sum) + ")");
    }
  }

  /// Scales arbitrary non-negative values so they sum to one.
  static WeightVector normalized(std::vector<double> raw) {
    const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(sum > 0.0)) fail(ErrorCode::InvalidInput, "cannot normalize a zero weight vector");
    for (double& x : raw) x /= sum;
    return WeightVector(std::move(raw));
  }

  static WeightVector uniform(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0 / double(n))); }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  const std::vector<double>& values() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

struct Ranking {
  std::map<std::string, double> scores;
  /// Alternative ids by descending score; equal scores fall back to ascending id.
  std::vector<std::string> order;

  const std::string& best() const { return order.front(); }
  double score(const std::string& id) const { return scores.at(id); }
};

inline Ranking make_ranking(const std::vector<std::string>& ids, const std::vector<double>& scores) {
  Ranking r;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!std::isfinite(scores[i])) fail(ErrorCode::InvalidInput, "non-finite score for " + ids[i]);
    r.scores.emplace(ids[i], scores[i]);
  }
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  r.order.reserve(ids.size());
  for (std::size_t i : idx) r.order.push_back(ids[i]);
  return r;
}

/// Shannon entropy weights. A constant column carries no information and gets
/// weight zero; when every column is constant the weights fall back to uniform.
inline WeightVector entropy_weights(const DecisionMatrix& matrix) {
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();
  if (m < 2) fail(ErrorCode::DegenerateMatrix, "entropy weighting needs at least two alternatives");

  const double inv_log_m = 1.0 / std::log(double(m));
  std::vector<double> divergence(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (matrix.column_constant(j)) continue;
    double col_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) col_sum += matrix.at(i, j);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double p = matrix.at(i, j) / col_sum;
      acc += p * std::log(p);
    }
    const double entropy = -inv_log_m * acc;
    divergence[j] = std::max(0.0, 1.0 - entropy);
  }

  const double total = std::accumulate(divergence.begin(), divergence.end(), 0.0);
  if (total <= 0.0) return WeightVector::uniform(n);
  for (double& d : divergence) d /= total;
  return WeightVector(std::move(divergence));
}

namespace detail {
inline void check_dimensions(const DecisionMatrix& matrix, const WeightVector& weights) {
  if (weights.size() != matrix.cols()) {
    fail(ErrorCode::InvalidInput, "weight count " + std::to_string(weights.size()) + " != criteria count " +
                                      std::to_string(matrix.cols()));
  }
}
}  // namespace detail

/// EDAS: distances from the per-criterion average solution. Scores lie in [0,1].
inline Ranking edas_scores(const DecisionMatrix& matrix, const WeightVector& weights) {
  detail::check_dimensions(matrix, weights);
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();

  std::vector<double> sp(m, 0.0), sn(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double avg = 0.0;
    for (std::size_t i = 0; i < m; ++i) avg += matrix.at(i, j);
    avg /= double(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double above = matrix.at(i, j) - avg;
      const double pda = (matrix.is_benefit(j) ? std::max(0.0, above) : std::max(0.0, -above)) / avg;
      const double nda = (matrix.is_benefit(j) ? std::max(0.0, -above) : std::max(0.0, above)) / avg;
      sp[i] += weights[j] * pda;
      sn[i] += weights[j] * nda;
    }
  }

  const double max_sp = *std::max_element(sp.begin(), sp.end());
  const double max_sn = *std::max_element(sn.begin(), sn.end());
  std::vector<double> appraisal(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double nsp = max_sp > 0.0 ? sp[i] / max_sp : 1.0;
    const double nsn = max_sn > 0.0 ? 1.0 - sn[i] / max_sn : 1.0;
    appraisal[i] = 0.5 * (nsp + nsn);
  }
  return make_ranking(matrix.alternative_ids(), appraisal);
}

/// ARAS: utility relative to an appended optimal alternative. Scores lie in (0,1].
inline Ranking aras_scores(const DecisionMatrix& matrix, const WeightVector& weights) {
  detail::check_dimensions(matrix, weights);
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();

  // Row 0 of `s` is the optimal alternative, rows 1..m the real ones.
  std::vector<double> s(m + 1, 0.0);
  std::vector<double> col(m + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const bool benefit = matrix.is_benefit(j);
    col[0] = benefit ? matrix.column_max(j) : 1.0 / matrix.column_min(j);
    for (std::size_t i = 0; i < m; ++i) col[i + 1] = benefit ? matrix.at(i, j) : 1.0 / matrix.at(i, j);
    const double sum = std::accumulate(col.begin(), col.end(), 0.0);
    for (std::size_t i = 0; i <= m; ++i) s[i] += weights[j] * (col[i] / sum);
  }

  std::vector<double> utility(m);
  for (std::size_t i = 0; i < m; ++i) utility[i] = s[i + 1] / s[0];
  return make_ranking(matrix.alternative_ids(), utility);
}

/// MABAC: signed distance from the geometric-mean border approximation area.
/// Scores can be negative.
inline Ranking mabac_scores(const DecisionMatrix& matrix, const WeightVector& weights) {
  detail::check_dimensions(matrix, weights);
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();

  std::vector<double> score(m, 0.0);
  std::vector<double> v(m);
  for (std::size_t j = 0; j < n; ++j) {
    // Every alternative sits on the border for a constant or weightless column.
    if (matrix.column_constant(j) || weights[j] == 0.0) continue;
    const double lo = matrix.column_min(j);
    const double hi = matrix.column_max(j);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = matrix.at(i, j);
      const double normalized = matrix.is_benefit(j) ? (x - lo) / (hi - lo) : (x - hi) / (lo - hi);
      v[i] = weights[j] * (normalized + 1.0);
      log_sum += std::log(v[i]);
    }
    const double border = std::exp(log_sum / double(m));
    for (std::size_t i = 0; i < m; ++i) score[i] += v[i] - border;
  }
  return make_ranking(matrix.alternative_ids(), score);
}

enum class Method { Edas, Aras, Mabac };

inline Ranking score(Method method, const DecisionMatrix& matrix, const WeightVector& weights) {
  switch (method) {
    case Method::Edas: return edas_scores(matrix, weights);
    case Method::Aras: return aras_scores(matrix, weights);
    case Method::Mabac: return mabac_scores(matrix, weights);
  }
  fail(ErrorCode::InvalidInput, "unknown MCDM method");
}

}  // namespace crowd::decision
