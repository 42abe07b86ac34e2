// SPDX-License-Identifier: Apache-2.0

#include "mechlab/metric.h"

#include <cmath>
#include <sstream>

#include "mechlab/error.h"

namespace mechlab {

std::string MetricViolation::Describe() const {
  std::ostringstream out;
  switch (axiom) {
    case MetricAxiom::kFinite:
      out << "non-finite entry at (" << i << "," << j << ")";
      break;
    case MetricAxiom::kNonNegative:
      out << "negative distance at (" << i << "," << j << ")";
      break;
    case MetricAxiom::kIdentity:
      out << "nonzero self-distance at (" << i << "," << i << ")";
      break;
    case MetricAxiom::kSymmetry:
      out << "asymmetry at (" << i << "," << j << ")";
      break;
    case MetricAxiom::kTriangle:
      out << "triangle inequality violated: d(" << i << "," << j << ") > d("
          << i << "," << k << ") + d(" << k << "," << j << ")";
      break;
  }
  return out.str();
}

Metric Metric::FromLine(std::vector<double> coords) {
  return Metric(Line{std::move(coords)});
}

Metric Metric::FromMatrix(std::vector<std::vector<double>> d) {
  for (const auto& row : d) {
    if (row.size() != d.size()) {
      throw Error(ErrorCode::kSchema, "distance matrix is not square");
    }
  }
  return Metric(Matrix{std::move(d)});
}

std::size_t Metric::size() const {
  if (const auto* l = std::get_if<Line>(&repr_)) return l->coords.size();
  return std::get<Matrix>(repr_).d.size();
}

void Metric::CheckPoint(PointId p) const {
  if (p.index >= size()) {
    throw Error(ErrorCode::kInvalidPoint,
                "point " + std::to_string(p.index) + " out of range (" +
                    std::to_string(size()) + " points)");
  }
}

double Metric::distance(PointId a, PointId b) const {
  CheckPoint(a);
  CheckPoint(b);
  return distance_unchecked(a.index, b.index);
}

std::optional<MetricViolation> Validate(const Metric& m) {
  if (m.is_line()) {
    const auto& c = m.line().coords;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!std::isfinite(c[i])) {
        return MetricViolation{MetricAxiom::kFinite, i, i, 0};
      }
    }
    return std::nullopt;
  }
  const auto& d = m.matrix().d;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j])) {
        return MetricViolation{MetricAxiom::kFinite, i, j, 0};
      }
      if (d[i][j] < 0) return MetricViolation{MetricAxiom::kNonNegative, i, j, 0};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i][i] != 0) return MetricViolation{MetricAxiom::kIdentity, i, i, 0};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d[i][j] - d[j][i]) > kMatrixTolerance) {
        return MetricViolation{MetricAxiom::kSymmetry, i, j, 0};
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (d[i][j] > d[i][k] + d[k][j] + kMatrixTolerance) {
          return MetricViolation{MetricAxiom::kTriangle, i, j, k};
        }
      }
    }
  }
  return std::nullopt;
}

std::pair<Metric, PointId> ExtendWithCoincidingPoint(const Metric& m,
                                                     PointId at) {
  m.CheckPoint(at);
  const PointId fresh{m.size()};
  if (m.is_line()) {
    auto coords = m.line().coords;
    coords.push_back(coords[at.index]);
    return {Metric::FromLine(std::move(coords)), fresh};
  }
  auto d = m.matrix().d;
  for (std::size_t i = 0; i < d.size(); ++i) d[i].push_back(d[i][at.index]);
  auto row = d[at.index];
  row.back() = 0.0;
  d.push_back(std::move(row));
  return {Metric::FromMatrix(std::move(d)), fresh};
}

}  // namespace mechlab
