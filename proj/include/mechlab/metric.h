// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_METRIC_H_
#define MECHLAB_METRIC_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mechlab {

// Index into a metric's point set. Agents and facilities share points.
struct PointId {
  std::size_t index = 0;

  friend auto operator<=>(const PointId&, const PointId&) = default;
};

// Matrix metrics come from user files and may carry rounding; line metrics
// are checked exactly.
inline constexpr double kMatrixTolerance = 1e-12;

enum class MetricAxiom {
  kFinite,
  kNonNegative,
  kIdentity,
  kSymmetry,
  kTriangle,
};

struct MetricViolation {
  MetricAxiom axiom;
  // Witness: (i, j) for the pointwise axioms, (i, j, k) for the triangle
  // inequality d(i, j) <= d(i, k) + d(k, j).
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  std::string Describe() const;
};

class Metric {
 public:
  struct Line {
    std::vector<double> coords;
    friend bool operator==(const Line&, const Line&) = default;
  };
  struct Matrix {
    std::vector<std::vector<double>> d;
    friend bool operator==(const Matrix&, const Matrix&) = default;
  };

  static Metric FromLine(std::vector<double> coords);
  // Throws kSchema when the array is not square.
  static Metric FromMatrix(std::vector<std::vector<double>> d);

  std::size_t size() const;
  bool is_line() const { return std::holds_alternative<Line>(repr_); }
  const Line& line() const { return std::get<Line>(repr_); }
  const Matrix& matrix() const { return std::get<Matrix>(repr_); }

  // Throws kInvalidPoint for out-of-range ids.
  double distance(PointId a, PointId b) const;

  // Hot-loop variant without range checks.
  double distance_unchecked(std::size_t a, std::size_t b) const {
    if (const auto* l = std::get_if<Line>(&repr_)) {
      const double diff = l->coords[a] - l->coords[b];
      return diff < 0 ? -diff : diff;
    }
    return std::get<Matrix>(repr_).d[a][b];
  }

  void CheckPoint(PointId p) const;

  friend bool operator==(const Metric&, const Metric&) = default;

 private:
  explicit Metric(std::variant<Line, Matrix> repr) : repr_(std::move(repr)) {}

  std::variant<Line, Matrix> repr_;
};

// First violated axiom with its witness, or nullopt for a metric.
std::optional<MetricViolation> Validate(const Metric& m);

// Appends a point whose distances equal those of `at`.
std::pair<Metric, PointId> ExtendWithCoincidingPoint(const Metric& m,
                                                     PointId at);

}  // namespace mechlab

#endif  // MECHLAB_METRIC_H_
