#pragma once

#include <cloudscope/error.hpp>

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <string_view>

namespace cloudscope {

/// Row-major 2D grid; row index is y, column index is x.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FieldKind { gray_image, weight_field, normalized_weight, simulated };

inline std::string_view to_string(FieldKind kind) {
  switch (kind) {
  case FieldKind::gray_image: return "gray_image";
  case FieldKind::weight_field: return "weight_field";
  case FieldKind::normalized_weight: return "normalized_weight";
  case FieldKind::simulated: return "simulated";
  }
  return "unknown";
}

/// A 2D grid of real values together with its physical pixel size in µm.
///
/// Immutable after construction. The constructor enforces the geometric
/// invariants (at least 2x2, positive pixel size, finite values) and, for gray
/// images, non-negativity. The moment invariant of normalized weights is the
/// responsibility of the producing function (normalize_relative_weight).
template <typename Scalar>
class BasicScalarField {
public:
  using GridType = Grid<Scalar>;

  BasicScalarField(GridType values, Scalar pixel_size, FieldKind kind)
      : values_(std::move(values)), pixel_size_(pixel_size), kind_(kind) {
    if (values_.rows() < 2 || values_.cols() < 2)
      throw DataError("field must be at least 2x2 pixels, got " + std::to_string(values_.cols()) +
                      "x" + std::to_string(values_.rows()));
    if (!(pixel_size_ > 0) || !std::isfinite(pixel_size_))
      throw UsageError("pixel size must be positive");
    if (!values_.allFinite())
      throw DataError("field contains non-finite values");
    if (kind_ == FieldKind::gray_image && (values_ < Scalar(0)).any())
      throw DataError("gray image contains negative values");
  }

  Eigen::Index width() const { return values_.cols(); }
  Eigen::Index height() const { return values_.rows(); }
  Eigen::Index size() const { return values_.size(); }
  Scalar pixel_size() const { return pixel_size_; }
  FieldKind kind() const { return kind_; }
  const GridType& values() const { return values_; }

  Scalar operator()(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }

  /// Same values, different kind tag (re-validated).
  BasicScalarField with_kind(FieldKind kind) const { return {values_, pixel_size_, kind}; }

  /// Same geometry, new values.
  template <typename Derived>
  BasicScalarField with_values(const Eigen::ArrayBase<Derived>& values, FieldKind kind) const {
    return {GridType(values), pixel_size_, kind};
  }

  bool same_geometry(const BasicScalarField& other) const {
    return width() == other.width() && height() == other.height() &&
           pixel_size_ == other.pixel_size_;
  }

private:
  GridType values_;
  Scalar pixel_size_;
  FieldKind kind_;
};

using ScalarField = BasicScalarField<double>;

} // namespace cloudscope
