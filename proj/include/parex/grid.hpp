#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parex/errors.hpp"

namespace parex {

/// Tensor product of uniformly spaced per-axis node vectors, row-major
/// flattening with the last axis fastest.
struct TensorGrid {
    std::vector<std::vector<double>> axes;

    static TensorGrid uniform(std::span<const double> lo, std::span<const double> hi,
                              std::span<const int> nodes);

    int dim() const { return static_cast<int>(axes.size()); }
    std::vector<int> shape() const;
    std::int64_t size() const;
    double spacing(int axis) const;
    std::int64_t stride(int axis) const;
    std::int64_t flatten(std::span<const int> idx) const;
    std::vector<int> unflatten(std::int64_t flat) const;
    std::vector<double> point(std::span<const int> idx) const;
    std::vector<double> point(std::int64_t flat) const;
};

struct GridState {
    TensorGrid grid;
    std::vector<double> values;
    double time = 0.0;

    void validate() const;
};

enum class InterpOrder : int { cubic = 3, quintic = 5 };

/// Tensor Lagrange interpolation with clamped stencils. Queries outside
/// the grid are clamped to the boundary (constant extension) and counted.
class GridInterpolator {
public:
    GridInterpolator(const TensorGrid& grid, std::span<const double> values,
                     InterpOrder order);

    double operator()(std::span<const double> x) const;
    std::int64_t clamp_count() const { return clamps_; }

private:
    const TensorGrid& grid_;
    std::span<const double> values_;
    int points_;  ///< stencil points per axis
    mutable std::int64_t clamps_ = 0;
};

/// 4th-order centered first derivative along one axis; boundary neighbors
/// use constant extension (clamped indices).
std::vector<double> grid_partial(const TensorGrid& grid, std::span<const double> values,
                                 int axis);

/// 4th-order centered second derivative along one axis, same boundary rule.
std::vector<double> grid_second_partial(const TensorGrid& grid,
                                        std::span<const double> values, int axis);

} // namespace parex
