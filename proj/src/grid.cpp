#include "parex/grid.hpp"

#include <algorithm>
#include <cmath>

namespace parex {

TensorGrid TensorGrid::uniform(std::span<const double> lo, std::span<const double> hi,
                               std::span<const int> nodes) {
    if (lo.size() != hi.size() || lo.size() != nodes.size() || lo.empty())
        throw InputError("TensorGrid: inconsistent axis specs");
    TensorGrid g;
    for (size_t a = 0; a < lo.size(); ++a) {
        if (nodes[a] < 2) throw InputError("TensorGrid: need at least 2 nodes per axis");
        if (!(hi[a] > lo[a])) throw InputError("TensorGrid: hi must exceed lo");
        std::vector<double> axis(nodes[a]);
        double h = (hi[a] - lo[a]) / (nodes[a] - 1);
        for (int i = 0; i < nodes[a]; ++i) axis[i] = lo[a] + i * h;
        g.axes.push_back(std::move(axis));
    }
    return g;
}

std::vector<int> TensorGrid::shape() const {
    std::vector<int> s(axes.size());
    for (size_t a = 0; a < axes.size(); ++a) s[a] = static_cast<int>(axes[a].size());
    return s;
}

std::int64_t TensorGrid::size() const {
    std::int64_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::int64_t>(a.size());
    return n;
}

double TensorGrid::spacing(int axis) const {
    const auto& a = axes.at(axis);
    return (a.back() - a.front()) / (static_cast<int>(a.size()) - 1);
}

std::int64_t TensorGrid::stride(int axis) const {
    std::int64_t s = 1;
    for (int a = dim() - 1; a > axis; --a) s *= static_cast<std::int64_t>(axes[a].size());
    return s;
}

std::int64_t TensorGrid::flatten(std::span<const int> idx) const {
    std::int64_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * axes[a].size() + idx[a];
    return flat;
}

std::vector<int> TensorGrid::unflatten(std::int64_t flat) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
        auto n = static_cast<std::int64_t>(axes[a].size());
        idx[a] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

std::vector<double> TensorGrid::point(std::span<const int> idx) const {
    std::vector<double> p(dim());
    for (int a = 0; a < dim(); ++a) p[a] = axes[a][idx[a]];
    return p;
}

std::vector<double> TensorGrid::point(std::int64_t flat) const {
    return point(unflatten(flat));
}

void GridState::validate() const {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
        throw InputError("GridState: value array does not match grid shape");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError("GridState: non-finite value");
}

GridInterpolator::GridInterpolator(const TensorGrid& grid, std::span<const double> values,
                                   InterpOrder order)
    : grid_(grid), values_(values), points_(static_cast<int>(order) + 1) {
    if (static_cast<std::int64_t>(values.size()) != grid.size())
        throw InputError("GridInterpolator: value array does not match grid");
    for (const auto& a : grid.axes)
        if (static_cast<int>(a.size()) < points_)
            throw InputError("GridInterpolator: grid too small for stencil");
}

double GridInterpolator::operator()(std::span<const double> x) const {
    int n = grid_.dim();
    if (static_cast<int>(x.size()) != n)
        throw InputError("GridInterpolator: point dimension mismatch");

    // per-axis stencil start + Lagrange weights
    std::vector<int> start(n);
    std::vector<double> weights(static_cast<size_t>(n) * points_);
    for (int a = 0; a < n; ++a) {
        const auto& axis = grid_.axes[a];
        int count = static_cast<int>(axis.size());
        double xi = x[a];
        if (xi < axis.front() || xi > axis.back()) {
            ++clamps_;
            xi = std::clamp(xi, axis.front(), axis.back());
        }
        double h = grid_.spacing(a);
        int cell = static_cast<int>(std::floor((xi - axis.front()) / h));
        cell = std::clamp(cell, 0, count - 2);
        int s = std::clamp(cell - (points_ - 1) / 2, 0, count - points_);
        start[a] = s;
        for (int j = 0; j < points_; ++j) {
            double w = 1.0;
            for (int m = 0; m < points_; ++m) {
                if (m == j) continue;
                w *= (xi - axis[s + m]) / (axis[s + j] - axis[s + m]);
            }
            weights[a * points_ + j] = w;
        }
    }

    std::vector<int> offset(n, 0);
    std::vector<int> idx(n);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            idx[a] = start[a] + offset[a];
            w *= weights[a * points_ + offset[a]];
        }
        acc += w * values_[grid_.flatten(idx)];
        int axis = 0;
        while (axis < n) {
            if (++offset[axis] < points_) break;
            offset[axis] = 0;
            ++axis;
        }
        if (axis == n) break;
    }
    return acc;
}

namespace {

template <typename Stencil>
std::vector<double> apply_axis_stencil(const TensorGrid& grid, std::span<const double> values,
                                       int axis, Stencil&& stencil) {
    if (axis < 0 || axis >= grid.dim()) throw InputError("grid derivative: bad axis");
    std::int64_t total = grid.size();
    std::vector<double> out(total);
    int count = static_cast<int>(grid.axes[axis].size());
    std::int64_t stride = grid.stride(axis);
    auto at = [&](std::int64_t flat, int i, int shift) {
        int j = std::clamp(i + shift, 0, count - 1);
        return values[flat + static_cast<std::int64_t>(j - i) * stride];
    };
    for (std::int64_t flat = 0; flat < total; ++flat) {
        int i = static_cast<int>((flat / stride) % count);
        out[flat] = stencil(at, flat, i);
    }
    return out;
}

} // namespace

std::vector<double> grid_partial(const TensorGrid& grid, std::span<const double> values,
                                 int axis) {
    double h = grid.spacing(axis);
    return apply_axis_stencil(
        grid, values, axis, [h](auto&& at, std::int64_t flat, int i) {
            return (-at(flat, i, 2) + 8.0 * at(flat, i, 1) - 8.0 * at(flat, i, -1) +
                    at(flat, i, -2)) /
                   (12.0 * h);
        });
}

std::vector<double> grid_second_partial(const TensorGrid& grid,
                                        std::span<const double> values, int axis) {
    double h = grid.spacing(axis);
    return apply_axis_stencil(
        grid, values, axis, [h](auto&& at, std::int64_t flat, int i) {
            return (-at(flat, i, 2) + 16.0 * at(flat, i, 1) - 30.0 * at(flat, i, 0) +
                    16.0 * at(flat, i, -1) - at(flat, i, -2)) /
                   (12.0 * h * h);
        });
}

} // namespace parex
