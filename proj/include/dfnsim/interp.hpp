#pragma once

#include <span>
#include <vector>

namespace dfn {

// Piecewise-linear interpolation on a strictly increasing grid.
// Out-of-range x throws DomainError.
double linear_interp(std::span<const double> xs, std::span<const double> ys, double x);

// Monotonicity-preserving piecewise-cubic Hermite interpolant
// (Fritsch-Carlson slope limiting). Continuous with continuous first
// derivative inside the sampled range; evaluation outside it throws.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double eval(double x) const;
    double deriv(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, d_; // nodes, values, node slopes
};

} // namespace dfn
