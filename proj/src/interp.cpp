#include "dfnsim/interp.hpp"

#include "dfnsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfn {

namespace {

std::size_t find_segment(std::span<const double> xs, double x) {
    if (!(x >= xs.front() && x <= xs.back())) {
        std::ostringstream msg;
        msg << "interpolation argument " << x << " outside sampled range [" << xs.front() << ", "
            << xs.back() << "]";
        throw DomainError(msg.str());
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i > 0) --i;
    if (i >= xs.size() - 1) i = xs.size() - 2;
    return i;
}

} // namespace

double linear_interp(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.size() < 2 || xs.size() != ys.size()) throw DomainError("linear_interp: need >= 2 samples");
    const std::size_t i = find_segment(xs, x);
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need >= 2 samples");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) throw DomainError("MonotoneCubic: abscissae must be strictly increasing");
        if (!std::isfinite(y_[i]) || !std::isfinite(y_[i + 1]))
            throw DomainError("MonotoneCubic: non-finite ordinate");
    }

    // Fritsch-Carlson node slopes.
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
    } else {
        d_[0] = delta[0];
        d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                // weighted harmonic mean of adjacent secants
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // limit endpoint slopes to keep the end segments monotone
        auto limit_end = [](double d_end, double del) {
            if (d_end * del <= 0.0) return 0.0;
            if (std::abs(d_end) > 3.0 * std::abs(del)) return 3.0 * del;
            return d_end;
        };
        d_[0] = limit_end(((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]), delta[0]);
        d_[n - 1] = limit_end(
            ((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3]) / (h[n - 2] + h[n - 3]),
            delta[n - 2]);
    }
}

std::size_t MonotoneCubic::segment(double x) const { return find_segment(x_, x); }

double MonotoneCubic::eval(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneCubic::deriv(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s;
    const double dh00 = (6 * s2 - 6 * s) / h;
    const double dh10 = 3 * s2 - 4 * s + 1;
    const double dh01 = (-6 * s2 + 6 * s) / h;
    const double dh11 = 3 * s2 - 2 * s;
    return dh00 * y_[i] + dh10 * d_[i] + dh01 * y_[i + 1] + dh11 * d_[i + 1];
}

} // namespace dfn
