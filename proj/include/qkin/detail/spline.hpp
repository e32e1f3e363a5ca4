#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qkin::detail {

// Natural cubic spline through (x_i, y_i), x strictly increasing.
// Queries outside [x_front, x_back] throw std::out_of_range.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("CubicSpline: need >= 2 matching nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("CubicSpline: x must be strictly increasing");

        // Second derivatives from the natural-spline tridiagonal system.
        m_.assign(n, 0.0);
        if (n > 2) {
            std::vector<double> diag(n - 2), rhs(n - 2), sub(n - 2), sup(n - 2);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double h0 = x_[i] - x_[i - 1];
                const double h1 = x_[i + 1] - x_[i];
                sub[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            }
            for (std::size_t i = 1; i < n - 2; ++i) {
                const double w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m_[n - 2] = rhs[n - 3] / diag[n - 3];
            for (std::size_t i = n - 3; i >= 1; --i) {
                m_[i] = (rhs[i - 1] - sup[i - 1] * m_[i + 1]) / diag[i - 1];
                if (i == 1) break;
            }
        }
    }

    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double eval(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    double deriv(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - x) / h;
        const double b = (x - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }

  private:
    std::size_t locate(double x) const {
        if (x < x_.front() || x > x_.back())
            throw std::out_of_range("CubicSpline: query outside table range");
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace qkin::detail
