#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qkin::detail {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes/weights by Newton iteration on P_n (standard Golub-free construction).
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

// Integrate f over [a, b] with n_panels panels of a fixed Gauss-Legendre rule.
template <typename F>
double panel_integrate(F&& f, double a, double b, int n_panels,
                       const GaussLegendreRule& rule) {
    double sum = 0.0;
    const double h = (b - a) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double local = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            local += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        sum += 0.5 * h * local;
    }
    return sum;
}

}  // namespace qkin::detail
