#pragma once

#include <stdexcept>
#include <vector>

namespace qkin::detail {

// Fornberg finite-difference weights: given stencil offsets x (distinct,
// containing or surrounding the evaluation point z), returns weights w such
// that sum_j w[j] f(x[j]) approximates the m-th derivative of f at z.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size()) - 1;
    if (n < m) throw std::invalid_argument("fd_weights: stencil too small for order");
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) w[j] = c[j][m];
    return w;
}

}  // namespace qkin::detail
