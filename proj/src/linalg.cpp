#include "eulerlab/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace eulerlab {

std::vector<double> least_squares(std::vector<double> a, int m, int k, std::vector<double> b) {
    if (m < k || k < 1) throw std::invalid_argument("least_squares: need m >= k >= 1");
    if (static_cast<int>(a.size()) != m * k || static_cast<int>(b.size()) != m)
        throw std::invalid_argument("least_squares: inconsistent dimensions");

    for (int col = 0; col < k; ++col) {
        double norm = 0.0;
        for (int i = col; i < m; ++i) norm += a[i * k + col] * a[i * k + col];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("least_squares: rank-deficient basis");

        const double head = a[col * k + col];
        const double alpha = head >= 0.0 ? -norm : norm;
        std::vector<double> v(m - col);
        v[0] = head - alpha;
        for (int i = col + 1; i < m; ++i) v[i - col] = a[i * k + col];
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv == 0.0) continue;

        for (int col2 = col; col2 < k; ++col2) {
            double dot = 0.0;
            for (int i = col; i < m; ++i) dot += v[i - col] * a[i * k + col2];
            const double f = 2.0 * dot / vtv;
            for (int i = col; i < m; ++i) a[i * k + col2] -= f * v[i - col];
        }
        double dot = 0.0;
        for (int i = col; i < m; ++i) dot += v[i - col] * b[i];
        const double f = 2.0 * dot / vtv;
        for (int i = col; i < m; ++i) b[i] -= f * v[i - col];
    }

    std::vector<double> x(k);
    for (int i = k - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < k; ++j) s -= a[i * k + j] * x[j];
        const double d = a[i * k + i];
        if (d == 0.0) throw std::runtime_error("least_squares: rank-deficient basis");
        x[i] = s / d;
    }
    return x;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || y.size() != x.size()) throw std::invalid_argument("fit_line: need >= 2 points");

    std::vector<double> a(static_cast<size_t>(n) * 2);
    for (int i = 0; i < n; ++i) {
        a[2 * i] = 1.0;
        a[2 * i + 1] = x[i];
    }
    const std::vector<double> coef = least_squares(std::move(a), n, 2, y);

    LineFit fit;
    fit.intercept = coef[0];
    fit.slope = coef[1];

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

}  // namespace eulerlab
