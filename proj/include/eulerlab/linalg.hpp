#pragma once

#include <vector>

namespace eulerlab {

// Least-squares solution of min ||A x - b|| for a dense row-major m x k
// matrix (m >= k) via Householder QR. Throws on rank deficiency.
std::vector<double> least_squares(std::vector<double> a_rowmajor, int m, int k,
                                  std::vector<double> b);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 1.0;   // 1 for an exactly constant response
    double max_abs_residual = 0.0;
};

// Simple regression y ~ intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace eulerlab
