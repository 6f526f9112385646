#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace lamegap {

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double rms_residual = 0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ymean) * (y[i] - ymean);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    f.rms_residual = std::sqrt(ss_res / n);
    return f;
}

/// Log-log slope of y against x (both positive).
inline LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::abs(y[i]));
    }
    return linear_fit(lx, ly);
}

}  // namespace lamegap
