#include "rotorlab/common.hpp"

namespace rotorlab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw FitError("fit_line: need at least two matching samples");
    const std::size_t n = x.size();
    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    KahanSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (sxx.value() <= 0.0) throw FitError("fit_line: degenerate abscissa");
    LineFit f;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        rss += r * r;
    }
    if (n > 2) f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx.value());
    f.r2 = syy.value() > 0.0 ? 1.0 - rss / syy.value() : 1.0;
    return f;
}

} // namespace rotorlab
