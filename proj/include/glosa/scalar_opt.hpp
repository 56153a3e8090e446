#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace glosa {

struct ScalarMin {
    double arg = 0.0;
    double value = 0.0;
    bool at_lower_edge = false;
    bool at_upper_edge = false;
};

/// Coarse scan followed by golden-section refinement. The scan locates the
/// best sample and golden section contracts the bracket formed by its
/// neighbours; this guards against mis-bracketing on functions that are only
/// observed (not proven) unimodal.
template <class F>
ScalarMin minimize_scalar(F&& f, double lo, double hi, double tol, int scan_points = 96,
                          bool log_spaced = true) {
    if (!(hi > lo)) throw std::invalid_argument("minimize_scalar: bad bracket");
    if (scan_points < 3) scan_points = 3;
    double best_t = lo, best_f = f(lo);
    int best_i = 0;
    auto sample = [&](int i) {
        if (!log_spaced) return lo + (hi - lo) * double(i) / double(scan_points - 1);
        const double r = std::log(hi / lo);
        return lo * std::exp(r * double(i) / double(scan_points - 1));
    };
    for (int i = 1; i < scan_points; ++i) {
        const double t = sample(i);
        const double ft = f(t);
        if (ft < best_f) {
            best_f = ft;
            best_t = t;
            best_i = i;
        }
    }
    double a = best_i == 0 ? lo : sample(best_i - 1);
    double b = best_i == scan_points - 1 ? hi : sample(best_i + 1);
    static constexpr double kInvPhi = 0.6180339887498949;
    double m1 = b - kInvPhi * (b - a), m2 = a + kInvPhi * (b - a);
    double f1 = f(m1), f2 = f(m2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = m2;
            m2 = m1;
            f2 = f1;
            m1 = b - kInvPhi * (b - a);
            f1 = f(m1);
        } else {
            a = m1;
            m1 = m2;
            f1 = f2;
            m2 = a + kInvPhi * (b - a);
            f2 = f(m2);
        }
    }
    ScalarMin out;
    out.arg = 0.5 * (a + b);
    out.value = f(out.arg);
    out.at_lower_edge = best_i == 0;
    out.at_upper_edge = best_i == scan_points - 1;
    if (best_f < out.value) {
        out.value = best_f;
        out.arg = best_t;
    }
    return out;
}

}  // namespace glosa
