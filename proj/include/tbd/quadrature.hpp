#pragma once

#include <array>
#include <cmath>

namespace tbd {

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(F& f, double a, double b, double& result, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kronrod_nodes[k];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[k] * pair;
        if (k % 2 == 1) gauss += gauss_weights[k / 2] * pair;
    }
    result = kronrod * half;
    error = std::abs((kronrod - gauss) * half);
}

template <typename F>
double adaptive_gk(F& f, double a, double b, double tol, int depth) {
    double whole, err;
    gk15(f, a, b, whole, err);
    if (err <= tol || depth <= 0) return whole;
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, 0.5 * tol, depth - 1) +
           adaptive_gk(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b] to an absolute
/// tolerance.
template <typename F>
double integrate(F f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
    if (b == a) return 0.0;
    if (b < a) return -integrate(f, b, a, abs_tol, max_depth);
    return detail::adaptive_gk(f, a, b, abs_tol, max_depth);
}

}  // namespace tbd
