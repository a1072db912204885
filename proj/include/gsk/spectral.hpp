#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gsk/field.hpp"

namespace gsk {

/// Discrete X^r norm: sup over grid wavenumbers and components of
/// |u_hat(k)| (1+k^2)^{r/2}, with u_hat(k) = coeff(k) * length/(2 pi) so the
/// value is stable under grid refinement for a fixed smooth field.
inline double xr_norm(const SpectralField& u, double r) {
    if (r < 0.0) throw ConfigError("xr_norm: r must be >= 0");
    const Grid1D& g = u.grid();
    const double scale = g.length / (2.0 * pi);
    double best = 0.0;
    for (int i = 0; i < u.components(); ++i) {
        const auto& c = u.comp(i);
        for (int j = 0; j < g.n; ++j) {
            double k = g.wavenumber(j);
            double v = std::abs(c[j]) * scale * std::pow(1.0 + k * k, r / 2.0);
            if (v > best) best = v;
        }
    }
    return best;
}

/// Sharp pass band around center_index * k_c.
struct ModeFilterSpec {
    int center_index = 1;   // j in {-3,...,3}
    double k_c = 0.0;
    double width = 0.0;     // half-width; defaults to k_c / 10

    ModeFilterSpec(int j, double kc, double w = -1.0)
        : center_index(j), k_c(kc), width(w < 0.0 ? kc / 10.0 : w) {
        if (!(k_c > 0.0)) throw ConfigError("ModeFilterSpec: k_c must be positive");
        if (!(width > 0.0 && width < k_c / 2.0))
            throw ConfigError("ModeFilterSpec: need 0 < width < k_c/2");
    }
};

/// Zeroes every coefficient with |k - j k_c| > width; the pass band uses the
/// closed condition |k - j k_c| <= width, so boundary modes are kept.
inline SpectralField mode_filter(const SpectralField& u, const ModeFilterSpec& spec) {
    SpectralField out = u;
    const Grid1D& g = u.grid();
    const double center = spec.center_index * spec.k_c;
    for (int i = 0; i < out.components(); ++i) {
        auto& c = out.comp(i);
        for (int j = 0; j < g.n; ++j)
            if (std::abs(g.wavenumber(j) - center) > spec.width) c[j] = cx{0.0, 0.0};
    }
    return out;
}

/// E_c = E_1 + E_{-1}, E_s = 1 - E_c. The parts sum to the input bitwise.
inline std::pair<SpectralField, SpectralField> ec_es_split(const SpectralField& u, double k_c,
                                                           double width = -1.0) {
    ModeFilterSpec plus(1, k_c, width), minus(-1, k_c, width);
    SpectralField crit(u.grid(), u.components());
    SpectralField stab = u;
    const Grid1D& g = u.grid();
    for (int i = 0; i < u.components(); ++i) {
        for (int j = 0; j < g.n; ++j) {
            double k = g.wavenumber(j);
            if (std::abs(k - k_c) <= plus.width || std::abs(k + k_c) <= minus.width) {
                crit.comp(i)[j] = u.comp(i)[j];
                stab.comp(i)[j] = cx{0.0, 0.0};
            }
        }
    }
    return {std::move(crit), std::move(stab)};
}

/// O(n^2) circular convolution of coefficient arrays; oracle for the
/// transform-based product path. (uv)(m) = sum_p u(p) v(m-p) with indices mod n.
inline std::vector<cx> convolve_direct(const std::vector<cx>& u, const std::vector<cx>& v) {
    if (u.size() != v.size()) throw GridMismatchError("convolve_direct: length mismatch");
    const int n = static_cast<int>(u.size());
    std::vector<cx> out(n, cx{0.0, 0.0});
    for (int m = 0; m < n; ++m) {
        cx acc{0.0, 0.0};
        for (int p = 0; p < n; ++p) acc += u[p] * v[(m - p + n) % n];
        out[m] = acc;
    }
    return out;
}

/// Transform-based pointwise product of two single-component coefficient
/// arrays (no dealiasing); equals convolve_direct up to roundoff.
inline std::vector<cx> product_coeffs(int n, const std::vector<cx>& u, const std::vector<cx>& v) {
    std::vector<cx> a = fft::backward(u), b = fft::backward(v);
    for (int j = 0; j < n; ++j) a[j] *= b[j];
    return fft::forward(a);
}

/// Zero all coefficients beyond the dealias cutoff for the given product order.
inline void apply_dealias(const Grid1D& g, std::vector<cx>& c, int order) {
    const int cutoff = g.dealias_cutoff(order);
    for (int j = 0; j < g.n; ++j)
        if (std::abs(g.mode_index(j)) > cutoff) c[j] = cx{0.0, 0.0};
}

inline void apply_dealias(SpectralField& u, int order) {
    for (int i = 0; i < u.components(); ++i) apply_dealias(u.grid(), u.comp(i), order);
}

/// Discrete analogue of the X^r convolution-algebra bound: returns
/// (|u v|_{X^r}, C_r |u|_{X^r} |v|_{X^r}) with
/// C_r = 2^{r/2+1} sum_k (1+k^2)^{-r/2} dk; lhs <= rhs must hold for r > 1.
inline std::pair<double, double> algebra_constant_check(const SpectralField& u,
                                                        const SpectralField& v, double r) {
    if (!(r > 1.0)) throw ConfigError("algebra_constant_check: requires r > 1");
    u.check_same(v);
    if (u.components() != 1)
        throw ConfigError("algebra_constant_check: single-component fields only");
    const Grid1D& g = u.grid();
    SpectralField prod(g, 1);
    prod.comp(0) = product_coeffs(g.n, u.comp(0), v.comp(0));
    double weight_sum = 0.0;
    for (int j = 0; j < g.n; ++j) {
        double k = g.wavenumber(j);
        weight_sum += std::pow(1.0 + k * k, -r / 2.0) * g.dk();
    }
    const double c_r = std::pow(2.0, r / 2.0 + 1.0) * weight_sum;
    return {xr_norm(prod, r), c_r * xr_norm(u, r) * xr_norm(v, r)};
}

}  // namespace gsk
