#pragma once

#include <cmath>
#include <vector>

#include "gsk/dynamics.hpp"

namespace gsk {

/// Everything needed to evaluate the slow-envelope approximation on the fast
/// grid: eps, both grids, the carrier mode, the amplitude-equation
/// coefficients and the critical eigenvector. The amplitude field itself is
/// passed to the operations as a slow-grid coefficient array.
struct AnsatzBundle {
    double eps = 0.0;
    Grid1D fast_grid;
    Grid1D slow_grid;
    int carrier_index = 0;  // k_c = carrier_index * fast_grid.dk(), exact
    GLCoefficients coeffs;
    Eigen::Vector2cd f1;
    ModelParams params;  // at a = a_crit - eps^2

    double k_c() const { return carrier_index * fast_grid.dk(); }

    void validate() const {
        if (!(eps > 0.0)) throw ConfigError("AnsatzBundle: eps must be positive");
        if (carrier_index <= 0) throw ConfigError("AnsatzBundle: carrier_index must be positive");
        double want = eps * fast_grid.length;
        if (std::abs(slow_grid.length - want) > 1e-12 * want)
            throw ConfigError("AnsatzBundle: slow-grid length must equal eps * fast-grid length");
        if (!params.has_vegetated_branches())
            throw ConfigError("AnsatzBundle: a - eps^2 crossed the saddle-node threshold 4b^2");
        if (2 * carrier_index + slow_grid.n > fast_grid.n / 2)
            throw ConfigError(
                "AnsatzBundle: slow field not resolvable on fast grid after carrier shift");
    }
};

inline Grid1D make_slow_grid(const Grid1D& fast, double eps, int n_slow) {
    return Grid1D{n_slow, eps * fast.length};
}

namespace detail {

/// Zero-pad the slow coefficient array onto the fast grid (slow mode m lands
/// on fast mode m since the slow length is eps x fast length and X = eps x),
/// then return the envelope evaluated at the fast grid points.
inline std::vector<cx> upsample_envelope(const AnsatzBundle& b, const std::vector<cx>& slow) {
    if (static_cast<int>(slow.size()) != b.slow_grid.n)
        throw GridMismatchError("upsample_envelope: slow coefficient length mismatch");
    std::vector<cx> fast_c(b.fast_grid.n, cx{0.0, 0.0});
    for (int j = 0; j < b.slow_grid.n; ++j)
        fast_c[b.fast_grid.slot(b.slow_grid.mode_index(j))] = slow[j];
    return fft::backward(fast_c);
}

/// Assembles p1(x) e^{i k_c x} f1 + conj + p0(x) nu0 + p2(x) e^{2i k_c x} nu2
/// + conj on the fast grid. build_ansatz and its analytic time derivative are
/// both instances of this with different envelope blocks.
inline SpectralField assemble_blocks(const AnsatzBundle& b, const std::vector<cx>& p1,
                                     const std::vector<cx>& p0, const std::vector<cx>& p2) {
    const Grid1D& g = b.fast_grid;
    const int n = g.n;
    std::vector<cx> e1(n), e2(n);
    for (int j = 0; j < n; ++j) {
        double ph = b.k_c() * g.x(j);
        e1[j] = cx(std::cos(ph), std::sin(ph));
        e2[j] = e1[j] * e1[j];
    }
    SpectralField out(g, 2);
    std::vector<cx> phys(n);
    for (int i = 0; i < 2; ++i) {
        const cx f = b.f1(i), n0 = b.coeffs.nu0(i), n2 = b.coeffs.nu2(i);
        for (int j = 0; j < n; ++j) {
            cx carrier = p1[j] * e1[j] * f;
            cx second = p2[j] * e2[j] * n2;
            phys[j] = carrier + std::conj(carrier) + p0[j] * n0 + second + std::conj(second);
        }
        out.from_physical(i, phys);
    }
    return out;
}

}  // namespace detail

/// Right-hand side of the amplitude equation on the slow grid, evaluated
/// spectrally with the same dealiasing as the integrator.
inline std::vector<cx> gl_rhs(const AnsatzBundle& b, const std::vector<cx>& a_slow) {
    std::vector<cx> out = gl_nonlinearity(b.coeffs, b.slow_grid, a_slow);
    for (int j = 0; j < b.slow_grid.n; ++j) {
        double K = b.slow_grid.wavenumber(j);
        out[j] += (b.coeffs.alpha0 - b.coeffs.alpha2 * K * K) * a_slow[j];
    }
    return out;
}

/// eps [A e^{i k_c x} f1 + c.c.] + eps^2 [nu0 |A|^2 + (nu2 A^2 e^{2i k_c x} + c.c.)]
/// with A the slow envelope upsampled onto the fast grid.
inline SpectralField build_ansatz(const AnsatzBundle& b, const std::vector<cx>& a_slow) {
    b.validate();
    std::vector<cx> a = detail::upsample_envelope(b, a_slow);
    const int n = b.fast_grid.n;
    std::vector<cx> p1(n), p0(n), p2(n);
    const double e = b.eps, e2 = b.eps * b.eps;
    for (int j = 0; j < n; ++j) {
        p1[j] = e * a[j];
        p0[j] = e2 * std::norm(a[j]);
        p2[j] = e2 * a[j] * a[j];
    }
    return detail::assemble_blocks(b, p1, p0, p2);
}

/// Analytic fast-time derivative of build_ansatz via the chain rule,
/// d/dt = eps^2 d/dT with dA/dT from the amplitude equation.
inline SpectralField ansatz_time_derivative(const AnsatzBundle& b, const std::vector<cx>& a_slow) {
    b.validate();
    std::vector<cx> a = detail::upsample_envelope(b, a_slow);
    std::vector<cx> da = detail::upsample_envelope(b, gl_rhs(b, a_slow));
    const int n = b.fast_grid.n;
    std::vector<cx> p1(n), p0(n), p2(n);
    const double e3 = std::pow(b.eps, 3), e4 = std::pow(b.eps, 4);
    for (int j = 0; j < n; ++j) {
        p1[j] = e3 * da[j];
        p0[j] = e4 * 2.0 * (da[j] * std::conj(a[j])).real();
        p2[j] = e4 * 2.0 * a[j] * da[j];
    }
    return detail::assemble_blocks(b, p1, p0, p2);
}

struct ResidualReport {
    double eps = 0.0;
    double t = 0.0;  // fast evaluation time
    double r = 2.0;
    double res_c_norm = 0.0;
    double res_s_norm = 0.0;
};

/// Res(V) = -dV/dt + Lambda V + B2(V,V) + B3(V,V,V) for V = eps psi_GL, with
/// the time derivative taken analytically; returns X^r norms of the critical
/// and stable parts.
inline ResidualReport residual(const AnsatzBundle& b, const std::vector<cx>& a_slow, double t,
                               double r) {
    SpectralField v = build_ansatz(b, a_slow);
    SpectralField res = ansatz_time_derivative(b, a_slow);
    res *= -1.0;

    GskModel model = GskModel::on_minus_branch(b.params);
    const Grid1D& g = b.fast_grid;
    SpectralField lin(g, 2);
    for (int j = 0; j < g.n; ++j) {
        Eigen::Matrix2cd m = model.linear_symbol(g.wavenumber(j));
        cx vc = v.comp(0)[j], wc = v.comp(1)[j];
        lin.comp(0)[j] = m(0, 0) * vc + m(0, 1) * wc;
        lin.comp(1)[j] = m(1, 0) * vc + m(1, 1) * wc;
    }
    res += lin;
    res += model.b2_field(v, v);
    res += model.b3_field(v, v, v);

    auto [crit, stab] = ec_es_split(res, b.k_c());
    ResidualReport rep;
    rep.eps = b.eps;
    rep.t = t;
    rep.r = r;
    rep.res_c_norm = xr_norm(crit, r);
    rep.res_s_norm = xr_norm(stab, r);
    return rep;
}

struct ErrorReport {
    double rc_norm = 0.0;   // ||E_c R||_{X^r}, R = (V - eps psi)/eps^2
    double rs_norm = 0.0;   // ||E_s R||_{X^r} / eps
    double sup_grid = 0.0;  // max_j |V - eps psi| on the grid
    double sup_l1 = 0.0;    // l1 coefficient bound on V - eps psi
};

inline ErrorReport error_decomposition(const SpectralField& v_full, const AnsatzBundle& b,
                                       const std::vector<cx>& a_slow, double r) {
    SpectralField diff = v_full;
    diff -= build_ansatz(b, a_slow);
    ErrorReport rep;
    rep.sup_grid = diff.sup_physical();
    rep.sup_l1 = diff.l1_coeff_bound();
    SpectralField scaled = diff;
    scaled *= 1.0 / (b.eps * b.eps);
    auto [crit, stab] = ec_es_split(scaled, b.k_c());
    rep.rc_norm = xr_norm(crit, r);
    stab *= 1.0 / b.eps;
    rep.rs_norm = xr_norm(stab, r);
    return rep;
}

}  // namespace gsk
