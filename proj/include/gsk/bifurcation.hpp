#pragma once

#include <cmath>
#include <utility>

#include "gsk/model.hpp"

namespace gsk {

/// Eigenvalues and (adjoint) eigenvectors of the 2x2 linear symbol at one
/// wavenumber. lambda1 has the larger real part; eigenvectors are unit length
/// with the first nonzero component real positive; adjoints satisfy
/// dot(f_adj, f) = 1 with the bilinear (unconjugated) dot product.
struct EigenData {
    double k = 0.0;
    cx lambda1, lambda2;
    Eigen::Vector2cd f1, f2;
    Eigen::Vector2cd f1_adj, f2_adj;
};

struct CriticalPoint {
    double a_crit = 0.0;
    double k_c = 0.0;
    double lambda_max = 0.0;  // Re lambda1(k_c) at a_crit, ~0
    double curvature = 0.0;   // d^2/dk^2 Re lambda1 at (k_c, a_crit), < 0
};

/// Amplitude-equation data: dA/dT = alpha0 A + alpha2 A_XX + alpha3 |A|^2 A,
/// with correction vectors nu0 (V0 per |A|^2) and nu2 (V2 per A^2).
struct GLCoefficients {
    cx alpha0, alpha2, alpha3;
    Eigen::Vector2cd nu0, nu2;
};

namespace detail {

inline Eigen::Vector2cd fix_phase(Eigen::Vector2cd f) {
    f.normalize();
    for (int i = 0; i < 2; ++i) {
        if (std::abs(f(i)) > 1e-12) {
            f *= std::conj(f(i)) / std::abs(f(i));
            break;
        }
    }
    return f;
}

inline cx bilinear_dot(const Eigen::Vector2cd& u, const Eigen::Vector2cd& v) {
    return u(0) * v(0) + u(1) * v(1);
}

}  // namespace detail

/// Closed-form eigendecomposition of the linear symbol at wavenumber k.
inline EigenData dispersion(double k, const GskModel& model) {
    Eigen::MatrixXcd m = model.linear_symbol(k);
    const cx m11 = m(0, 0), m12 = m(0, 1), m21 = m(1, 0), m22 = m(1, 1);
    const cx tr = m11 + m22;
    const cx det = m11 * m22 - m12 * m21;
    const cx mid = tr / 2.0;
    const cx delta = std::sqrt(mid * mid - det);
    cx l1 = mid + delta, l2 = mid - delta;
    if (l1.real() < l2.real() || (l1.real() == l2.real() && l1.imag() < l2.imag()))
        std::swap(l1, l2);

    const double scale = std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22), 1.0});
    const bool diagonal = std::abs(m12) < 1e-14 * scale && std::abs(m21) < 1e-14 * scale;
    if (std::abs(l1 - l2) < 1e-12 * scale && !diagonal)
        throw DefectiveMatrixError("dispersion: near-defective symbol at k=" + std::to_string(k));

    auto right_vec = [&](cx lambda) -> Eigen::Vector2cd {
        Eigen::Vector2cd r1, r2;
        r1 << m12, lambda - m11;
        r2 << lambda - m22, m21;
        return detail::fix_phase(r1.norm() >= r2.norm() ? r1 : r2);
    };
    auto left_vec = [&](cx lambda) -> Eigen::Vector2cd {
        Eigen::Vector2cd l1v, l2v;
        l1v << m21, lambda - m11;
        l2v << lambda - m22, m12;
        return l1v.norm() >= l2v.norm() ? l1v : l2v;
    };

    EigenData e;
    e.k = k;
    e.lambda1 = l1;
    e.lambda2 = l2;
    e.f1 = right_vec(l1);
    e.f2 = right_vec(l2);
    Eigen::Vector2cd g1 = left_vec(l1), g2 = left_vec(l2);
    cx d1 = detail::bilinear_dot(g1, e.f1);
    cx d2 = detail::bilinear_dot(g2, e.f2);
    if (std::abs(d1) < 1e-14 * scale || std::abs(d2) < 1e-14 * scale)
        throw DefectiveMatrixError("dispersion: adjoint normalization degenerate at k=" +
                                   std::to_string(k));
    e.f1_adj = g1 / d1;
    e.f2_adj = g2 / d2;
    return e;
}

inline double growth_rate(double k, const GskModel& model) {
    Eigen::MatrixXcd m = model.linear_symbol(k);
    const cx tr = m(0, 0) + m(1, 1);
    const cx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const cx mid = tr / 2.0;
    const cx delta = std::sqrt(mid * mid - det);
    return std::max((mid + delta).real(), (mid - delta).real());
}

/// Generous scan bracket justified by lambda1 ~ -d k^2, lambda2 ~ -2 w* k^2.
inline double k_scan_upper(const ModelParams& p, const FixedPoint& fp) {
    double num = std::max({p.b, p.a, 1.0});
    double den = std::min(p.d, 2.0 * fp.w_star);
    return 4.0 * std::sqrt(num / den);
}

/// Maximizes Re lambda1 over k in [0, k_upper]: 512-sample coarse scan plus
/// golden-section refinement to |dk| <= 1e-10.
inline std::pair<double, double> growth_max_over_k(double a, const ModelParams& base) {
    ModelParams p = base;
    p.a = a;
    if (!p.has_vegetated_branches())
        throw NoTuringPointError("growth_max_over_k: a < 4 b^2, minus branch does not exist");
    GskModel model = GskModel::on_minus_branch(p);
    const double k_upper = k_scan_upper(p, model.fixed_point());

    const int samples = 512;
    int best_i = 0;
    double best_g = -1e300;
    for (int i = 0; i < samples; ++i) {
        double k = k_upper * i / (samples - 1);
        double g = growth_rate(k, model);
        if (g > best_g) {
            best_g = g;
            best_i = i;
        }
    }
    double lo = k_upper * std::max(0, best_i - 1) / (samples - 1);
    double hi = k_upper * std::min(samples - 1, best_i + 1) / (samples - 1);

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double g1 = growth_rate(x1, model), g2 = growth_rate(x2, model);
    while (hi - lo > 1e-10) {
        if (g1 >= g2) {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - gr * (hi - lo);
            g1 = growth_rate(x1, model);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + gr * (hi - lo);
            g2 = growth_rate(x2, model);
        }
    }
    double k_max = (lo + hi) / 2.0;
    return {k_max, growth_rate(k_max, model)};
}

/// Root-finds a -> max_k Re lambda1(k; a) = 0: scan for a sign change on
/// (4 b^2, a_upper], bisection, then secant refinement to |growth| <= 1e-10.
inline CriticalPoint find_critical(const ModelParams& base, double a_upper = 5.0) {
    const double a_lower = 4.0 * base.b * base.b * (1.0 + 1e-9) + 1e-12;
    if (a_upper <= a_lower) throw ConfigError("find_critical: empty bracket");

    auto g = [&](double a) { return growth_max_over_k(a, base).second; };

    const int scan = 200;
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double prev_a = a_lower, prev_g = g(a_lower);
    for (int i = 1; i <= scan; ++i) {
        double a = a_lower + (a_upper - a_lower) * i / scan;
        double ga = g(a);
        if (prev_g > 0.0 && ga <= 0.0) {
            lo = prev_a;
            hi = a;
            found = true;
            break;
        }
        prev_a = a;
        prev_g = ga;
    }
    if (!found)
        throw NoTuringPointError("find_critical: no sign change of max growth in [4b^2, a_upper]");

    for (int i = 0; i < 60 && hi - lo > 1e-13 * hi; ++i) {
        double mid = (lo + hi) / 2.0;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    // secant polish on the growth value
    double a0 = lo, a1 = hi, g0 = g(a0), g1 = g(a1);
    for (int i = 0; i < 50 && std::abs(g1) > 1e-10; ++i) {
        if (g1 == g0) break;
        double a2 = a1 - g1 * (a1 - a0) / (g1 - g0);
        a0 = a1;
        g0 = g1;
        a1 = a2;
        g1 = g(a1);
    }

    CriticalPoint cp;
    cp.a_crit = a1;
    auto [k_max, g_max] = growth_max_over_k(cp.a_crit, base);
    cp.k_c = k_max;
    cp.lambda_max = g_max;

    ModelParams pc = base;
    pc.a = cp.a_crit;
    GskModel model = GskModel::on_minus_branch(pc);
    if (cp.k_c < 1e-6 * k_scan_upper(pc, model.fixed_point()))
        throw HomogeneousInstabilityError("find_critical: max growth at k = 0, not a Turing point");
    EigenData ed = dispersion(cp.k_c, model);
    if (std::abs(ed.lambda1.imag()) > 1e-8)
        throw TuringHopfError("find_critical: Im lambda1(k_c) != 0, Turing-Hopf unsupported");

    const double h = 1e-4 * cp.k_c;
    cp.curvature = (growth_rate(cp.k_c + h, model) - 2.0 * growth_rate(cp.k_c, model) +
                    growth_rate(cp.k_c - h, model)) /
                   (h * h);
    return cp;
}

/// Extracts the Ginzburg-Landau coefficients at a critical point.
/// alpha0 = -d/da Re lambda1(k_c)|a_crit, so that a = a_crit - eps^2 gives
/// linearized growth rate +eps^2 alpha0; alpha2 = -curvature/2; nu0 and nu2
/// solve the correction systems; alpha3 assembles the cubic coefficient.
inline GLCoefficients gl_coefficients(const CriticalPoint& cp, const ModelParams& base,
                                      double fd_step_rel = 1e-5) {
    ModelParams pc = base;
    pc.a = cp.a_crit;
    GskModel model = GskModel::on_minus_branch(pc);
    EigenData ed = dispersion(cp.k_c, model);
    const Eigen::Vector2cd f1 = ed.f1;

    const double ha = fd_step_rel * cp.a_crit;
    auto growth_at = [&](double a) {
        ModelParams p = base;
        p.a = a;
        return growth_rate(cp.k_c, GskModel::on_minus_branch(p));
    };
    double dlambda_da = (growth_at(cp.a_crit + ha) - growth_at(cp.a_crit - ha)) / (2.0 * ha);

    GLCoefficients out;
    out.alpha0 = -dlambda_da;
    out.alpha2 = -cp.curvature / 2.0;

    auto solve_correction = [&](double k_out, const Eigen::VectorXcd& rhs) -> Eigen::Vector2cd {
        Eigen::MatrixXcd lam = model.linear_symbol(k_out);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lam);
        double cond = svd.singularValues()(0) / svd.singularValues()(1);
        if (!(cond < 1e8))
            throw ResonantSolveError("gl_coefficients: resonant correction solve at k=" +
                                     std::to_string(k_out));
        return lam.fullPivLu().solve(-rhs);
    };

    Eigen::Vector2cd f1c = f1.conjugate();
    out.nu0 = solve_correction(0.0, 2.0 * model.b2_symbol(0.0, f1, f1c));
    out.nu2 = solve_correction(2.0 * cp.k_c, model.b2_symbol(2.0 * cp.k_c, f1, f1));

    using detail::bilinear_dot;
    Eigen::Vector2cd nu0x = out.nu0, nu2x = out.nu2;
    out.alpha3 = 2.0 * bilinear_dot(ed.f1_adj, model.b2_symbol(cp.k_c, f1, nu0x)) +
                 2.0 * bilinear_dot(ed.f1_adj, model.b2_symbol(cp.k_c, f1c, nu2x)) +
                 3.0 * bilinear_dot(ed.f1_adj, model.b3_symbol(f1c, f1, f1));
    return out;
}

}  // namespace gsk
