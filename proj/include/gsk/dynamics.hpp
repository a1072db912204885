#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gsk/bifurcation.hpp"
#include "gsk/model.hpp"

namespace gsk {

namespace etd {

/// phi_k(z) = sum_{j>=0} z^j / (j+k)!; phi_0 = exp. Series below |z| = 0.5,
/// closed form above (no cancellation there).
inline cx phi(int k, cx z) {
    if (k == 0) return std::exp(z);
    if (std::abs(z) < 0.5) {
        double fact = 1.0;
        for (int j = 2; j <= k; ++j) fact *= j;
        cx term = 1.0 / fact, sum = term;
        for (int j = 1; j <= 26; ++j) {
            term *= z / double(j + k);
            sum += term;
        }
        return sum;
    }
    cx e = std::exp(z);
    switch (k) {
        case 1: return (e - 1.0) / z;
        case 2: return (e - 1.0 - z) / (z * z);
        default: return (e - 1.0 - z - z * z / 2.0) / (z * z * z);
    }
}

inline cx phi_deriv(int k, cx z) {
    if (k == 0) return std::exp(z);
    if (std::abs(z) < 0.5) {
        // sum_{j>=1} j z^{j-1} / (j+k)!
        double denom = 1.0;
        for (int j = 1; j <= k; ++j) denom *= j;
        cx zpow = 1.0, sum = 0.0;
        for (int j = 1; j <= 27; ++j) {
            denom *= (j + k);
            sum += double(j) * zpow / denom;
            zpow *= z;
        }
        return sum;
    }
    return (phi(k - 1, z) - double(k) * phi(k, z)) / z;
}

/// f(M) for a 2x2 matrix via the divided-difference form
/// f(M) = f(l2) I + f[l1,l2] (M - l2 I); exact for any diagonalizable M and
/// continuous through eigenvalue collisions.
template <class F, class DF>
Eigen::Matrix2cd matrix_fun(const Eigen::Matrix2cd& m, F f, DF fderiv) {
    const cx tr = m(0, 0) + m(1, 1);
    const cx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const cx mid = tr / 2.0;
    const cx delta = std::sqrt(mid * mid - det);
    const cx l1 = mid + delta, l2 = mid - delta;
    const double tol = 1e-6 * std::max(1.0, std::abs(mid));
    cx dd = std::abs(l1 - l2) > tol ? (f(l1) - f(l2)) / (l1 - l2) : fderiv(mid);
    return f(l2) * Eigen::Matrix2cd::Identity() + dd * (m - l2 * Eigen::Matrix2cd::Identity());
}

inline Eigen::Matrix2cd expm(const Eigen::Matrix2cd& m) {
    return matrix_fun(m, [](cx z) { return std::exp(z); }, [](cx z) { return std::exp(z); });
}

inline Eigen::Matrix2cd phim(int k, const Eigen::Matrix2cd& m) {
    return matrix_fun(m, [k](cx z) { return phi(k, z); }, [k](cx z) { return phi_deriv(k, z); });
}

}  // namespace etd

enum class Scheme { ETD_RK2, ETD_RK4 };

struct IntegratorConfig {
    Scheme scheme = Scheme::ETD_RK4;
    double dt = 0.0;             // must be set by caller (or via auto_dt)
    double t_end = 0.0;
    int record_every = 1;        // output stride in steps
    double clip_threshold = 0.0; // abort bound; 0 = 1e3 x initial bound

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("IntegratorConfig: dt must be positive");
        if (t_end < 0.0) throw ConfigError("IntegratorConfig: t_end must be >= 0");
        if (record_every < 1) throw ConfigError("IntegratorConfig: record_every >= 1");
    }
};

/// Per-mode exact linear propagators and exponential-integrator weights for
/// the 2-component system.
struct PropagatorTable {
    Grid1D grid;
    double dt = 0.0;
    Scheme scheme = Scheme::ETD_RK4;
    // ETD-RK4: E, E2 = exp(hL), exp(hL/2); Q = (h/2) phi1(hL/2);
    // F1..F3 the Cox-Matthews quadrature weights. ETD-RK2 uses E, P1, P2.
    std::vector<Eigen::Matrix2cd> E, E2, Q, F1, F2, F3, P1, P2;
    // When the symbol is real (c = 0) every weight matrix is real; the
    // stepper then streams these flattened copies (half the memory traffic).
    bool real_tables = false;
    std::vector<std::array<double, 4>> rE, rE2, rQ, rF1, rF2, rF3, rP1, rP2;
};

inline PropagatorTable build_propagator_table(const Model& model, const Grid1D& grid, double dt,
                                              Scheme scheme) {
    PropagatorTable t;
    t.grid = grid;
    t.dt = dt;
    t.scheme = scheme;
    const int n = grid.n;
    t.E.resize(n);
    if (scheme == Scheme::ETD_RK4) {
        t.E2.resize(n);
        t.Q.resize(n);
        t.F1.resize(n);
        t.F2.resize(n);
        t.F3.resize(n);
    } else {
        t.P1.resize(n);
        t.P2.resize(n);
    }
    for (int j = 0; j < n; ++j) {
        Eigen::Matrix2cd hL = dt * model.linear_symbol(grid.wavenumber(j));
        t.E[j] = etd::expm(hL);
        if (scheme == Scheme::ETD_RK4) {
            t.E2[j] = etd::expm(0.5 * hL);
            t.Q[j] = 0.5 * dt * etd::phim(1, 0.5 * hL);
            Eigen::Matrix2cd p1 = etd::phim(1, hL), p2 = etd::phim(2, hL), p3 = etd::phim(3, hL);
            t.F1[j] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
            t.F2[j] = dt * (2.0 * p2 - 4.0 * p3);
            t.F3[j] = dt * (4.0 * p3 - p2);
        } else {
            t.P1[j] = dt * etd::phim(1, hL);
            t.P2[j] = dt * etd::phim(2, hL);
        }
    }

    double max_imag = 0.0;
    for (const auto* tab : {&t.E, &t.E2, &t.Q, &t.F1, &t.F2, &t.F3, &t.P1, &t.P2})
        for (const auto& m : *tab)
            max_imag = std::max({max_imag, std::abs(m(0, 0).imag()), std::abs(m(0, 1).imag()),
                                 std::abs(m(1, 0).imag()), std::abs(m(1, 1).imag())});
    if (max_imag < 1e-14) {
        t.real_tables = true;
        auto flatten = [](const std::vector<Eigen::Matrix2cd>& src,
                          std::vector<std::array<double, 4>>& dst) {
            dst.resize(src.size());
            for (std::size_t j = 0; j < src.size(); ++j)
                dst[j] = {src[j](0, 0).real(), src[j](0, 1).real(), src[j](1, 0).real(),
                          src[j](1, 1).real()};
        };
        flatten(t.E, t.rE);
        flatten(t.E2, t.rE2);
        flatten(t.Q, t.rQ);
        flatten(t.F1, t.rF1);
        flatten(t.F2, t.rF2);
        flatten(t.F3, t.rF3);
        flatten(t.P1, t.rP1);
        flatten(t.P2, t.rP2);
    }
    return t;
}

namespace detail {

inline void apply_table(const std::vector<Eigen::Matrix2cd>& mats, const SpectralField& in,
                        SpectralField& out) {
    const int n = in.n();
    const auto &a = in.comp(0), &b = in.comp(1);
    auto &oa = out.comp(0), &ob = out.comp(1);
    for (int j = 0; j < n; ++j) {
        const Eigen::Matrix2cd& m = mats[j];
        cx va = a[j], vb = b[j];
        oa[j] = m(0, 0) * va + m(0, 1) * vb;
        ob[j] = m(1, 0) * va + m(1, 1) * vb;
    }
}

inline void axpy_table(const std::vector<Eigen::Matrix2cd>& mats, const SpectralField& in,
                       SpectralField& out) {
    const int n = in.n();
    const auto &a = in.comp(0), &b = in.comp(1);
    auto &oa = out.comp(0), &ob = out.comp(1);
    for (int j = 0; j < n; ++j) {
        const Eigen::Matrix2cd& m = mats[j];
        cx va = a[j], vb = b[j];
        oa[j] += m(0, 0) * va + m(0, 1) * vb;
        ob[j] += m(1, 0) * va + m(1, 1) * vb;
    }
}

}  // namespace detail

/// Repeated exponential-integrator stepping with reusable stage workspace.
class FullStepper {
  public:
    FullStepper(const Model& model, const PropagatorTable& table)
        : model_(model),
          t_(table),
          a_(table.grid, model.components()),
          b_(table.grid, model.components()),
          c_(table.grid, model.components()),
          nu_(table.grid, model.components()),
          na_(table.grid, model.components()),
          nb_(table.grid, model.components()),
          nc_(table.grid, model.components()),
          next_(table.grid, model.components()) {}

    void step(SpectralField& u) {
        if (t_.scheme == Scheme::ETD_RK2) {
            if (t_.real_tables)
                rk2(u, t_.rE, t_.rP1, t_.rP2);
            else
                rk2(u, t_.E, t_.P1, t_.P2);
        } else {
            if (t_.real_tables)
                rk4(u, t_.rE, t_.rE2, t_.rQ, t_.rF1, t_.rF2, t_.rF3);
            else
                rk4(u, t_.E, t_.E2, t_.Q, t_.F1, t_.F2, t_.F3);
        }
    }

  private:
    static double get(const std::array<double, 4>& m, int i) { return m[i]; }
    static cx get(const Eigen::Matrix2cd& m, int i) { return m(i >> 1, i & 1); }

    // out = MA x + MB y, all per-mode 2x2; out may alias y.
    template <class T>
    void fused_stage(const T& ma, const SpectralField& x, const T& mb, const SpectralField& y,
                     SpectralField& out) const {
        const int n = t_.grid.n;
        const auto &x0 = x.comp(0), &x1 = x.comp(1), &y0 = y.comp(0), &y1 = y.comp(1);
        auto &o0 = out.comp(0), &o1 = out.comp(1);
        for (int j = 0; j < n; ++j) {
            const auto &A = ma[j], &B = mb[j];
            cx xa = x0[j], xb = x1[j], ya = y0[j], yb = y1[j];
            o0[j] = get(A, 0) * xa + get(A, 1) * xb + get(B, 0) * ya + get(B, 1) * yb;
            o1[j] = get(A, 2) * xa + get(A, 3) * xb + get(B, 2) * ya + get(B, 3) * yb;
        }
    }

    template <class T>
    void rk2(SpectralField& u, const T& E, const T& P1, const T& P2) {
        model_.nonlinearity(u, nu_);
        fused_stage(E, u, P1, nu_, a_);
        model_.nonlinearity(a_, na_);
        na_ -= nu_;
        const int n = t_.grid.n;
        const auto &d0 = na_.comp(0), &d1 = na_.comp(1);
        auto &o0 = a_.comp(0), &o1 = a_.comp(1);
        for (int j = 0; j < n; ++j) {
            o0[j] += get(P2[j], 0) * d0[j] + get(P2[j], 1) * d1[j];
            o1[j] += get(P2[j], 2) * d0[j] + get(P2[j], 3) * d1[j];
        }
        u = a_;
    }

    template <class T>
    void rk4(SpectralField& u, const T& E, const T& E2, const T& Q, const T& F1, const T& F2,
             const T& F3) {
        const int n = t_.grid.n;
        model_.nonlinearity(u, nu_);
        fused_stage(E2, u, Q, nu_, a_);
        model_.nonlinearity(a_, na_);
        fused_stage(E2, u, Q, na_, b_);
        model_.nonlinearity(b_, nb_);
        {
            const auto &u0 = nu_.comp(0), &u1 = nu_.comp(1);
            const auto &v0 = nb_.comp(0), &v1 = nb_.comp(1);
            auto &c0 = c_.comp(0), &c1 = c_.comp(1);
            for (int j = 0; j < n; ++j) {
                c0[j] = 2.0 * v0[j] - u0[j];
                c1[j] = 2.0 * v1[j] - u1[j];
            }
        }
        fused_stage(E2, a_, Q, c_, c_);
        model_.nonlinearity(c_, nc_);
        {
            const auto &u0 = u.comp(0), &u1 = u.comp(1);
            const auto &p0 = nu_.comp(0), &p1 = nu_.comp(1);
            const auto &q0 = na_.comp(0), &q1 = na_.comp(1);
            const auto &r0 = nb_.comp(0), &r1 = nb_.comp(1);
            const auto &s0 = nc_.comp(0), &s1 = nc_.comp(1);
            auto &o0 = next_.comp(0), &o1 = next_.comp(1);
            for (int j = 0; j < n; ++j) {
                cx ab0 = q0[j] + r0[j], ab1 = q1[j] + r1[j];
                o0[j] = get(E[j], 0) * u0[j] + get(E[j], 1) * u1[j] + get(F1[j], 0) * p0[j] +
                        get(F1[j], 1) * p1[j] + get(F2[j], 0) * ab0 + get(F2[j], 1) * ab1 +
                        get(F3[j], 0) * s0[j] + get(F3[j], 1) * s1[j];
                o1[j] = get(E[j], 2) * u0[j] + get(E[j], 3) * u1[j] + get(F1[j], 2) * p0[j] +
                        get(F1[j], 3) * p1[j] + get(F2[j], 2) * ab0 + get(F2[j], 3) * ab1 +
                        get(F3[j], 2) * s0[j] + get(F3[j], 3) * s1[j];
            }
        }
        u = next_;
    }

    const Model& model_;
    const PropagatorTable& t_;
    SpectralField a_, b_, c_, nu_, na_, nb_, nc_, next_;
};

/// One exponential-integrator step of the full deviation system.
inline SpectralField step_full(const SpectralField& u, const PropagatorTable& t,
                               const Model& model) {
    SpectralField out = u;
    FullStepper(model, t).step(out);
    return out;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
};

/// Explicit-part stability ceiling for the auto time step:
/// dt = 0.5 / (max_k rho(L(k)) + 2 sup|w~| k_max^2), taken over the active
/// band: dealiasing keeps nonlinear output inside the 2/3 cutoff and the
/// linear propagator never repopulates modes outside it, so band-limited
/// initial data stays band-limited and only retained modes constrain dt.
inline double auto_dt_full(const Model& model, const Grid1D& grid, const SpectralField& initial) {
    const int cut = grid.dealias_cutoff(2);
    double rho_max = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        if (std::abs(grid.mode_index(j)) > cut) continue;
        Eigen::Matrix2cd m = model.linear_symbol(grid.wavenumber(j));
        const cx tr = m(0, 0) + m(1, 1);
        const cx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const cx mid = tr / 2.0;
        const cx delta = std::sqrt(mid * mid - det);
        rho_max = std::max({rho_max, std::abs(mid + delta), std::abs(mid - delta)});
    }
    double w_sup = 0.0;
    for (const cx& v : initial.to_physical(1)) w_sup = std::max(w_sup, std::abs(v));
    double k_max = grid.dk() * cut;
    return 0.5 / (rho_max + 2.0 * w_sup * k_max * k_max);
}

inline Trajectory integrate_full(const SpectralField& initial, const IntegratorConfig& cfg,
                                 const Model& model) {
    cfg.validate();
    PropagatorTable table = build_propagator_table(model, initial.grid(), cfg.dt, cfg.scheme);
    double clip = cfg.clip_threshold > 0.0 ? cfg.clip_threshold
                                           : 1e3 * std::max(initial.l1_coeff_bound(), 1e-12);
    Trajectory traj;
    SpectralField u = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    FullStepper stepper(model, table);
    const long steps = cfg.t_end > 0.0 ? std::lround(cfg.t_end / cfg.dt) : 0;
    for (long s = 1; s <= steps; ++s) {
        stepper.step(u);
        double t = s * cfg.dt;
        if (u.l1_coeff_bound() > clip)
            throw BlowUpError("integrate_full: state exceeded clip threshold", t);
        if (s % cfg.record_every == 0 || s == steps) {
            traj.times.push_back(t);
            traj.states.push_back(u);
        }
    }
    return traj;
}

/// Scalar per-mode tables for the Ginzburg-Landau equation
/// dA/dT = alpha0 A + alpha2 A_XX + alpha3 |A|^2 A on the slow grid.
struct GLPropagatorTable {
    Grid1D grid;
    double dt = 0.0;
    Scheme scheme = Scheme::ETD_RK4;
    std::vector<cx> E, E2, Q, F1, F2, F3, P1, P2;
};

inline GLPropagatorTable build_gl_table(const GLCoefficients& gl, const Grid1D& grid, double dt,
                                        Scheme scheme) {
    GLPropagatorTable t;
    t.grid = grid;
    t.dt = dt;
    t.scheme = scheme;
    const int n = grid.n;
    t.E.resize(n);
    if (scheme == Scheme::ETD_RK4) {
        t.E2.resize(n);
        t.Q.resize(n);
        t.F1.resize(n);
        t.F2.resize(n);
        t.F3.resize(n);
    } else {
        t.P1.resize(n);
        t.P2.resize(n);
    }
    for (int j = 0; j < n; ++j) {
        double K = grid.wavenumber(j);
        cx z = dt * (gl.alpha0 - gl.alpha2 * K * K);
        t.E[j] = std::exp(z);
        if (scheme == Scheme::ETD_RK4) {
            t.E2[j] = std::exp(0.5 * z);
            t.Q[j] = 0.5 * dt * etd::phi(1, 0.5 * z);
            cx p1 = etd::phi(1, z), p2 = etd::phi(2, z), p3 = etd::phi(3, z);
            t.F1[j] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
            t.F2[j] = dt * (2.0 * p2 - 4.0 * p3);
            t.F3[j] = dt * (4.0 * p3 - p2);
        } else {
            t.P1[j] = dt * etd::phi(1, z);
            t.P2[j] = dt * etd::phi(2, z);
        }
    }
    return t;
}

/// Dealiased pseudospectral cubic term alpha3 |A|^2 A.
inline std::vector<cx> gl_nonlinearity(const GLCoefficients& gl, const Grid1D& grid,
                                       const std::vector<cx>& coef) {
    std::vector<cx> c = coef;
    apply_dealias(grid, c, 3);
    std::vector<cx> phys = fft::backward(c);
    for (cx& v : phys) v = gl.alpha3 * std::norm(v) * v;
    std::vector<cx> out = fft::forward(phys);
    apply_dealias(grid, out, 3);
    return out;
}

inline std::vector<cx> step_gl(const std::vector<cx>& u, const GLPropagatorTable& t,
                               const GLCoefficients& gl) {
    const int n = t.grid.n;
    auto lin = [&](const std::vector<cx>& e, const std::vector<cx>& x) {
        std::vector<cx> out(n);
        for (int j = 0; j < n; ++j) out[j] = e[j] * x[j];
        return out;
    };
    auto axpy = [&](const std::vector<cx>& w, const std::vector<cx>& x, std::vector<cx>& y) {
        for (int j = 0; j < n; ++j) y[j] += w[j] * x[j];
    };
    if (t.scheme == Scheme::ETD_RK2) {
        std::vector<cx> nu = gl_nonlinearity(gl, t.grid, u);
        std::vector<cx> a = lin(t.E, u);
        axpy(t.P1, nu, a);
        std::vector<cx> na = gl_nonlinearity(gl, t.grid, a);
        for (int j = 0; j < n; ++j) a[j] += t.P2[j] * (na[j] - nu[j]);
        return a;
    }
    std::vector<cx> nu = gl_nonlinearity(gl, t.grid, u);
    std::vector<cx> a = lin(t.E2, u);
    axpy(t.Q, nu, a);
    std::vector<cx> na = gl_nonlinearity(gl, t.grid, a);
    std::vector<cx> b = lin(t.E2, u);
    axpy(t.Q, na, b);
    std::vector<cx> nb = gl_nonlinearity(gl, t.grid, b);
    std::vector<cx> c = lin(t.E2, a);
    for (int j = 0; j < n; ++j) c[j] += t.Q[j] * (2.0 * nb[j] - nu[j]);
    std::vector<cx> nc = gl_nonlinearity(gl, t.grid, c);
    std::vector<cx> out = lin(t.E, u);
    for (int j = 0; j < n; ++j)
        out[j] += t.F1[j] * nu[j] + t.F2[j] * (na[j] + nb[j]) + t.F3[j] * nc[j];
    return out;
}

struct GLTrajectory {
    std::vector<double> times;               // slow time T
    std::vector<std::vector<cx>> states;     // coefficients on the slow grid
};

inline GLTrajectory integrate_gl(const std::vector<cx>& initial, const Grid1D& grid,
                                 const GLCoefficients& gl, const IntegratorConfig& cfg) {
    cfg.validate();
    GLPropagatorTable table = build_gl_table(gl, grid, cfg.dt, cfg.scheme);
    double init_bound = 0.0;
    for (const cx& v : initial) init_bound += std::abs(v);
    double clip = cfg.clip_threshold > 0.0 ? cfg.clip_threshold : 1e3 * std::max(init_bound, 1e-12);
    GLTrajectory traj;
    std::vector<cx> u = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    const long steps = cfg.t_end > 0.0 ? std::lround(cfg.t_end / cfg.dt) : 0;
    for (long s = 1; s <= steps; ++s) {
        u = step_gl(u, table, gl);
        double bound = 0.0;
        for (const cx& v : u) bound += std::abs(v);
        double t = s * cfg.dt;
        if (bound > clip) throw BlowUpError("integrate_gl: state exceeded clip threshold", t);
        if (s % cfg.record_every == 0 || s == steps) {
            traj.times.push_back(t);
            traj.states.push_back(u);
        }
    }
    return traj;
}

enum class SpectralBand { critical, stable };

struct DecayFit {
    double C = 1.0;
    double rate = 0.0;  // decay exponent sigma (stable) or lambda_max (critical)
};

/// Measures semigroup decay of exp(L(k) t) over a band of wavenumbers.
/// Stable band: least-squares fit of sup-norm to C e^{-sigma t}, sigma > 0
/// required. Critical band: C such that the sup-norm stays <= C e^{lambda_max t}.
inline DecayFit semigroup_decay_probe(const GskModel& model, double k_c, SpectralBand band,
                                      double t_max, int k_samples = 1024, int t_samples = 33) {
    const double k_upper = k_scan_upper(model.params(), model.fixed_point());
    std::vector<double> ks;
    for (int i = 0; i < k_samples; ++i) {
        double k = k_upper * i / (k_samples - 1);
        bool critical = std::abs(k - k_c) <= k_c / 10.0;
        if ((band == SpectralBand::critical) == critical) ks.push_back(k);
    }
    if (ks.empty()) throw ConfigError("semigroup_decay_probe: empty band");

    auto band_sup = [&](double t) {
        double s = 0.0;
        for (double k : ks) {
            Eigen::Matrix2cd p = etd::expm(t * Eigen::Matrix2cd(model.linear_symbol(k)));
            Eigen::JacobiSVD<Eigen::Matrix2cd> svd(p);
            s = std::max(s, svd.singularValues()(0));
        }
        return s;
    };

    DecayFit fit;
    if (band == SpectralBand::critical) {
        // sample max, then golden-section refinement around the best sample so
        // the reported rate is the true band maximum, not a grid artifact
        double lambda_max = -1e300, k_best = ks.front();
        for (double k : ks) {
            double g = growth_rate(k, model);
            if (g > lambda_max) {
                lambda_max = g;
                k_best = k;
            }
        }
        const double spacing = k_upper / (k_samples - 1);
        double lo = std::max(ks.front(), k_best - spacing);
        double hi = std::min(ks.back(), k_best + spacing);
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
        lambda_max = std::max(lambda_max, growth_rate((lo + hi) / 2.0, model));
        fit.rate = lambda_max;
        fit.C = 0.0;
        for (int i = 0; i < t_samples; ++i) {
            double t = t_max * i / std::max(1, t_samples - 1);
            fit.C = std::max(fit.C, band_sup(t) / std::exp(lambda_max * t));
            if (t_max == 0.0) break;
        }
        return fit;
    }

    if (t_max == 0.0) {
        fit.C = band_sup(0.0);
        return fit;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (int i = 0; i < t_samples; ++i) {
        double t = t_max * i / (t_samples - 1);
        double y = std::log(band_sup(t));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    double intercept = (sy - slope * sx) / cnt;
    fit.C = std::exp(intercept);
    fit.rate = -slope;
    if (!(fit.rate > 0.0))
        throw Error("semigroup_decay_probe: stable band shows no decay (not a pure Turing point)");
    return fit;
}

}  // namespace gsk
