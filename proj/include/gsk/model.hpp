#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gsk/spectral.hpp"

namespace gsk {

/// Scalar parameters of the Gray-Scott-Klausmeier system.
struct ModelParams {
    double a = 0.25;   // rainfall
    double b = 0.2;    // vegetation loss
    double c = 0.0;    // advection speed
    double d = 0.018;  // vegetation diffusion

    void validate() const {
        if (!(d > 0.0)) throw ConfigError("ModelParams: d must be positive");
        if (a < 0.0 || b < 0.0) throw ConfigError("ModelParams: a, b must be nonnegative");
    }

    /// Vegetated branches exist iff a >= 4 b^2.
    bool has_vegetated_branches() const { return a >= 4.0 * b * b; }
};

enum class Branch { desert, minus, plus };

struct FixedPoint {
    double v_star = 0.0;
    double w_star = 1.0;
    Branch branch = Branch::desert;
};

/// All spatially homogeneous equilibria: the desert state always, the minus
/// and plus branches iff a >= 4 b^2 (coincident at the saddle-node a = 4 b^2).
inline std::vector<FixedPoint> gsk_fixed_points(const ModelParams& p) {
    p.validate();
    std::vector<FixedPoint> out;
    out.push_back({0.0, 1.0, Branch::desert});
    if (!p.has_vegetated_branches()) return out;
    double disc = std::sqrt(std::max(0.0, 0.25 - p.b * p.b / p.a));
    double w_minus = 0.5 - disc, w_plus = 0.5 + disc;
    out.push_back({p.b / w_minus, w_minus, Branch::minus});
    out.push_back({p.b / w_plus, w_plus, Branch::plus});
    return out;
}

inline FixedPoint gsk_minus_branch(const ModelParams& p) {
    auto fps = gsk_fixed_points(p);
    if (fps.size() < 3) throw NoTuringPointError("minus branch requires a >= 4 b^2");
    return fps[1];
}

/// Contract every model supplies: component count, fixed point, linear symbol,
/// and pre-symmetrized bilinear/trilinear nonlinearities in symbol and field
/// form. Quartic-and-higher Taylor remainders go through remainder_field
/// (default zero).
class Model {
  public:
    virtual ~Model() = default;

    virtual int components() const = 0;
    virtual Eigen::VectorXd fixed_point_state() const = 0;
    virtual Eigen::MatrixXcd linear_symbol(double k) const = 0;
    virtual Eigen::VectorXcd b2_symbol(double k_out, const Eigen::VectorXcd& zeta,
                                       const Eigen::VectorXcd& eta) const = 0;
    virtual Eigen::VectorXcd b3_symbol(const Eigen::VectorXcd& zeta, const Eigen::VectorXcd& eta,
                                       const Eigen::VectorXcd& xi) const = 0;
    virtual SpectralField b2_field(const SpectralField& V, const SpectralField& W) const = 0;
    virtual SpectralField b3_field(const SpectralField& V, const SpectralField& W,
                                   const SpectralField& Z) const = 0;
    virtual SpectralField remainder_field(const SpectralField& V) const {
        return SpectralField(V.grid(), V.components());
    }

    /// B2(V,V) + B3(V,V,V) + remainder; the full deviation nonlinearity.
    /// Models may override the into-variant with a fused fast path.
    virtual void nonlinearity(const SpectralField& V, SpectralField& out) const {
        out = b2_field(V, V);
        out += b3_field(V, V, V);
        out += remainder_field(V);
    }

    SpectralField nonlinearity(const SpectralField& V) const {
        SpectralField out(V.grid(), V.components());
        nonlinearity(V, out);
        return out;
    }
};

/// The Gray-Scott-Klausmeier system written as a deviation from a fixed point.
/// Its Taylor expansion around the fixed point terminates at cubic order.
class GskModel : public Model {
  public:
    GskModel(const ModelParams& params, const FixedPoint& fp) : p_(params), fp_(fp) {
        p_.validate();
    }

    static GskModel on_minus_branch(const ModelParams& params) {
        return GskModel(params, gsk_minus_branch(params));
    }

    const ModelParams& params() const { return p_; }
    const FixedPoint& fixed_point() const { return fp_; }

    int components() const override { return 2; }

    Eigen::VectorXd fixed_point_state() const override {
        Eigen::VectorXd u(2);
        u << fp_.v_star, fp_.w_star;
        return u;
    }

    Eigen::MatrixXcd linear_symbol(double k) const override {
        const double vs = fp_.v_star, ws = fp_.w_star;
        Eigen::MatrixXcd m(2, 2);
        m(0, 0) = -p_.d * k * k - p_.b + 2.0 * ws * vs;
        m(0, 1) = vs * vs;
        m(1, 0) = -2.0 * ws * vs;
        m(1, 1) = cx(-2.0 * ws * k * k - p_.a - vs * vs, p_.c * k);
        return m;
    }

    /// Symmetrized bilinear form; -k_out^2 multiplies the w*w product (the
    /// porous-medium term acts after the product, at the output wavenumber).
    Eigen::VectorXcd b2_symbol(double k_out, const Eigen::VectorXcd& z,
                               const Eigen::VectorXcd& e) const override {
        const double vs = fp_.v_star, ws = fp_.w_star;
        cx vv = z(0) * e(0);
        cx vw = z(0) * e(1) + z(1) * e(0);
        cx ww = z(1) * e(1);
        Eigen::VectorXcd out(2);
        out(0) = ws * vv + vs * vw;
        out(1) = -k_out * k_out * ww - ws * vv - vs * vw;
        return out;
    }

    Eigen::VectorXcd b3_symbol(const Eigen::VectorXcd& z, const Eigen::VectorXcd& e,
                               const Eigen::VectorXcd& x) const override {
        cx s = (z(1) * e(0) * x(0) + e(1) * z(0) * x(0) + x(1) * z(0) * e(0)) / 3.0;
        Eigen::VectorXcd out(2);
        out(0) = s;
        out(1) = -s;
        return out;
    }

    SpectralField b2_field(const SpectralField& V, const SpectralField& W) const override {
        V.check_same(W);
        const Grid1D& g = V.grid();
        const int n = g.n;
        const double vs = fp_.v_star, ws = fp_.w_star;

        auto vcV = V.comp(0), wcV = V.comp(1);
        apply_dealias(g, vcV, 2);
        apply_dealias(g, wcV, 2);
        std::vector<cx> vV = fft::backward(vcV), wV = fft::backward(wcV);

        std::vector<cx> vW, wW;
        const std::vector<cx>*pvW = &vV, *pwW = &wV;
        if (&V != &W) {
            auto vcW = W.comp(0), wcW = W.comp(1);
            apply_dealias(g, vcW, 2);
            apply_dealias(g, wcW, 2);
            vW = fft::backward(vcW);
            wW = fft::backward(wcW);
            pvW = &vW;
            pwW = &wW;
        }

        std::vector<cx> pvv(n), pvw(n), pww(n);
        for (int j = 0; j < n; ++j) {
            pvv[j] = vV[j] * (*pvW)[j];
            pvw[j] = vV[j] * (*pwW)[j] + wV[j] * (*pvW)[j];
            pww[j] = wV[j] * (*pwW)[j];
        }
        std::vector<cx> qvv = fft::forward(pvv);
        std::vector<cx> qvw = fft::forward(pvw);
        std::vector<cx> qww = fft::forward(pww);

        SpectralField out(g, 2);
        for (int j = 0; j < n; ++j) {
            double k = g.wavenumber(j);
            cx quad = ws * qvv[j] + vs * qvw[j];
            out.comp(0)[j] = quad;
            out.comp(1)[j] = -k * k * qww[j] - quad;
        }
        apply_dealias(out, 2);
        return out;
    }

    SpectralField b3_field(const SpectralField& V, const SpectralField& W,
                           const SpectralField& Z) const override {
        V.check_same(W);
        V.check_same(Z);
        const Grid1D& g = V.grid();
        const int n = g.n;

        auto phys = [&](const SpectralField& F, int i) {
            auto c = F.comp(i);
            apply_dealias(g, c, 3);
            return fft::backward(c);
        };
        std::vector<cx> vV = phys(V, 0), wV = phys(V, 1);
        std::vector<cx> s(n);
        if (&V == &W && &V == &Z) {
            for (int j = 0; j < n; ++j) s[j] = wV[j] * vV[j] * vV[j];
        } else {
            std::vector<cx> vW = phys(W, 0), wW = phys(W, 1);
            std::vector<cx> vZ = phys(Z, 0), wZ = phys(Z, 1);
            for (int j = 0; j < n; ++j)
                s[j] = (wV[j] * vW[j] * vZ[j] + wW[j] * vV[j] * vZ[j] + wZ[j] * vV[j] * vW[j]) / 3.0;
        }
        std::vector<cx> q = fft::forward(s);

        SpectralField out(g, 2);
        for (int j = 0; j < n; ++j) {
            out.comp(0)[j] = q[j];
            out.comp(1)[j] = -q[j];
        }
        apply_dealias(out, 3);
        return out;
    }

    /// Fused evaluation of B2(V,V) + B3(V,V,V) for Hermitian-symmetric input
    /// (real physical fields): the two components travel through each complex
    /// transform packed as v + i w, cutting the transform count to four per
    /// call. Matches b2_field + b3_field to roundoff for real fields.
    void nonlinearity(const SpectralField& V, SpectralField& out) const override {
        const Grid1D& g = V.grid();
        const int n = g.n;
        const double vs = fp_.v_star, ws = fp_.w_star;
        const int cut2 = g.dealias_cutoff(2), cut3 = g.dealias_cutoff(3);

        thread_local std::vector<cx> pack, z2, z3, pq, fpq, fr;
        pack.resize(n);
        z2.resize(n);
        z3.resize(n);
        pq.resize(n);
        fpq.resize(n);
        fr.resize(n);

        const auto &cv = V.comp(0), &cw = V.comp(1);
        for (int j = 0; j < n; ++j) {
            int m = std::abs(g.mode_index(j));
            pack[j] = m <= cut2 ? cv[j] + cx(0.0, 1.0) * cw[j] : cx{0.0, 0.0};
        }
        fft::backward(n, pack.data(), z2.data());
        for (int j = 0; j < n; ++j) {
            int m = std::abs(g.mode_index(j));
            pack[j] = m <= cut3 ? cv[j] + cx(0.0, 1.0) * cw[j] : cx{0.0, 0.0};
        }
        fft::backward(n, pack.data(), z3.data());

        // p = quadratic source for component 0, q = w*w (porous-medium
        // product), r = cubic source; all real, p and q packed together.
        for (int j = 0; j < n; ++j) {
            double v2 = z2[j].real(), w2 = z2[j].imag();
            double p = ws * v2 * v2 + 2.0 * vs * v2 * w2;
            double q = w2 * w2;
            pq[j] = cx(p, q);
        }
        fft::forward(n, pq.data(), fpq.data());
        for (int j = 0; j < n; ++j) {
            double v3 = z3[j].real(), w3 = z3[j].imag();
            pack[j] = cx(w3 * v3 * v3, 0.0);
        }
        fft::forward(n, pack.data(), fr.data());

        auto &o0 = out.comp(0), &o1 = out.comp(1);
        for (int j = 0; j < n; ++j) {
            int jn = j == 0 ? 0 : n - j;
            int m = std::abs(g.mode_index(j));
            cx f = fpq[j], fc = std::conj(fpq[jn]);
            cx p = 0.5 * (f + fc);
            cx q = cx(0.0, -0.5) * (f - fc);
            double k = g.wavenumber(j);
            cx cubic = m <= cut3 ? fr[j] : cx{0.0, 0.0};
            if (m > cut2) p = q = cx{0.0, 0.0};
            o0[j] = p + cubic;
            o1[j] = -k * k * q - p - cubic;
        }
    }

    /// Right-hand side of the original (undeviated) equations for an absolute
    /// state (v, w); used for fixed-point and Taylor consistency checks.
    SpectralField full_rhs(const SpectralField& U) const {
        const Grid1D& g = U.grid();
        const int n = g.n;
        std::vector<cx> v = U.to_physical(0), w = U.to_physical(1);
        std::vector<cx> wv2(n), w2(n), aw(n);
        for (int j = 0; j < n; ++j) {
            wv2[j] = w[j] * v[j] * v[j];
            w2[j] = w[j] * w[j];
        }
        std::vector<cx> cwv2 = fft::forward(wv2);
        std::vector<cx> cw2 = fft::forward(w2);
        SpectralField out(g, 2);
        for (int j = 0; j < n; ++j) {
            double k = g.wavenumber(j);
            cx vc = U.comp(0)[j], wc = U.comp(1)[j];
            out.comp(0)[j] = -p_.d * k * k * vc - p_.b * vc + cwv2[j];
            out.comp(1)[j] = -k * k * cw2[j] + cx(0.0, p_.c * k) * wc - p_.a * wc - cwv2[j];
        }
        out.comp(1)[g.slot(0)] += p_.a;  // the constant a(1-w) source
        return out;
    }

  private:
    ModelParams p_;
    FixedPoint fp_;
};

}  // namespace gsk
