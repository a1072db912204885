#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gsk/approximation.hpp"
#include "gsk/experiments.hpp"

using namespace gsk;

namespace {

const ModelParams kBase{0.25, 0.2, 0.0, 0.018};

struct Setup {
    CriticalPoint cp;
    GLCoefficients gl;
    EigenData ed;
};

const Setup& setup() {
    static Setup s = [] {
        Setup r;
        r.cp = find_critical(kBase);
        r.gl = gl_coefficients(r.cp, kBase);
        ModelParams pc = kBase;
        pc.a = r.cp.a_crit;
        r.ed = dispersion(r.cp.k_c, GskModel::on_minus_branch(pc));
        return r;
    }();
    return s;
}

AnsatzBundle bundle(double eps, int periods = 16, int n_fast = 512, int n_slow = 64) {
    const Setup& s = setup();
    AnsatzBundle b;
    b.eps = eps;
    b.fast_grid = Grid1D(n_fast, 2.0 * pi * periods / s.cp.k_c);
    b.slow_grid = make_slow_grid(b.fast_grid, eps, n_slow);
    b.carrier_index = periods;
    b.coeffs = s.gl;
    b.f1 = s.ed.f1;
    b.params = kBase;
    b.params.a = s.cp.a_crit - eps * eps;
    b.validate();
    return b;
}

}  // namespace

TEST_CASE("bundle validation rejects inconsistent geometry") {
    AnsatzBundle b = bundle(0.1);
    AnsatzBundle bad = b;
    bad.eps = -0.1;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = b;
    bad.slow_grid = Grid1D(64, 1.0);  // wrong length
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = b;
    bad.carrier_index = 200;  // 2*carrier + n_slow exceeds the fast Nyquist band
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero envelope produces the zero field") {
    AnsatzBundle b = bundle(0.1);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    REQUIRE(build_ansatz(b, A).l1_coeff_bound() == 0.0);
    REQUIRE(ansatz_time_derivative(b, A).l1_coeff_bound() == 0.0);
}

TEST_CASE("constant envelope populates exactly the carrier harmonics") {
    AnsatzBundle b = bundle(0.1);
    const cx A0 = cx(0.4, 0.2);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    A[0] = A0;
    SpectralField v = build_ansatz(b, A);

    const int kc = b.carrier_index;
    const double e = b.eps, e2 = e * e;
    for (int i = 0; i < 2; ++i) {
        REQUIRE(std::abs(v.at(i, kc) - e * A0 * b.f1(i)) < 1e-13);
        REQUIRE(std::abs(v.at(i, -kc) - std::conj(e * A0 * b.f1(i))) < 1e-13);
        REQUIRE(std::abs(v.at(i, 0) - e2 * std::norm(A0) * b.coeffs.nu0(i)) < 1e-13);
        REQUIRE(std::abs(v.at(i, 2 * kc) - e2 * A0 * A0 * b.coeffs.nu2(i)) < 1e-13);
        REQUIRE(std::abs(v.at(i, -2 * kc) - std::conj(e2 * A0 * A0 * b.coeffs.nu2(i))) < 1e-13);
    }
    // nothing anywhere else
    double off = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < b.fast_grid.n; ++j) {
            int m = std::abs(b.fast_grid.mode_index(j));
            if (m == 0 || m == kc || m == 2 * kc) continue;
            off = std::max(off, std::abs(v.comp(i)[j]));
        }
    REQUIRE(off < 1e-14);
}

TEST_CASE("single slow mode lands carrier-shifted on the fast grid") {
    AnsatzBundle b = bundle(0.1);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    const int ms = 3;
    const cx amp = cx(0.2, -0.1);
    A[b.slow_grid.slot(ms)] = amp;
    SpectralField v = build_ansatz(b, A);
    // first-order block: eps * amp * e^{i(k_c + ms dk)x} f1
    const int kc = b.carrier_index;
    for (int i = 0; i < 2; ++i) {
        REQUIRE(std::abs(v.at(i, kc + ms) - b.eps * amp * b.f1(i)) < 1e-13);
        REQUIRE(std::abs(v.at(i, -(kc + ms)) - std::conj(b.eps * amp * b.f1(i))) < 1e-13);
    }
    // |A|^2 block: amp e^{i ms dK X} has |A|^2 with modes 0 only... no:
    // |A(X)|^2 = |amp|^2 constant, so the nu0 block sits at fast mode 0.
    REQUIRE(std::abs(v.at(0, 0) - b.eps * b.eps * std::norm(amp) * b.coeffs.nu0(0)) < 1e-13);
    // A^2 block at 2 k_c + 2 ms
    REQUIRE(std::abs(v.at(0, 2 * kc + 2 * ms) -
                     b.eps * b.eps * amp * amp * b.coeffs.nu2(0)) < 1e-13);
}

TEST_CASE("ansatz agrees with a pointwise physical-space oracle") {
    AnsatzBundle b = bundle(0.08);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    A[0] = cx(0.3, 0.0);
    for (int m = 1; m <= 3; ++m) {
        A[b.slow_grid.slot(m)] = 0.1 * cx(uni(rng), uni(rng));
        A[b.slow_grid.slot(-m)] = 0.1 * cx(uni(rng), uni(rng));
    }
    SpectralField v = build_ansatz(b, A);
    auto phys0 = v.to_physical(0);

    for (int j : {0, 17, 100, 511}) {
        double x = b.fast_grid.x(j);
        double X = b.eps * x;
        cx Ax = 0.0;
        for (int p = 0; p < b.slow_grid.n; ++p) {
            double K = b.slow_grid.dk() * b.slow_grid.mode_index(p);
            Ax += A[p] * std::exp(cx(0.0, K * X));
        }
        cx carrier = b.eps * Ax * std::exp(cx(0.0, b.k_c() * x)) * b.f1(0);
        cx second = b.eps * b.eps * Ax * Ax * std::exp(cx(0.0, 2.0 * b.k_c() * x)) * b.coeffs.nu2(0);
        cx expect = carrier + std::conj(carrier) +
                    b.eps * b.eps * std::norm(Ax) * b.coeffs.nu0(0) + second + std::conj(second);
        REQUIRE(std::abs(phys0[j] - expect) < 1e-12);
    }
}

TEST_CASE("ansatz fields are real") {
    AnsatzBundle b = bundle(0.08);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    A[0] = cx(0.3, 0.2);
    A[b.slow_grid.slot(1)] = cx(0.05, -0.02);
    A[b.slow_grid.slot(-2)] = cx(-0.03, 0.01);
    REQUIRE(build_ansatz(b, A).hermitian_asymmetry() < 1e-12);
    REQUIRE(ansatz_time_derivative(b, A).hermitian_asymmetry() < 1e-12);
}

TEST_CASE("analytic time derivative matches finite differences of the transported ansatz") {
    // Advance the envelope by +-h in slow time with the amplitude equation and
    // difference the assembled fields; the chain-rule derivative must match to
    // second order in h.
    AnsatzBundle b = bundle(0.1, 16, 512, 32);
    std::vector<cx> A(b.slow_grid.n, cx{0.0, 0.0});
    A[0] = cx(0.3, 0.1);
    A[b.slow_grid.slot(1)] = cx(0.05, 0.0);
    A[b.slow_grid.slot(-1)] = cx(0.02, 0.03);

    SpectralField analytic = ansatz_time_derivative(b, A);

    auto shifted = [&](double hT) {
        // single high-accuracy RK4 step of the amplitude equation
        std::vector<cx> y = A;
        auto plus = [&](const std::vector<cx>& base, const std::vector<cx>& k, double w) {
            std::vector<cx> out(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + w * k[i];
            return out;
        };
        auto k1 = gl_rhs(b, y);
        auto k2 = gl_rhs(b, plus(y, k1, hT / 2.0));
        auto k3 = gl_rhs(b, plus(y, k2, hT / 2.0));
        auto k4 = gl_rhs(b, plus(y, k3, hT));
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] += hT / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return build_ansatz(b, y);
    };

    double prev_err = 0.0;
    int idx = 0;
    double errs[2];
    for (double hT : {1e-2, 5e-3}) {
        double hfast = hT / (b.eps * b.eps);
        SpectralField fd = shifted(hT);
        fd -= shifted(-hT);
        fd *= 1.0 / (2.0 * hfast);
        fd -= analytic;
        errs[idx++] = fd.l1_coeff_bound();
    }
    (void)prev_err;
    double order = std::log(errs[0] / errs[1]) / std::log(2.0);
    REQUIRE(order > 1.8);
    REQUIRE(errs[1] < 1e-6);
}

TEST_CASE("residual norms are small at onset and split consistently") {
    AnsatzBundle b = bundle(0.05);
    std::vector<cx> A = modulated_envelope(b.slow_grid, 0.5);
    ResidualReport rep = residual(b, A, 0.0, 2.0);
    REQUIRE(rep.eps == 0.05);
    REQUIRE(rep.res_c_norm > 0.0);
    REQUIRE(rep.res_s_norm > 0.0);
    // orders of magnitude: eps^3-ish and eps^2-ish with moderate prefactors
    REQUIRE(rep.res_c_norm < 1e3 * std::pow(0.05, 3));
    REQUIRE(rep.res_s_norm < 1e3 * std::pow(0.05, 2));
}

TEST_CASE("error decomposition is exact bookkeeping") {
    AnsatzBundle b = bundle(0.1);
    std::vector<cx> A = modulated_envelope(b.slow_grid, 0.4);
    SpectralField v = build_ansatz(b, A);
    // V identical to the ansatz: all error measures vanish
    ErrorReport zero = error_decomposition(v, b, A, 2.0);
    REQUIRE(zero.sup_grid < 1e-14);
    REQUIRE(zero.rc_norm < 1e-12);
    REQUIRE(zero.rs_norm < 1e-12);

    // a pure critical-band perturbation of size eps^2 delta shows up as
    // rc_norm = delta (times the norm weight), rs_norm = 0
    SpectralField pert = v;
    const double delta = 0.01;
    pert.at(0, b.carrier_index) += b.eps * b.eps * delta;
    pert.at(0, -b.carrier_index) += b.eps * b.eps * delta;
    ErrorReport er = error_decomposition(pert, b, A, 0.0);
    REQUIRE(er.rc_norm ==
            Catch::Approx(delta * b.fast_grid.length / (2.0 * pi)).epsilon(1e-10));
    REQUIRE(er.rs_norm < 1e-12);
}
