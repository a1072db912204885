#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <random>

#include "gsk/bifurcation.hpp"

using namespace gsk;

namespace {
const ModelParams kBase{0.25, 0.2, 0.0, 0.018};
}

TEST_CASE("closed-form eigendecomposition matches an independent solver on 1000 samples") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> k_dist(-8.0, 8.0);
    std::uniform_real_distribution<double> a_dist(0.17, 1.5);
    std::uniform_real_distribution<double> c_dist(-0.5, 0.5);
    int checked = 0;
    while (checked < 1000) {
        ModelParams p = kBase;
        p.a = a_dist(rng);
        p.c = c_dist(rng);
        GskModel model = GskModel::on_minus_branch(p);
        double k = k_dist(rng);
        EigenData ed;
        try {
            ed = dispersion(k, model);
        } catch (const DefectiveMatrixError&) {
            continue;  // callers are told to perturb k at collisions
        }
        Eigen::Matrix2cd m = model.linear_symbol(k);

        // eigenvalue agreement with Eigen's QR-based solver
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m);
        cx e0 = es.eigenvalues()(0), e1 = es.eigenvalues()(1);
        if (e0.real() < e1.real()) std::swap(e0, e1);
        double scale = std::max(1.0, std::abs(e0));
        REQUIRE(std::abs(ed.lambda1 - e0) < 1e-10 * scale);
        REQUIRE(std::abs(ed.lambda2 - e1) < 1e-10 * scale);

        // eigenvector residuals and adjoint normalization
        REQUIRE((m * ed.f1 - ed.lambda1 * ed.f1).norm() < 1e-10 * scale);
        REQUIRE((m * ed.f2 - ed.lambda2 * ed.f2).norm() < 1e-10 * scale);
        REQUIRE((m.transpose() * ed.f1_adj - ed.lambda1 * ed.f1_adj).norm() <
                1e-9 * scale * ed.f1_adj.norm());
        cx d11 = ed.f1_adj(0) * ed.f1(0) + ed.f1_adj(1) * ed.f1(1);
        cx d12 = ed.f1_adj(0) * ed.f2(0) + ed.f1_adj(1) * ed.f2(1);
        REQUIRE(std::abs(d11 - 1.0) < 1e-10);
        REQUIRE(std::abs(d12) < 1e-9);

        // phase convention: first nonzero component real positive, unit length
        REQUIRE(ed.f1.norm() == Catch::Approx(1.0).margin(1e-12));
        ++checked;
    }
}

TEST_CASE("large-wavenumber eigenvalues approach the diffusive limits") {
    GskModel model = GskModel::on_minus_branch(kBase);
    const double k = 100.0;
    EigenData ed = dispersion(k, model);
    double l_fast = ed.lambda1.real() / (k * k);
    double l_slow = ed.lambda2.real() / (k * k);
    if (std::abs(l_fast + kBase.d) > std::abs(l_slow + kBase.d)) std::swap(l_fast, l_slow);
    REQUIRE(std::abs(l_fast - (-kBase.d)) < 0.05 * kBase.d);
    double two_w = 2.0 * model.fixed_point().w_star;
    REQUIRE(std::abs(l_slow - (-two_w)) < 0.05 * two_w);
}

TEST_CASE("critical point reproduces the frozen reference values") {
    CriticalPoint cp = find_critical(kBase);
    REQUIRE(cp.a_crit == Catch::Approx(0.240971728).epsilon(1e-6));
    REQUIRE(cp.k_c == Catch::Approx(2.04734512).epsilon(1e-6));
    REQUIRE(std::abs(cp.lambda_max) < 1e-9);
    REQUIRE(cp.curvature == Catch::Approx(-0.0911337).epsilon(1e-4));

    // growth is strictly positive slightly below threshold, negative above
    REQUIRE(growth_max_over_k(cp.a_crit - 0.002, kBase).second > 0.0);
    REQUIRE(growth_max_over_k(cp.a_crit + 0.002, kBase).second < 0.0);
}

TEST_CASE("amplitude-equation coefficients reproduce the frozen reference values") {
    CriticalPoint cp = find_critical(kBase);
    GLCoefficients gl = gl_coefficients(cp, kBase);
    REQUIRE(gl.alpha0.real() == Catch::Approx(1.414305).epsilon(1e-4));
    REQUIRE(std::abs(gl.alpha0.imag()) < 1e-8);
    REQUIRE(gl.alpha2.real() == Catch::Approx(0.0455668).epsilon(1e-4));
    REQUIRE(std::abs(gl.alpha2.imag()) < 1e-8);
    REQUIRE(gl.alpha3.real() == Catch::Approx(-0.1176825).epsilon(1e-4));
    REQUIRE(std::abs(gl.alpha3.imag()) < 1e-8);
    // alpha2 is minus half the curvature by construction and positive here
    REQUIRE(gl.alpha2.real() == Catch::Approx(-cp.curvature / 2.0).epsilon(1e-12));
}

TEST_CASE("correction vectors solve their linear systems to high accuracy") {
    CriticalPoint cp = find_critical(kBase);
    GLCoefficients gl = gl_coefficients(cp, kBase);
    ModelParams pc = kBase;
    pc.a = cp.a_crit;
    GskModel model = GskModel::on_minus_branch(pc);
    EigenData ed = dispersion(cp.k_c, model);
    Eigen::Vector2cd f1c = ed.f1.conjugate();
    double r0 = (Eigen::Matrix2cd(model.linear_symbol(0.0)) * gl.nu0 +
                 2.0 * Eigen::Vector2cd(model.b2_symbol(0.0, ed.f1, f1c)))
                    .norm();
    double r2 = (Eigen::Matrix2cd(model.linear_symbol(2.0 * cp.k_c)) * gl.nu2 +
                 Eigen::Vector2cd(model.b2_symbol(2.0 * cp.k_c, ed.f1, ed.f1)))
                    .norm();
    REQUIRE(r0 < 1e-10);
    REQUIRE(r2 < 1e-10);
}

TEST_CASE("cubic coefficient is invariant under the eigenvector phase") {
    // Rotating f1 by e^{i theta} rotates f1_adj by e^{-i theta}, nu2 by
    // e^{2 i theta} and leaves nu0 alone; the assembled cubic coefficient must
    // not change.
    CriticalPoint cp = find_critical(kBase);
    ModelParams pc = kBase;
    pc.a = cp.a_crit;
    GskModel model = GskModel::on_minus_branch(pc);
    EigenData ed = dispersion(cp.k_c, model);
    GLCoefficients gl = gl_coefficients(cp, kBase);

    auto assemble = [&](cx phase) {
        Eigen::Vector2cd f1 = phase * ed.f1;
        Eigen::Vector2cd adj = ed.f1_adj / phase;
        Eigen::Vector2cd f1c = f1.conjugate();
        Eigen::Vector2cd nu0 = gl.nu0;
        Eigen::Vector2cd nu2 = phase * phase * gl.nu2;
        auto dot = [](const Eigen::Vector2cd& u, const Eigen::VectorXcd& v) {
            return u(0) * v(0) + u(1) * v(1);
        };
        return 2.0 * dot(adj, model.b2_symbol(cp.k_c, f1, nu0)) +
               2.0 * dot(adj, model.b2_symbol(cp.k_c, f1c, nu2)) +
               3.0 * dot(adj, model.b3_symbol(f1c, f1, f1));
    };
    cx base = assemble(1.0);
    REQUIRE(std::abs(base - gl.alpha3) < 1e-10);
    for (double th : {0.7, 1.9, -2.4}) {
        cx rotated = assemble(std::exp(cx(0.0, th)));
        REQUIRE(std::abs(rotated - base) < 1e-10);
    }
}

TEST_CASE("threshold search reports structured failures") {
    // 4 b^2 above the whole scan bracket: no vegetated branch to analyze.
    ModelParams no_branch{0.25, 1.2, 0.0, 0.018};
    REQUIRE_THROWS_AS(find_critical(no_branch), Error);
}
