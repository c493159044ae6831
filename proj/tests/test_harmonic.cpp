#include <doctest.h>

#include <cmath>
#include <complex>

#include "lrl/harmonic.hpp"
#include "lrl/observables.hpp"
#include "lrl/rng.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

PhasePoint random_point(const TorusLattice& lat, std::uint64_t seed, double amplitude = 1.0) {
    Xoshiro256pp rng(seed);
    PhasePoint x = PhasePoint::zero(lat.size());
    for (SiteIndex s = 0; s < lat.size(); ++s) x.q(s) = rng.uniform(-amplitude, amplitude);
    for (SiteIndex s = 0; s < lat.size(); ++s) x.p(s) = rng.uniform(-amplitude, amplitude);
    return x;
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("dispersion") {
    HarmonicParams params{1.0, {1.0}};
    CHECK(dispersion(params, std::vector<double>{0.0}) == doctest::Approx(1.0));
    CHECK(dispersion(params, std::vector<double>{M_PI}) == doctest::Approx(std::sqrt(5.0)));
    HarmonicParams decoupled{1.3, {0.0, 0.0}};
    CHECK(dispersion(decoupled, std::vector<double>{1.1, -2.0}) == doctest::Approx(1.3));
    CHECK(params.coupling() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("spectral table symmetry and range") {
    const TorusLattice lat(2, 3);
    const HarmonicParams params{0.7, {0.4, 1.1}};
    const HarmonicSolver solver(lat, params);
    const SpectralTable& table = solver.table();
    for (SiteIndex k = 0; k < lat.size(); ++k) {
        CHECK(table.gamma(k) >= params.omega - 1e-14);
        CHECK(table.gamma(k) <= params.coupling() + 1e-14);
        CHECK(table.gamma(k) == doctest::Approx(table.gamma(lat.reflect(k))).epsilon(1e-14));
    }
}

TEST_CASE("kernels at t = 0 and for decoupled sites") {
    const TorusLattice lat(1, 3);
    const HarmonicSolver solver(lat, {1.0, {1.0}});
    const KernelSet at0 = solver.kernels(0.0);
    for (SiteIndex x = 0; x < lat.size(); ++x) {
        const double expected = lat.distance_to_origin(x) == 0 ? 1.0 : 0.0;
        CHECK(at0.h_0(x) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(std::abs(at0.h_minus1(x)) <= 1e-13);
        CHECK(std::abs(at0.h_plus1(x)) <= 1e-13);
    }

    const double omega = 1.3, t = 0.37;
    const HarmonicSolver decoupled(lat, {omega, {0.0}});
    const KernelSet ks = decoupled.kernels(t);
    for (SiteIndex x = 0; x < lat.size(); ++x) {
        const double is0 = lat.distance_to_origin(x) == 0 ? 1.0 : 0.0;
        CHECK(ks.h_0(x) == doctest::Approx(is0 * std::cos(2 * omega * t)).epsilon(1e-13));
        CHECK(ks.h_minus1(x) ==
              doctest::Approx(-is0 * std::sin(2 * omega * t) / omega).epsilon(1e-13));
        CHECK(ks.h_plus1(x) ==
              doctest::Approx(-is0 * omega * std::sin(2 * omega * t)).epsilon(1e-13));
    }
}

TEST_CASE("four-mode closed form at nu=1 L=2") {
    const TorusLattice lat(1, 2);
    const HarmonicSolver solver(lat, {1.0, {1.0}});
    const KernelSet ks = solver.kernels(1.0);
    const SiteIndex origin = lat.index_of(std::vector<int>{0});
    // gamma over k in {0, +-pi/2, pi} is {1, sqrt(3), sqrt(3), sqrt(5)}
    const double expected =
        0.25 * (std::cos(2.0) + 2.0 * std::cos(2.0 * std::sqrt(3.0)) +
                std::cos(2.0 * std::sqrt(5.0)));
    CHECK(ks.h_0(origin) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("kernels match the brute-force complex Fourier oracle") {
    const TorusLattice lat(2, 2);
    const HarmonicSolver solver(lat, {0.8, {0.9, 0.3}});
    const KernelSet ks = solver.kernels(0.83);
    for (SiteIndex x = 0; x < lat.size(); ++x) {
        CHECK(ks.h_0(x) == doctest::Approx(static_cast<double>(
                               testing::kernel_oracle(lat, solver.params(), 0, 0.83, x)))
                               .epsilon(1e-12));
        CHECK(ks.h_minus1(x) == doctest::Approx(static_cast<double>(
                                    testing::kernel_oracle(lat, solver.params(), -1, 0.83, x)))
                                    .epsilon(1e-12));
        CHECK(ks.h_plus1(x) == doctest::Approx(static_cast<double>(
                                   testing::kernel_oracle(lat, solver.params(), 1, 0.83, x)))
                                   .epsilon(1e-12));
    }
}

TEST_CASE("omega = 0 zero-mode conventions") {
    const TorusLattice lat(1, 2);
    const HarmonicSolver solver(lat, {0.0, {1.0}});
    const double t = 0.6;
    const KernelSet ks = solver.kernels(t);
    // only the k = 0 mode survives the site sum, contributing -2t
    CHECK(ks.h_minus1.sum() == doctest::Approx(-2.0 * t).epsilon(1e-12));
    CHECK(ks.h_0.sum() == doctest::Approx(1.0).epsilon(1e-12));

    // fully degenerate free system: q(t) = q0 + 2 t p0, p(t) = p0
    const HarmonicSolver free_solver(lat, {0.0, {0.0}});
    const PhasePoint x0 = random_point(lat, 11);
    const PhasePoint xt = free_solver.flow(x0, t);
    for (SiteIndex s = 0; s < lat.size(); ++s) {
        CHECK(xt.q(s) == doctest::Approx(x0.q(s) + 2.0 * t * x0.p(s)).epsilon(1e-12));
        CHECK(xt.p(s) == doctest::Approx(x0.p(s)).epsilon(1e-12));
    }
}

TEST_CASE("kernel identities: parity, ODE relations, sum rule") {
    const TorusLattice lat(1, 4);
    const HarmonicParams params{0.9, {1.2}};
    const HarmonicSolver solver(lat, params);
    for (const double t : {0.3, 1.0, 2.0}) {
        const KernelSet plus = solver.kernels(t);
        const KernelSet minus = solver.kernels(-t);
        CHECK((plus.h_0 - minus.h_0).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((plus.h_minus1 + minus.h_minus1).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((plus.h_plus1 + minus.h_plus1).cwiseAbs().maxCoeff() <= 1e-12);

        const double fd = 1e-5;
        const KernelSet hi = solver.kernels(t + fd);
        const KernelSet lo = solver.kernels(t - fd);
        CHECK(((hi.h_minus1 - lo.h_minus1) / (2 * fd) + 2.0 * plus.h_0).cwiseAbs().maxCoeff() <=
              1e-6);
        CHECK(((hi.h_0 - lo.h_0) / (2 * fd) - 2.0 * plus.h_plus1).cwiseAbs().maxCoeff() <= 1e-6);

        CHECK(plus.h_0.sum() == doctest::Approx(std::cos(2 * params.omega * t)).epsilon(1e-10));

        for (SiteIndex x = 0; x < lat.size(); ++x)
            CHECK(plus.h_0(x) == doctest::Approx(plus.h_0(lat.reflect(x))).epsilon(1e-13));
    }
}

TEST_CASE("fft path agrees with the direct sum") {
    for (const int L : {3, 8}) {  // N = 6 exercises a non-power-of-two transform
        const TorusLattice lat(1, L);
        const HarmonicSolver solver(lat, {0.7, {1.4}});
        for (const double t : {0.0, 0.45, -1.2}) {
            const KernelSet direct = solver.kernels(t);
            const KernelSet fast = solver.kernels_fft(t);
            CHECK((direct.h_0 - fast.h_0).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((direct.h_minus1 - fast.h_minus1).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((direct.h_plus1 - fast.h_plus1).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    const TorusLattice plane(2, 2);
    CHECK_THROWS_AS(HarmonicSolver(plane, {1.0, {1.0, 1.0}}).kernels_fft(0.1),
                    std::invalid_argument);
}

TEST_CASE("flow: identity, decoupled closed form, adaptive ODE oracle") {
    const TorusLattice lat(1, 4);
    const HarmonicParams params{1.0, {1.0}};
    const HarmonicSolver solver(lat, params);

    const PhasePoint x0 = random_point(lat, 21);
    const PhasePoint same = solver.flow(x0, 0.0);
    CHECK((same.q - x0.q).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((same.p - x0.p).cwiseAbs().maxCoeff() <= 1e-14);

    // single decoupled oscillator
    const double omega = 0.8, t = 0.9;
    const HarmonicSolver dec(lat, {omega, {0.0}});
    PhasePoint single = PhasePoint::zero(lat.size());
    single.q(2) = 0.7;
    single.p(2) = -0.4;
    const PhasePoint moved = dec.flow(single, t);
    CHECK(moved.q(2) == doctest::Approx(0.7 * std::cos(2 * omega * t) +
                                        (-0.4 / omega) * std::sin(2 * omega * t)));
    CHECK(moved.p(2) == doctest::Approx(-omega * 0.7 * std::sin(2 * omega * t) -
                                        0.4 * std::cos(2 * omega * t)));

    // adaptive RK oracle on Hamilton's equations
    const auto n = static_cast<Eigen::Index>(lat.size());
    Eigen::VectorXd y0(2 * n);
    y0 << x0.q, x0.p;
    const Eigen::VectorXd yt =
        testing::integrate_adaptive(testing::harmonic_rhs(lat, params), y0, 0.0, 0.7, 1e-12);
    const PhasePoint spectral = solver.flow(x0, 0.7);
    CHECK((spectral.q - yt.head(n)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((spectral.p - yt.tail(n)).cwiseAbs().maxCoeff() <= 1e-9);

    PhasePoint bad = x0;
    bad.q(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solver.flow(bad, 0.1), std::domain_error);
}

TEST_CASE("flow group law and energy conservation") {
    const TorusLattice lat(1, 4);
    const HarmonicParams params{1.0, {1.0}};
    const HarmonicSolver solver(lat, params);
    for (int rep = 0; rep < 5; ++rep) {
        const PhasePoint x0 = random_point(lat, 100 + rep, 2.0);
        const PhasePoint once = solver.flow(x0, 1.15);
        const PhasePoint twice = solver.flow(solver.flow(x0, 0.45), 0.7);
        CHECK((once.q - twice.q).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((once.p - twice.p).cwiseAbs().maxCoeff() <= 1e-9);

        const double e0 = harmonic_energy(lat, params, x0);
        const double e1 = harmonic_energy(lat, params, once);
        CHECK(std::abs(e1 - e0) <= 1e-9 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("evolve_weyl: t = 0, decoupled closed form, flow composition") {
    const TorusLattice lat(1, 4);
    const HarmonicSolver solver(lat, {1.0, {1.0}});
    const SiteIndex origin = lat.index_of(std::vector<int>{0});

    WeylGenerator f;
    f.sites = {origin, lat.index_of(std::vector<int>{2})};
    f.values = {{0.6, -0.3}, {-0.2, 1.1}};

    const WeylGenerator f0 = solver.evolve_weyl(f, 0.0);
    for (SiteIndex y = 0; y < lat.size(); ++y)
        CHECK(std::abs(f0.value_at(y) - f.value_at(y)) <= 1e-13);

    const double omega = 1.1, t = 0.8;
    const HarmonicSolver dec(lat, {omega, {0.0}});
    const WeylGenerator delta0 = WeylGenerator::delta(origin);
    const WeylGenerator ft = dec.evolve_weyl(delta0, t);
    CHECK(ft.value_at(origin).real() == doctest::Approx(std::cos(2 * omega * t)));
    CHECK(ft.value_at(origin).imag() == doctest::Approx(std::sin(2 * omega * t) / omega));
    for (SiteIndex y = 0; y < lat.size(); ++y)
        if (y != origin) CHECK(std::abs(ft.value_at(y)) <= 1e-13);

    // W(f_t)(x) = W(f)(Phi_t(x)) at random phase points
    const WeylGenerator evolved = solver.evolve_weyl(f, 0.5);
    for (int rep = 0; rep < 100; ++rep) {
        const PhasePoint x = random_point(lat, 300 + rep, 3.0);
        const Complex lhs = weyl_eval(evolved, x);
        const Complex rhs = weyl_eval(f, solver.flow(x, 0.5));
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }

    WeylGenerator off;
    off.sites = {lat.size()};
    off.values = {{1.0, 0.0}};
    CHECK_THROWS_AS(solver.evolve_weyl(off, 0.1), std::domain_error);
}

TEST_CASE("kernel decay report") {
    const TorusLattice lat(1, 8);
    const HarmonicSolver solver(lat, {1.0, {1.0}});

    const KernelDecayReport at0 = solver.kernel_decay_report(0.0, 1.0);
    CHECK(at0.all_pass);
    for (const KernelDecayRow& row : at0.rows)
        CHECK(row.abs_value[1] <= std::exp(-1.0 * lat.distance_to_origin(row.site)) + 1e-12);

    for (const double t : {0.25, 0.5, 1.0}) {
        const KernelDecayReport rep = solver.kernel_decay_report(t, 1.0);
        CHECK(rep.all_pass);
        CHECK(rep.min_margin >= -1e-12);
    }

    // decoupled: the only nonzero kernel entry is |cos 2wt| <= 1 at the origin
    const HarmonicSolver dec(lat, {1.0, {0.0}});
    const KernelDecayReport rep = dec.kernel_decay_report(3.7, 0.5);
    CHECK(rep.all_pass);

    CHECK_THROWS_AS(solver.kernel_decay_report(0.1, 0.0), std::domain_error);
}

}  // TEST_SUITE
