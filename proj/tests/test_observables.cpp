#include <doctest.h>

#include <cmath>

#include "lrl/observables.hpp"
#include "lrl/rng.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

PhasePoint random_point(SiteIndex n, std::uint64_t seed, double amplitude = 2.0) {
    Xoshiro256pp rng(seed);
    PhasePoint x = PhasePoint::zero(n);
    for (SiteIndex s = 0; s < n; ++s) x.q(s) = rng.uniform(-amplitude, amplitude);
    for (SiteIndex s = 0; s < n; ++s) x.p(s) = rng.uniform(-amplitude, amplitude);
    return x;
}

WeylGenerator random_generator(const TorusLattice& lat, std::uint64_t seed, int support_size) {
    Xoshiro256pp rng(seed);
    WeylGenerator f;
    while (static_cast<int>(f.sites.size()) < support_size) {
        const auto s = static_cast<SiteIndex>(rng.next() % lat.size());
        if (f.value_at(s) == Complex{0.0, 0.0}) {
            f.sites.push_back(s);
            f.values.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        }
        std::vector<std::pair<SiteIndex, Complex>> items;
        for (std::size_t i = 0; i < f.sites.size(); ++i) items.push_back({f.sites[i], f.values[i]});
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < items.size(); ++i) {
            f.sites[i] = items[i].first;
            f.values[i] = items[i].second;
        }
    }
    return f;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("weyl_eval basics") {
    const SiteIndex n = 6;
    const PhasePoint x = random_point(n, 7);

    CHECK(weyl_eval(WeylGenerator{}, x) == Complex{1.0, 0.0});

    for (int rep = 0; rep < 20; ++rep) {
        const TorusLattice lat(1, 3);
        const WeylGenerator f = random_generator(lat, 50 + rep, 3);
        CHECK(std::abs(weyl_eval(f, x)) == doctest::Approx(1.0).epsilon(1e-14));
    }

    PhasePoint pi_point = PhasePoint::zero(n);
    pi_point.p(0) = M_PI;
    const WeylGenerator idelta = WeylGenerator::delta(0, {0.0, 1.0});
    CHECK(weyl_eval(idelta, pi_point).real() == doctest::Approx(-1.0));

    WeylGenerator off = WeylGenerator::delta(n + 3);
    CHECK_THROWS_AS(weyl_eval(off, x), std::domain_error);
}

TEST_CASE("weyl bracket coefficient") {
    const TorusLattice lat(1, 4);
    const WeylGenerator f = random_generator(lat, 1, 3);
    CHECK(poisson_bracket_weyl(f, f).coefficient == doctest::Approx(0.0).epsilon(1e-15));

    const WeylGenerator delta = WeylGenerator::delta(2);
    const WeylGenerator idelta = WeylGenerator::delta(2, {0.0, 1.0});
    CHECK(poisson_bracket_weyl(delta, idelta).coefficient == doctest::Approx(-1.0));

    const WeylGenerator far = WeylGenerator::delta(5, {0.3, 0.4});
    CHECK(poisson_bracket_weyl(delta, far).coefficient == doctest::Approx(0.0));

    // conjugate symmetry and bilinearity of the inner product
    const WeylGenerator g = random_generator(lat, 2, 3);
    const WeylGenerator h = random_generator(lat, 3, 2);
    CHECK(inner_product(f, g).imag() == doctest::Approx(-inner_product(g, f).imag()));
    WeylGenerator sum = g;
    for (std::size_t i = 0; i < h.sites.size(); ++i) {
        bool merged = false;
        for (std::size_t j = 0; j < sum.sites.size(); ++j)
            if (sum.sites[j] == h.sites[i]) {
                sum.values[j] += h.values[i];
                merged = true;
            }
        if (!merged) {
            sum.sites.push_back(h.sites[i]);
            sum.values.push_back(h.values[i]);
        }
    }
    std::vector<std::pair<SiteIndex, Complex>> items;
    for (std::size_t i = 0; i < sum.sites.size(); ++i) items.push_back({sum.sites[i], sum.values[i]});
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < items.size(); ++i) {
        sum.sites[i] = items[i].first;
        sum.values[i] = items[i].second;
    }
    const Complex lhs = inner_product(f, sum);
    const Complex rhs = inner_product(f, g) + inner_product(f, h);
    CHECK(std::abs(lhs - rhs) <= 1e-14);
}

TEST_CASE("numeric bracket against the exact Weyl relation") {
    const TorusLattice lat(1, 3);
    const SiteIndex n = lat.size();
    const WeylGenerator delta = WeylGenerator::delta(0);
    const WeylGenerator idelta = WeylGenerator::delta(0, {0.0, 1.0});
    const SmoothObservable A = make_weyl_observable(delta);
    const SmoothObservable B = make_weyl_observable(idelta);

    for (int rep = 0; rep < 10; ++rep) {
        const PhasePoint x = random_point(n, 600 + rep);
        const Complex expected = -weyl_eval(delta, x) * weyl_eval(idelta, x);
        // analytic-gradient path is exact
        CHECK(std::abs(poisson_bracket_numeric(A, B, x, 1e-4) - expected) <= 1e-12);
        // pure finite differences converge at O(step^2)
        SmoothObservable Afd = A, Bfd = B;
        Afd.grad_q = Afd.grad_p = nullptr;
        Bfd.grad_q = Bfd.grad_p = nullptr;
        CHECK(std::abs(poisson_bracket_numeric(Afd, Bfd, x, 1e-4) - expected) <= 1e-7);
    }

    // antisymmetry at random points
    const WeylGenerator f = random_generator(lat, 9, 3);
    const WeylGenerator g = random_generator(lat, 10, 3);
    const SmoothObservable F = make_weyl_observable(f);
    const SmoothObservable G = make_weyl_observable(g);
    for (int rep = 0; rep < 10; ++rep) {
        const PhasePoint x = random_point(n, 700 + rep);
        const Complex fg = poisson_bracket_numeric(F, G, x, 1e-4);
        const Complex gf = poisson_bracket_numeric(G, F, x, 1e-4);
        CHECK(std::abs(fg + gf) <= 1e-8);
    }

    // A = B and q-only observables commute
    CHECK(std::abs(poisson_bracket_numeric(F, F, random_point(n, 990), 1e-4)) <= 1e-12);
    SmoothObservable qonly;
    qonly.eval = [](const PhasePoint& x) { return Complex{x.q(0) * x.q(1), 0.0}; };
    qonly.support = {0, 1};
    SmoothObservable qonly2;
    qonly2.eval = [](const PhasePoint& x) { return Complex{std::sin(x.q(0)), 0.0}; };
    qonly2.support = {0};
    CHECK(std::abs(poisson_bracket_numeric(qonly, qonly2, random_point(n, 991), 1e-5)) <= 1e-9);
}

TEST_CASE("sup norm sampling") {
    const SiteIndex n = 8;
    const SupNormSampler sampler{200, 42, 5.0};

    CHECK(sup_norm_estimate([](const PhasePoint&) { return Complex{1.0, 0.0}; }, n, sampler) ==
          doctest::Approx(1.0));

    const TorusLattice lat(1, 4);
    const WeylGenerator f = random_generator(lat, 77, 3);
    CHECK(sup_norm_estimate([&](const PhasePoint& x) { return weyl_eval(f, x); }, n, sampler) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const WeylGenerator g = random_generator(lat, 78, 3);
    const WeylBracket bracket = poisson_bracket_weyl(f, g);
    const double sampled =
        sup_norm_estimate([&](const PhasePoint& x) { return bracket.eval(x); }, n, sampler);
    CHECK(sampled <= bracket.sup_norm() + 1e-12);
    CHECK(sampled == doctest::Approx(bracket.sup_norm()).epsilon(1e-12));

    CHECK_THROWS_AS(
        sup_norm_estimate([](const PhasePoint&) { return Complex{}; }, n, SupNormSampler{0, 1, 1.0}),
        std::invalid_argument);
}

TEST_CASE("harmonic bracket norm") {
    const TorusLattice lat(1, 8);
    const HarmonicSolver solver(lat, {1.0, {1.0}});
    const SiteIndex origin = lat.index_of(std::vector<int>{0});
    const SiteIndex five = lat.index_of(std::vector<int>{5});

    const WeylGenerator delta = WeylGenerator::delta(origin);
    const WeylGenerator idelta_same = WeylGenerator::delta(origin, {0.0, 1.0});
    CHECK(harmonic_bracket_norm(solver, delta, idelta_same, 0.0) == doctest::Approx(1.0));

    const WeylGenerator idelta_far = WeylGenerator::delta(five, {0.0, 1.0});
    CHECK(harmonic_bracket_norm(solver, delta, idelta_far, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-13));

    // f = delta_0, g = i delta_5: Im<f_t, g> = Re f_t(5) = h_t^{(0)}(5)
    const double t = 1.0;
    const double oracle =
        std::abs(static_cast<double>(testing::kernel_oracle(lat, solver.params(), 0, t, five)));
    CHECK(harmonic_bracket_norm(solver, delta, idelta_far, t) ==
          doctest::Approx(oracle).epsilon(1e-12));

    // invariant: at t = 0 the norm equals |Im<f, g>| exactly
    const WeylGenerator f = random_generator(lat, 5, 4);
    const WeylGenerator g = random_generator(lat, 6, 4);
    CHECK(harmonic_bracket_norm(solver, f, g, 0.0) ==
          doctest::Approx(std::abs(inner_product(f, g).imag())).epsilon(1e-12));
}

}  // TEST_SUITE
