#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "lrl/lattice.hpp"

using namespace lrl;

TEST_SUITE("lattice") {

TEST_CASE("enumeration covers (-L, L]^nu in stable order") {
    const TorusLattice chain(1, 2);
    REQUIRE(chain.size() == 4);
    std::vector<int> coords;
    for (SiteIndex i = 0; i < chain.size(); ++i) coords.push_back(chain.site(i)[0]);
    CHECK(coords == std::vector<int>{-1, 0, 1, 2});

    const TorusLattice square(2, 1);
    REQUIRE(square.size() == 4);
    std::set<std::pair<int, int>> sites;
    for (SiteIndex i = 0; i < square.size(); ++i)
        sites.insert({square.site(i)[0], square.site(i)[1]});
    CHECK(sites == std::set<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

    CHECK(TorusLattice(3, 4).size() == 512);

    for (SiteIndex i = 0; i < square.size(); ++i) CHECK(square.index_of(square.site(i)) == i);
}

TEST_CASE("bad construction parameters") {
    CHECK_THROWS_AS(TorusLattice(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(TorusLattice(1, 0), std::invalid_argument);
}

TEST_CASE("torus distance matches its definition") {
    const TorusLattice chain(1, 2);
    const SiteIndex x = chain.index_of(std::vector<int>{2});
    const SiteIndex y = chain.index_of(std::vector<int>{-1});
    CHECK(chain.distance(x, y) == 1);  // |2 - (-1) + 2L*(-1)| = 1
    CHECK(chain.distance(x, x) == 0);

    // brute-force minimum over eta in {-3..3}^nu
    const TorusLattice plane(2, 4);
    const auto brute = [&](SiteIndex a, SiteIndex b) {
        int best = 1 << 20;
        for (int e0 = -3; e0 <= 3; ++e0)
            for (int e1 = -3; e1 <= 3; ++e1) {
                const int d0 = std::abs(plane.site(a)[0] - plane.site(b)[0] + 8 * e0);
                const int d1 = std::abs(plane.site(a)[1] - plane.site(b)[1] + 8 * e1);
                best = std::min(best, d0 + d1);
            }
        return best;
    };
    const SiteIndex a = plane.index_of(std::vector<int>{3, -2});
    const SiteIndex b = plane.index_of(std::vector<int>{-1, 1});
    CHECK(plane.distance(a, b) == 7);
    CHECK(brute(a, b) == 7);
    for (SiteIndex i = 0; i < plane.size(); i += 7)
        for (SiteIndex j = 0; j < plane.size(); j += 5)
            CHECK(plane.distance(i, j) == brute(i, j));
}

TEST_CASE("torus distance is a metric") {
    for (const auto& [nu, L] : {std::pair{1, 3}, {1, 4}, {2, 2}}) {
        const TorusLattice lat(nu, L);
        const SiteIndex n = lat.size();
        for (SiteIndex x = 0; x < n; ++x) {
            CHECK(lat.distance(x, x) == 0);
            for (SiteIndex y = 0; y < n; ++y) {
                const int d = lat.distance(x, y);
                CHECK(d == lat.distance(y, x));
                CHECK(d <= nu * L);
                if (x != y) CHECK(d > 0);
                for (SiteIndex z = 0; z < n; ++z)
                    CHECK(lat.distance(x, z) <= d + lat.distance(y, z));
            }
        }
    }
}

TEST_CASE("decay profile values and monotonicity") {
    CHECK(DecayProfile(0.7, 3).value(0.0) == doctest::Approx(1.0));
    CHECK(DecayProfile(0.0, 1).value(1.0) == doctest::Approx(0.25));
    CHECK(DecayProfile(1.0, 1).value(1.0) == doctest::Approx(std::exp(-1.0) / 4.0));
    CHECK_THROWS_AS(DecayProfile(1.0, 1).value(-0.5), std::domain_error);
    CHECK_THROWS_AS(DecayProfile(-1.0, 1), std::invalid_argument);

    for (const double mu : {0.0, 0.5, 2.0}) {
        const DecayProfile profile(mu, 2);
        double prev = profile.value(0.0);
        for (double r = 0.25; r < 6.0; r += 0.25) {
            const double cur = profile.value(r);
            CHECK(cur < prev);
            prev = cur;
        }
    }
    // monotone in mu as well
    for (double r : {0.5, 1.0, 3.0})
        CHECK(DecayProfile(2.0, 1).value(r) < DecayProfile(0.5, 1).value(r));
}

TEST_CASE("convolution constant against closed forms") {
    // sum_z (1+|z|)^-2 = 1 + 2 (pi^2/6 - 1), so C_1 = 4 (pi^2/3 - 1)
    const double closed1 = 4.0 * (M_PI * M_PI / 3.0 - 1.0);
    const double computed1 = convolution_constant(1, 1e-6);
    CHECK(computed1 == doctest::Approx(closed1).epsilon(3e-6));
    CHECK(computed1 >= closed1);  // truncation returns an upper bound

    // nu = 2 shell counts are 4r, so C_2 = 8 (1 + 4 (zeta(2) - zeta(3)))
    const double zeta3 = 1.2020569031595943;
    const double closed2 = 8.0 * (1.0 + 4.0 * (M_PI * M_PI / 6.0 - zeta3));
    const double computed2 = convolution_constant(2, 1e-6);
    CHECK(computed2 == doctest::Approx(closed2).epsilon(3e-6));
    CHECK(computed2 >= closed2);

    for (int nu = 1; nu <= 3; ++nu)
        CHECK(convolution_constant(nu, 1e-4) >= std::pow(2.0, nu + 1));

    CHECK(convolution_constant(2, 1e-4) ==
          doctest::Approx(convolution_constant(2, 1e-6)).epsilon(2e-4));
    CHECK_THROWS_AS(convolution_constant(1, -1.0), std::invalid_argument);
}

TEST_CASE("F_mu convolution holds on small tori") {
    const DecayProfile p01(0.0, 1);
    const TorusLattice chain(1, 2);
    const SiteIndex zero = chain.index_of(std::vector<int>{0});
    const SiteIndex two = chain.index_of(std::vector<int>{2});
    const ConvolutionCheck chk = verify_f_convolution(chain, p01, zero, two);
    // exhaustive 4-site sum: 2 F(1)^2 + 2 F(0) F(2) = 2/16 + 2/9
    CHECK(chk.lhs == doctest::Approx(25.0 / 72.0).epsilon(1e-12));
    CHECK(chk.pass);

    for (const auto& [nu, L] : {std::pair{1, 2}, {1, 4}, {2, 2}, {2, 4}}) {
        const TorusLattice lat(nu, L);
        for (const double mu : {0.0, 0.5, 1.0, 2.0}) {
            const DecayProfile profile(mu, nu);
            for (SiteIndex x = 0; x < lat.size(); ++x)
                for (SiteIndex y = 0; y < lat.size(); ++y)
                    CHECK(verify_f_convolution(lat, profile, x, y).pass);
        }
    }
}

}  // TEST_SUITE
