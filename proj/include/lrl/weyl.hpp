#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "lrl/lattice.hpp"

namespace lrl {

using Complex = std::complex<double>;

/// Generating function f of a Weyl observable W(f): a finitely supported
/// complex function on the lattice. Sites are kept sorted and unique.
struct WeylGenerator {
    std::vector<SiteIndex> sites;
    std::vector<Complex> values;

    static WeylGenerator delta(SiteIndex site, Complex value = {1.0, 0.0}) {
        return {{site}, {value}};
    }

    double norm_inf() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }

    Complex value_at(SiteIndex site) const {
        auto it = std::lower_bound(sites.begin(), sites.end(), site);
        if (it == sites.end() || *it != site) return {0.0, 0.0};
        return values[static_cast<std::size_t>(it - sites.begin())];
    }
};

/// l2 inner product <f, g> = sum_x conj(f(x)) g(x).
Complex inner_product(const WeylGenerator& f, const WeylGenerator& g);

/// Throws std::domain_error unless every support site lies in the lattice.
void check_support(const WeylGenerator& f, const TorusLattice& lat);

}  // namespace lrl
