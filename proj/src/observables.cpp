#include "lrl/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrl/rng.hpp"

namespace lrl {

Complex inner_product(const WeylGenerator& f, const WeylGenerator& g) {
    // Both site lists are sorted; walk the overlap.
    Complex acc{0.0, 0.0};
    std::size_t i = 0, j = 0;
    while (i < f.sites.size() && j < g.sites.size()) {
        if (f.sites[i] < g.sites[j]) {
            ++i;
        } else if (g.sites[j] < f.sites[i]) {
            ++j;
        } else {
            acc += std::conj(f.values[i]) * g.values[j];
            ++i;
            ++j;
        }
    }
    return acc;
}

void check_support(const WeylGenerator& f, const TorusLattice& lat) {
    for (SiteIndex s : f.sites)
        if (s < 0 || s >= lat.size())
            throw std::domain_error("generator support lies outside the lattice");
}

Complex weyl_eval(const WeylGenerator& f, const PhasePoint& x) {
    double phase = 0.0;
    for (std::size_t i = 0; i < f.sites.size(); ++i) {
        const SiteIndex s = f.sites[i];
        if (s < 0 || s >= x.q.size())
            throw std::domain_error("generator support does not match the phase point");
        phase += f.values[i].real() * x.q(s) + f.values[i].imag() * x.p(s);
    }
    return std::polar(1.0, phase);
}

WeylBracket poisson_bracket_weyl(const WeylGenerator& f, const WeylGenerator& g) {
    return {-inner_product(f, g).imag(), f, g};
}

SmoothObservable make_weyl_observable(const WeylGenerator& f) {
    SmoothObservable obs;
    obs.eval = [f](const PhasePoint& x) { return weyl_eval(f, x); };
    obs.grad_q = [f](const PhasePoint& x, SiteIndex s) {
        return Complex{0.0, f.value_at(s).real()} * weyl_eval(f, x);
    };
    obs.grad_p = [f](const PhasePoint& x, SiteIndex s) {
        return Complex{0.0, f.value_at(s).imag()} * weyl_eval(f, x);
    };
    obs.support = f.sites;
    obs.dnorm = f.norm_inf();
    return obs;
}

namespace {

Complex gradient(const SmoothObservable& obs, const PhasePoint& x, SiteIndex s, bool momentum,
                 double step) {
    const auto& supplied = momentum ? obs.grad_p : obs.grad_q;
    if (supplied) return supplied(x, s);
    PhasePoint y = x;
    double& coord = momentum ? y.p(s) : y.q(s);
    const double base = coord;
    coord = base + step;
    const Complex hi = obs.eval(y);
    coord = base - step;
    const Complex lo = obs.eval(y);
    return (hi - lo) / (2.0 * step);
}

}  // namespace

Complex poisson_bracket_numeric(const SmoothObservable& A, const SmoothObservable& B,
                                const PhasePoint& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");

    // Gradients vanish outside the supports, so only the overlap contributes.
    std::vector<SiteIndex> overlap;
    std::set_intersection(A.support.begin(), A.support.end(), B.support.begin(), B.support.end(),
                          std::back_inserter(overlap));

    Complex acc{0.0, 0.0};
    for (SiteIndex s : overlap) {
        const Complex aq = gradient(A, x, s, false, step);
        const Complex ap = gradient(A, x, s, true, step);
        const Complex bq = gradient(B, x, s, false, step);
        const Complex bp = gradient(B, x, s, true, step);
        acc += aq * bp - ap * bq;
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
        throw std::runtime_error("numeric Poisson bracket is non-finite");
    return acc;
}

double sup_norm_estimate(const std::function<Complex(const PhasePoint&)>& obs, SiteIndex n_sites,
                         const SupNormSampler& sampler) {
    if (sampler.count < 1) throw std::invalid_argument("sampler count must be >= 1");
    Xoshiro256pp rng(sampler.seed);
    double best = 0.0;
    for (int i = 0; i < sampler.count; ++i) {
        PhasePoint x = PhasePoint::zero(n_sites);
        for (SiteIndex s = 0; s < n_sites; ++s)
            x.q(s) = rng.uniform(-sampler.amplitude, sampler.amplitude);
        for (SiteIndex s = 0; s < n_sites; ++s)
            x.p(s) = rng.uniform(-sampler.amplitude, sampler.amplitude);
        best = std::max(best, std::abs(obs(x)));
    }
    return best;
}

double harmonic_bracket_norm(const HarmonicSolver& solver, const WeylGenerator& f,
                             const WeylGenerator& g, double t) {
    check_support(f, solver.lattice());
    check_support(g, solver.lattice());
    const WeylGenerator ft = solver.evolve_weyl(f, t);
    return std::abs(inner_product(ft, g).imag());
}

}  // namespace lrl
