#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lrl/harmonic.hpp"
#include "lrl/weyl.hpp"

namespace lrl {

/// W(f)(x) = exp(i sum_x Re[f(x)] q_x + Im[f(x)] p_x); always unimodular.
Complex weyl_eval(const WeylGenerator& f, const PhasePoint& x);

/// The Weyl relation {W(f), W(g)} = -Im<f,g> W(f) W(g), held as the scalar
/// coefficient together with the generator pair.
struct WeylBracket {
    double coefficient;  // -Im<f,g>
    WeylGenerator f, g;

    /// Exact sup norm of the bracket observable (|W(f) W(g)| = 1).
    double sup_norm() const { return std::abs(coefficient); }

    Complex eval(const PhasePoint& x) const {
        return coefficient * weyl_eval(f, x) * weyl_eval(g, x);
    }
};

WeylBracket poisson_bracket_weyl(const WeylGenerator& f, const WeylGenerator& g);

/// A smooth complex observable with finite support. Gradients are optional;
/// when absent the bracket falls back to central finite differences.
struct SmoothObservable {
    std::function<Complex(const PhasePoint&)> eval;
    std::function<Complex(const PhasePoint&, SiteIndex)> grad_q;  // may be null
    std::function<Complex(const PhasePoint&, SiteIndex)> grad_p;  // may be null
    std::vector<SiteIndex> support;
    double dnorm = 0.0;  // ||dA||_inf when known
};

/// W(f) as a SmoothObservable with analytic gradients
/// dW/dq_x = i Re[f(x)] W, dW/dp_x = i Im[f(x)] W.
SmoothObservable make_weyl_observable(const WeylGenerator& f);

/// {A, B}(x) = sum_x dA/dq_x dB/dp_x - dA/dp_x dB/dq_x, restricted to the
/// intersection of the supports. step sets the central-difference width for
/// observables without supplied gradients.
Complex poisson_bracket_numeric(const SmoothObservable& A, const SmoothObservable& B,
                                const PhasePoint& x, double step);

struct SupNormSampler {
    int count = 100;
    std::uint64_t seed = 0;
    double amplitude = 5.0;
};

/// max |obs| over `count` deterministic phase points with coordinates uniform
/// in [-amplitude, amplitude]; a certified lower bound on the sup norm.
double sup_norm_estimate(const std::function<Complex(const PhasePoint&)>& obs, SiteIndex n_sites,
                         const SupNormSampler& sampler);

/// |Im<f_t, g>| - the exact sup norm of {alpha_t^h(W(f)), W(g)}.
double harmonic_bracket_norm(const HarmonicSolver& solver, const WeylGenerator& f,
                             const WeylGenerator& g, double t);

}  // namespace lrl
