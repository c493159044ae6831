#pragma once

#include <span>

#include "lrl/anharmonic.hpp"
#include "lrl/harmonic.hpp"
#include "lrl/lattice.hpp"
#include "lrl/potentials.hpp"

namespace lrl {

/// The constants every envelope evaluator reads.
struct EnvelopeParams {
    double mu = 0.0;
    double epsilon = 0.0;
    double c = 0.0;       // c_{omega,lambda}
    double kappa = 0.0;   // kappa_V
    double c3 = 0.0;      // multi-site Fourier strength
    double mu3 = 0.0;
    double cnu = 0.0;     // C_nu
};

/// Velocity summary surfaced by the bounds report.
struct VelocityEstimates {
    double v_h = 0.0;       // v_h(mu)
    double mu0 = 0.0;       // optimal rate, in (1/2, 1)
    double v_h_opt = 0.0;   // v_h(mu0) <= 4c
    double delta = 0.0;     // anharmonic exponent delta(mu, epsilon)
    double v_ah = 0.0;      // anharmonic velocity
};

/// Collects the constants for a configured system (C_nu computed at 1e-6).
EnvelopeParams make_envelope_params(int nu, const HarmonicParams& params, double mu,
                                    double epsilon, double kappa, double c3, double mu3);

/// Evaluates every velocity and exponent from one parameter set.
VelocityEstimates estimate_velocities(int nu, const HarmonicParams& params,
                                      const EnvelopeParams& env);

/// c_{omega,lambda} = sqrt(omega^2 + 4 sum_j lambda_j).
double coupling_constant(const HarmonicParams& params);

/// v_h(mu) = c_{omega,lambda} max(2/mu, e^{mu/2 + 1}).
double harmonic_velocity(double mu, const HarmonicParams& params);

struct OptimalMu {
    double mu0;           // root of 2/mu = e^{mu/2 + 1} in (1/2, 1)
    double v_opt_factor;  // v_h(mu0)/c = 2/mu0 <= 4
};

/// Bisection for the branch-crossing rate of v_h, to residual <= 1e-10.
OptimalMu optimal_mu();

/// sup_{s>=0} (1+s)^{nu+1} e^{-eps s}, attained at s* = max(0, (nu+1)/eps - 1).
double decay_sup_factor(int nu, double epsilon);

enum class HarmonicEnvelopeVariant {
    general,  // prefactor 2 + c e^{mu/2} + 1/c, for observables in A^(1)
    weyl,     // prefactor 1 + c e^{mu/2} + 1/c
};

/// C sum_{x in X, y in Y} e^{-mu (d(x,y) - v_h(mu) |t|)}. Excludes the
/// observable norms and cardinality factors; callers multiply them in.
double harmonic_envelope(const TorusLattice& lat, const HarmonicParams& params,
                         std::span<const SiteIndex> X, std::span<const SiteIndex> Y, double t,
                         double mu, HarmonicEnvelopeVariant variant);

/// The F-function form: C e^{(mu+eps) v_h(mu+eps) |t|} sum F_mu(d(x,y)) with
/// C = (1 + c e^{(mu+eps)/2} + 1/c) sup_s (1+s)^{nu+1} e^{-eps s}.
double harmonic_envelope_f_form(const TorusLattice& lat, const HarmonicParams& params,
                                std::span<const SiteIndex> X, std::span<const SiteIndex> Y,
                                double t, double mu, double epsilon);

/// kappa_V = int |r| |\hat{V'}(r)| dr to relative tolerance quad_tol
/// (closed form when the potential family carries one).
double kappa_v(const SiteSitePotential& pot, double quad_tol);

/// Single-site anharmonic envelope: C e^{delta |t|} sum F_mu(d(x,y)) with
/// delta = (mu+eps) v_h(mu+eps) + C C_nu kappa_V.
double anharmonic_envelope(const TorusLattice& lat, const HarmonicParams& params,
                           const SiteSitePotential& pot, std::span<const SiteIndex> X,
                           std::span<const SiteIndex> Y, double t, double mu, double epsilon);

/// Multi-site envelope at rate mu3: delta = (mu3+eps) v_h(mu3+eps) + C C3 C_nu^2.
double multisite_envelope(const TorusLattice& lat, const HarmonicParams& params,
                          const AssumptionConstants& constants, std::span<const SiteIndex> X,
                          std::span<const SiteIndex> Y, double t, double epsilon);

enum class VelocityMode { single_site, multi_site };

/// v_ah = (1 + eps/mu) v_h(mu+eps) + C C_nu kappa_V / mu   (single site)
///      = (1 + eps/mu3) v_h(mu3+eps) + C C3 C_nu^2 / mu3   (multi site)
/// kappa_or_c3 is kappa_V resp. C3. mu3 = 0 has no finite velocity.
double anharmonic_velocity(double mu, double epsilon, const HarmonicParams& params,
                           double kappa_or_c3, VelocityMode mode);

}  // namespace lrl
