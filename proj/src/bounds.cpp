#include "lrl/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace lrl {

double coupling_constant(const HarmonicParams& params) { return params.coupling(); }

EnvelopeParams make_envelope_params(int nu, const HarmonicParams& params, double mu,
                                    double epsilon, double kappa, double c3, double mu3) {
    return {mu, epsilon, params.coupling(), kappa, c3, mu3, default_convolution_constant(nu)};
}

VelocityEstimates estimate_velocities(int nu, const HarmonicParams& params,
                                      const EnvelopeParams& env) {
    VelocityEstimates out;
    out.v_h = harmonic_velocity(env.mu, params);
    const OptimalMu opt = optimal_mu();
    out.mu0 = opt.mu0;
    out.v_h_opt = opt.v_opt_factor * env.c;
    const double rate = env.mu + env.epsilon;
    const double prefactor = (1.0 + env.c * std::exp(rate / 2.0) + 1.0 / env.c) *
                             decay_sup_factor(nu, env.epsilon);
    out.delta = rate * harmonic_velocity(rate, params) + prefactor * env.cnu * env.kappa;
    out.v_ah = anharmonic_velocity(env.mu, env.epsilon, params, env.kappa,
                                   VelocityMode::single_site);
    return out;
}

double harmonic_velocity(double mu, const HarmonicParams& params) {
    if (!(mu > 0.0)) throw std::domain_error("harmonic velocity needs mu > 0");
    return params.coupling() * std::max(2.0 / mu, std::exp(mu / 2.0 + 1.0));
}

OptimalMu optimal_mu() {
    // 2/mu decreases and e^{mu/2+1} increases, so the crossing is the
    // minimizer of max(2/mu, e^{mu/2+1}); it lies in (1/2, 1).
    const auto residual = [](double mu) { return 2.0 / mu - std::exp(mu / 2.0 + 1.0); };
    double lo = 0.5, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    const double mu0 = 0.5 * (lo + hi);
    return {mu0, 2.0 / mu0};
}

double decay_sup_factor(int nu, double epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("decay_sup_factor needs epsilon > 0");
    const double s_star = std::max(0.0, (nu + 1) / epsilon - 1.0);
    return std::pow(1.0 + s_star, nu + 1) * std::exp(-epsilon * s_star);
}

namespace {

void check_sets(std::span<const SiteIndex> X, std::span<const SiteIndex> Y,
                const TorusLattice& lat) {
    if (X.empty() || Y.empty()) throw std::domain_error("envelope needs nonempty site sets");
    for (SiteIndex s : X)
        if (s < 0 || s >= lat.size()) throw std::domain_error("X contains a site off the lattice");
    for (SiteIndex s : Y)
        if (s < 0 || s >= lat.size()) throw std::domain_error("Y contains a site off the lattice");
}

double pair_sum_exp(const TorusLattice& lat, std::span<const SiteIndex> X,
                    std::span<const SiteIndex> Y, double mu) {
    double s = 0.0;
    for (SiteIndex x : X)
        for (SiteIndex y : Y) s += std::exp(-mu * lat.distance(x, y));
    return s;
}

double pair_sum_f(const TorusLattice& lat, std::span<const SiteIndex> X,
                  std::span<const SiteIndex> Y, const DecayProfile& profile) {
    double s = 0.0;
    for (SiteIndex x : X)
        for (SiteIndex y : Y) s += profile.value(lat.distance(x, y));
    return s;
}

/// (1 + c e^{rate/2} + 1/c) sup_s (1+s)^{nu+1} e^{-eps s} of the F-form bounds.
double f_form_prefactor(const HarmonicParams& params, int nu, double rate, double epsilon) {
    const double c = params.coupling();
    return (1.0 + c * std::exp(rate / 2.0) + 1.0 / c) * decay_sup_factor(nu, epsilon);
}

}  // namespace

double harmonic_envelope(const TorusLattice& lat, const HarmonicParams& params,
                         std::span<const SiteIndex> X, std::span<const SiteIndex> Y, double t,
                         double mu, HarmonicEnvelopeVariant variant) {
    check_sets(X, Y, lat);
    if (!(mu > 0.0)) throw std::domain_error("envelope needs mu > 0");
    const double c = params.coupling();
    const double base = variant == HarmonicEnvelopeVariant::general ? 2.0 : 1.0;
    const double prefactor = base + c * std::exp(mu / 2.0) + 1.0 / c;
    const double vh = harmonic_velocity(mu, params);
    return prefactor * std::exp(mu * vh * std::abs(t)) * pair_sum_exp(lat, X, Y, mu);
}

double harmonic_envelope_f_form(const TorusLattice& lat, const HarmonicParams& params,
                                std::span<const SiteIndex> X, std::span<const SiteIndex> Y,
                                double t, double mu, double epsilon) {
    check_sets(X, Y, lat);
    if (!(mu > 0.0)) throw std::domain_error("envelope needs mu > 0");
    const double rate = mu + epsilon;
    const double prefactor = f_form_prefactor(params, lat.nu(), rate, epsilon);
    const double speed = rate * harmonic_velocity(rate, params);
    return prefactor * std::exp(speed * std::abs(t)) *
           pair_sum_f(lat, X, Y, DecayProfile(mu, lat.nu()));
}

double kappa_v(const SiteSitePotential& pot, double quad_tol) {
    return resolve_kappa(pot, quad_tol);
}

double anharmonic_envelope(const TorusLattice& lat, const HarmonicParams& params,
                           const SiteSitePotential& pot, std::span<const SiteIndex> X,
                           std::span<const SiteIndex> Y, double t, double mu, double epsilon) {
    check_sets(X, Y, lat);
    if (!(mu > 0.0) || !(epsilon > 0.0))
        throw std::domain_error("anharmonic envelope needs mu > 0 and epsilon > 0");
    const double rate = mu + epsilon;
    const double prefactor = f_form_prefactor(params, lat.nu(), rate, epsilon);
    const double kappa = resolve_kappa(pot, 1e-8);
    const double delta = rate * harmonic_velocity(rate, params) +
                         prefactor * default_convolution_constant(lat.nu()) * kappa;
    return prefactor * std::exp(delta * std::abs(t)) *
           pair_sum_f(lat, X, Y, DecayProfile(mu, lat.nu()));
}

double multisite_envelope(const TorusLattice& lat, const HarmonicParams& params,
                          const AssumptionConstants& constants, std::span<const SiteIndex> X,
                          std::span<const SiteIndex> Y, double t, double epsilon) {
    check_sets(X, Y, lat);
    if (!(epsilon > 0.0)) throw std::domain_error("multisite envelope needs epsilon > 0");
    if (!(constants.mu3 >= 0.0)) throw std::domain_error("mu3 must be nonnegative");
    const double rate = constants.mu3 + epsilon;
    const double prefactor = f_form_prefactor(params, lat.nu(), rate, epsilon);
    const double cnu = default_convolution_constant(lat.nu());
    const double delta =
        rate * harmonic_velocity(rate, params) + prefactor * constants.c3 * cnu * cnu;
    return prefactor * std::exp(delta * std::abs(t)) *
           pair_sum_f(lat, X, Y, DecayProfile(constants.mu3, lat.nu()));
}

double anharmonic_velocity(double mu, double epsilon, const HarmonicParams& params,
                           double kappa_or_c3, VelocityMode mode) {
    if (mode == VelocityMode::multi_site && mu == 0.0)
        throw std::domain_error(
            "mu3 = 0 gives only polynomial interaction decay: no finite velocity");
    if (!(mu > 0.0) || !(epsilon > 0.0))
        throw std::domain_error("anharmonic velocity needs mu > 0 and epsilon > 0");
    const double rate = mu + epsilon;
    const double vh = harmonic_velocity(rate, params);
    const int nu = static_cast<int>(params.lambda.size());  // one coupling per dimension
    const double pref = f_form_prefactor(params, nu, rate, epsilon);
    const double cnu = default_convolution_constant(nu);
    if (mode == VelocityMode::single_site)
        return (1.0 + epsilon / mu) * vh + pref * cnu * kappa_or_c3 / mu;
    return (1.0 + epsilon / mu) * vh + pref * cnu * cnu * kappa_or_c3 / mu;
}

}  // namespace lrl
