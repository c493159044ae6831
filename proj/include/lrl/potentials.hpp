#pragma once

#include <functional>

namespace lrl {

/// Single-site perturbation V with the derivative and Fourier data the
/// locality estimates consume. V must be C^2 with V' integrable and V''
/// bounded; kappa_V = int |r| |\hat{V'}(r)| dr must be finite.
///
/// Closed-form fields are < 0 when unknown; consumers then fall back to
/// quadrature or grid optimization.
struct SiteSitePotential {
    std::function<double(double)> v, dv, d2v;
    std::function<double(double)> vhat1_abs;  // |\hat{V'}(r)|

    double kappa_closed_form = -1.0;
    double sup_dv = -1.0;   // sup_q |V'(q)|
    double sup_d2v = -1.0;  // sup_q |V''(q)|
};

/// V(q) = a exp(-(q/w)^2). Fourier data in closed form:
/// \hat{V'}(r) = i r a w e^{-w^2 r^2/4} / (2 sqrt(pi)), kappa_V = 2|a|/w^2.
SiteSitePotential gaussian_site_potential(double amplitude, double width);

/// Builds the Fourier data numerically: \hat{V'}(r) is computed by adaptive
/// quadrature of (1/2pi) int_{-Q}^{Q} e^{-iqr} V'(q) dq with Q = q_halfwidth
/// (the documented interval; V' must be negligible outside it).
SiteSitePotential site_potential_from_derivatives(std::function<double(double)> v,
                                                  std::function<double(double)> dv,
                                                  std::function<double(double)> d2v,
                                                  double q_halfwidth);

/// Pair interaction V(q1, q2), weighted on the lattice by F_{weight_mu}(d(z1,z2)).
struct PairPotential {
    std::function<double(double, double)> v, d1, d2, d11, d12, d22;
    double weight_mu = 0.0;

    /// |\hat{d1 V}| + |\hat{d2 V}| at (r1, r2); used by the strength quadrature.
    std::function<double(double, double)> grad_hat_abs;

    double strength_closed_form = -1.0;  // int |r| (|\hat{d1V}| + |\hat{d2V}|) dr
    double sup_d1 = -1.0, sup_d2 = -1.0;
    double sup_d11 = -1.0, sup_d12 = -1.0, sup_d22 = -1.0;
};

/// V(q1, q2) = a exp(-(q1^2+q2^2)/w^2); strength integral 4|a|(pi+2)/(pi w^2).
PairPotential gaussian_pair_potential(double amplitude, double width, double weight_mu);

/// kappa_V by adaptive quadrature of 2 int_0^R r |\hat{V'}(r)| dr with doubling
/// R until the increment certifies rel_tol; throws AssumptionError when the
/// integral fails to settle (divergence).
double kappa_quadrature(const SiteSitePotential& pot, double rel_tol);

/// kappa_V: closed form when available, else quadrature at rel_tol.
double resolve_kappa(const SiteSitePotential& pot, double rel_tol);

/// I_V = int_{R^2} (|r1|+|r2|) (|\hat{d1V}| + |\hat{d2V}|) dr, the pair analogue
/// of kappa_V entering assumption vii.
double pair_strength_quadrature(const PairPotential& pot, double rel_tol);

double resolve_pair_strength(const PairPotential& pot, double rel_tol);

}  // namespace lrl
