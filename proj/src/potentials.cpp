#include "lrl/potentials.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lrl/errors.hpp"

namespace lrl {

namespace {

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

// Composite panels keep narrow features from slipping between the first
// Simpson nodes (a Gaussian on [-30, 30] looks identically zero to a single
// panel).
double panel_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                     int panels) {
    double total = 0.0;
    const double width = (b - a) / panels;
    for (int i = 0; i < panels; ++i)
        total += adaptive_simpson(f, a + i * width, a + (i + 1) * width, tol / panels);
    return total;
}

}  // namespace

SiteSitePotential gaussian_site_potential(double amplitude, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("gaussian amplitude must be finite");
    const double a = amplitude, w = width;
    SiteSitePotential pot;
    pot.v = [a, w](double q) { return a * std::exp(-(q / w) * (q / w)); };
    pot.dv = [a, w](double q) { return -2.0 * a * q / (w * w) * std::exp(-(q / w) * (q / w)); };
    pot.d2v = [a, w](double q) {
        const double u = q / w;
        return a * std::exp(-u * u) * (4.0 * q * q / (w * w * w * w) - 2.0 / (w * w));
    };
    pot.vhat1_abs = [a, w](double r) {
        return std::abs(r) * std::abs(a) * w / (2.0 * std::sqrt(M_PI)) *
               std::exp(-w * w * r * r / 4.0);
    };
    pot.kappa_closed_form = 2.0 * std::abs(a) / (w * w);
    pot.sup_dv = std::sqrt(2.0) * std::abs(a) * std::exp(-0.5) / w;  // at q = w/sqrt(2)
    pot.sup_d2v = 2.0 * std::abs(a) / (w * w);                       // at q = 0
    return pot;
}

SiteSitePotential site_potential_from_derivatives(std::function<double(double)> v,
                                                  std::function<double(double)> dv,
                                                  std::function<double(double)> d2v,
                                                  double q_halfwidth) {
    if (!(q_halfwidth > 0.0)) throw std::invalid_argument("q_halfwidth must be positive");
    SiteSitePotential pot;
    pot.v = std::move(v);
    pot.dv = std::move(dv);
    pot.d2v = std::move(d2v);
    const auto dv_copy = pot.dv;
    const double q0 = q_halfwidth;
    pot.vhat1_abs = [dv_copy, q0](double r) {
        const auto re = [&](double q) { return std::cos(q * r) * dv_copy(q); };
        const auto im = [&](double q) { return -std::sin(q * r) * dv_copy(q); };
        const std::complex<double> ft{panel_simpson(re, -q0, q0, 1e-13, 16),
                                      panel_simpson(im, -q0, q0, 1e-13, 16)};
        return std::abs(ft) / (2.0 * M_PI);
    };
    return pot;
}

PairPotential gaussian_pair_potential(double amplitude, double width, double weight_mu) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    if (!(weight_mu >= 0.0)) throw std::invalid_argument("weight_mu must be nonnegative");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("gaussian amplitude must be finite");
    const double a = amplitude, w = width;
    const double w2 = w * w;
    const auto env = [w2](double x, double y) { return std::exp(-(x * x + y * y) / w2); };

    PairPotential pot;
    pot.weight_mu = weight_mu;
    pot.v = [a, env](double x, double y) { return a * env(x, y); };
    pot.d1 = [a, w2, env](double x, double y) { return -2.0 * a * x / w2 * env(x, y); };
    pot.d2 = [a, w2, env](double x, double y) { return -2.0 * a * y / w2 * env(x, y); };
    pot.d11 = [a, w2, env](double x, double y) {
        return a * env(x, y) * (4.0 * x * x / (w2 * w2) - 2.0 / w2);
    };
    pot.d22 = [a, w2, env](double x, double y) {
        return a * env(x, y) * (4.0 * y * y / (w2 * w2) - 2.0 / w2);
    };
    pot.d12 = [a, w2, env](double x, double y) { return a * env(x, y) * 4.0 * x * y / (w2 * w2); };

    // |\hat{d_i V}(r)| = |r_i| (|a| w^2 / 4pi) e^{-w^2 (r1^2+r2^2)/4}
    pot.grad_hat_abs = [a, w2](double r1, double r2) {
        return (std::abs(r1) + std::abs(r2)) * std::abs(a) * w2 / (4.0 * M_PI) *
               std::exp(-w2 * (r1 * r1 + r2 * r2) / 4.0);
    };
    pot.strength_closed_form = 4.0 * std::abs(a) * (M_PI + 2.0) / (M_PI * w2);
    pot.sup_d1 = pot.sup_d2 = std::sqrt(2.0) * std::abs(a) * std::exp(-0.5) / w;
    pot.sup_d11 = pot.sup_d22 = 2.0 * std::abs(a) / w2;
    pot.sup_d12 = 2.0 * std::abs(a) / (M_E * w2);
    return pot;
}

double kappa_quadrature(const SiteSitePotential& pot, double rel_tol) {
    if (!pot.vhat1_abs) throw AssumptionError("potential carries no Fourier data for kappa_V");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    const auto integrand = [&](double r) { return r * pot.vhat1_abs(r); };

    double total = 0.0;
    double lo = 0.0;
    int settled = 0;
    for (double hi = 8.0; hi <= 1048576.0; hi *= 2.0) {
        const double piece = panel_simpson(integrand, lo, hi, rel_tol * 1e-3 + 1e-14, 8);
        total += piece;
        if (std::abs(piece) <= 0.25 * rel_tol * std::max(total, 1e-300)) {
            if (++settled >= 2) return 2.0 * total;  // even integrand: both half lines
        } else {
            settled = 0;
        }
        lo = hi;
    }
    throw AssumptionError("kappa_V integral did not settle; divergent Fourier data");
}

double resolve_kappa(const SiteSitePotential& pot, double rel_tol) {
    if (pot.kappa_closed_form >= 0.0) return pot.kappa_closed_form;
    return kappa_quadrature(pot, rel_tol);
}

double pair_strength_quadrature(const PairPotential& pot, double rel_tol) {
    if (!pot.grad_hat_abs) throw AssumptionError("pair potential carries no Fourier data");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    const auto integrand = [&](double r1, double r2) {
        return (std::abs(r1) + std::abs(r2)) * pot.grad_hat_abs(r1, r2);
    };

    double previous = -1.0;
    for (double R = 8.0; R <= 4096.0; R *= 2.0) {
        const auto outer = [&](double r1) {
            return panel_simpson([&](double r2) { return integrand(r1, r2); }, -R, R,
                                 rel_tol * 1e-4 + 1e-14, 8);
        };
        const double total = panel_simpson(outer, -R, R, rel_tol * 1e-2 + 1e-12, 8);
        if (previous >= 0.0 && std::abs(total - previous) <= rel_tol * std::max(total, 1e-300))
            return total;
        previous = total;
    }
    throw AssumptionError("pair strength integral did not settle; divergent Fourier data");
}

double resolve_pair_strength(const PairPotential& pot, double rel_tol) {
    if (pot.strength_closed_form >= 0.0) return pot.strength_closed_form;
    return pair_strength_quadrature(pot, rel_tol);
}

}  // namespace lrl
