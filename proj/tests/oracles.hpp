#pragma once

// Independent numerical oracles used only by the test suite. Nothing here
// may call back into the integration or kernel paths it is checking.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "lrl/harmonic.hpp"
#include "lrl/lattice.hpp"

namespace lrl::testing {

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Adaptive Cash-Karp RK4(5) with PI-free halving control. Small and slow,
/// but entirely independent of the library's integrators.
inline Eigen::VectorXd integrate_adaptive(const Rhs& rhs, Eigen::VectorXd y, double t0, double t1,
                                          double tol) {
    static constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0, a6 = 7.0 / 8;
    static constexpr double b21 = 1.0 / 5;
    static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                            b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                            c6 = 512.0 / 1771;
    static constexpr double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                            d5 = 277.0 / 14336, d6 = 1.0 / 4;

    double t = t0;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double h = dir * std::max(1e-6, std::abs(t1 - t0) / 100.0);
    int steps = 0;
    while (dir * (t1 - t) > 1e-14) {
        if (++steps > 5000000) throw std::runtime_error("oracle integrator stalled");
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        const Eigen::VectorXd k1 = rhs(t, y);
        const Eigen::VectorXd k2 = rhs(t + a2 * h, y + h * (b21 * k1));
        const Eigen::VectorXd k3 = rhs(t + a3 * h, y + h * (b31 * k1 + b32 * k2));
        const Eigen::VectorXd k4 = rhs(t + a4 * h, y + h * (b41 * k1 + b42 * k2 + b43 * k3));
        const Eigen::VectorXd k5 =
            rhs(t + a5 * h, y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
        const Eigen::VectorXd k6 =
            rhs(t + a6 * h, y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
        const Eigen::VectorXd y5 = y + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
        const Eigen::VectorXd y4 =
            y + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        const double err = (y5 - y4).cwiseAbs().maxCoeff() /
                           (tol * (1.0 + y.cwiseAbs().maxCoeff()));
        if (err <= 1.0) {
            t += h;
            y = y5;
            h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
        }
    }
    return y;
}

/// Right-hand side of Hamilton's equations for the harmonic chain, written
/// from scratch (qdot = 2p, pdot = -2 w^2 q - 2 sum_j l_j (2q - q_+ - q_-)).
inline Rhs harmonic_rhs(const TorusLattice& lat, const HarmonicParams& params) {
    return [&lat, params](double, const Eigen::VectorXd& y) {
        const auto n = static_cast<Eigen::Index>(lat.size());
        Eigen::VectorXd dy(2 * n);
        for (Eigen::Index x = 0; x < n; ++x) {
            dy(x) = 2.0 * y(n + x);
            double acc = -2.0 * params.omega * params.omega * y(x);
            for (int j = 0; j < lat.nu(); ++j) {
                const auto xp = lat.neighbor(static_cast<SiteIndex>(x), j, +1);
                const auto xm = lat.neighbor(static_cast<SiteIndex>(x), j, -1);
                acc -= 2.0 * params.lambda[j] * (2.0 * y(x) - y(xp) - y(xm));
            }
            dy(n + x) = acc;
        }
        return dy;
    };
}

/// Kernel values by brute-force long double evaluation of the complex
/// Fourier sums of the defining equations (no symmetrization).
inline long double kernel_oracle(const TorusLattice& lat, const HarmonicParams& params, int m,
                                 double t, SiteIndex x) {
    const long double pi = 3.14159265358979323846264338327950288L;
    std::complex<long double> acc{0.0L, 0.0L};
    for (SiteIndex k = 0; k < lat.size(); ++k) {
        const auto kc = lat.site(k);
        const auto xc = lat.site(x);
        long double phase = 0.0L, gamma2 = params.omega * params.omega;
        for (int j = 0; j < lat.nu(); ++j) {
            const long double kj = pi * kc[j] / lat.half_side();
            phase += kj * xc[j];
            const long double s = std::sin(kj / 2.0L);
            gamma2 += 4.0L * static_cast<long double>(params.lambda[j]) * s * s;
        }
        const long double gamma = std::sqrt(gamma2);
        const std::complex<long double> wave =
            std::exp(std::complex<long double>(0.0L, phase - 2.0L * gamma * t));
        if (m == 0) {
            acc += wave;
        } else if (m == 1) {
            acc += gamma * wave;
        } else {
            if (gamma < 1e-15L) {
                acc += std::complex<long double>(0.0L, -2.0L * t) *
                       std::exp(std::complex<long double>(0.0L, phase));
            } else {
                acc += wave / gamma;
            }
        }
    }
    acc /= static_cast<long double>(lat.size());
    return m == 0 ? acc.real() : acc.imag();
}

}  // namespace lrl::testing
