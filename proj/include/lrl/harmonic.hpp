#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "lrl/lattice.hpp"
#include "lrl/weyl.hpp"

namespace lrl {

/// Parameters of the harmonic Hamiltonian
///   H_h = sum_x p_x^2 + omega^2 q_x^2 + sum_j lambda_j (q_x - q_{x+e_j})^2.
struct HarmonicParams {
    double omega = 0.0;
    std::vector<double> lambda;

    double lambda_sum() const {
        double s = 0.0;
        for (double l : lambda) s += l;
        return s;
    }

    /// c_{omega,lambda} = sqrt(omega^2 + 4 sum_j lambda_j).
    double coupling() const;

    void validate(int nu) const;
};

/// Phase point {(q_x, p_x)} over the lattice enumeration.
struct PhasePoint {
    Eigen::VectorXd q, p;

    static PhasePoint zero(SiteIndex n) {
        return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    }

    bool finite() const { return q.allFinite() && p.allFinite(); }
};

/// Dispersion gamma(k) = sqrt(omega^2 + 4 sum_j lambda_j sin^2(k_j/2)).
double dispersion(const HarmonicParams& params, std::span<const double> k);

/// The dual grid Lambda_L^* = {x pi / L : x in Lambda_L} and gamma on it,
/// indexed by the same enumeration as the lattice sites.
struct SpectralTable {
    Eigen::MatrixXd kgrid;   // size x nu
    Eigen::VectorXd gamma;   // size

    static SpectralTable build(const TorusLattice& lat, const HarmonicParams& params);
};

/// Propagation kernels h_t^{(-1)}, h_t^{(0)}, h_t^{(1)} at one time.
struct KernelSet {
    double t = 0.0;
    Eigen::VectorXd h_minus1, h_0, h_plus1;

    const Eigen::VectorXd& by_order(int m) const {
        return m < 0 ? h_minus1 : (m == 0 ? h_0 : h_plus1);
    }
};

struct KernelDecayRow {
    SiteIndex site;
    std::array<double, 3> abs_value;  // |h^{(m)}(x)| for m = -1, 0, 1
    std::array<double, 3> bound;
    std::array<double, 3> margin;     // bound - |h|
};

struct KernelDecayReport {
    double t = 0.0;
    double mu = 0.0;
    std::vector<KernelDecayRow> rows;
    double min_margin = 0.0;
    bool all_pass = false;  // min_margin >= -1e-12
};

/// Exact spectral solution of the harmonic system on a fixed lattice.
/// The spectral table is built once; kernel evaluation, the closed-form
/// flow, and the Weyl-generator evolution all read from it. All methods
/// are const and safe to call concurrently.
class HarmonicSolver {
  public:
    HarmonicSolver(const TorusLattice& lat, HarmonicParams params);

    const TorusLattice& lattice() const noexcept { return lat_; }
    const HarmonicParams& params() const noexcept { return params_; }
    const SpectralTable& table() const noexcept { return table_; }

    /// Kernels by direct Fourier summation over Lambda_L^*. When omega = 0
    /// the zero mode of h^{(-1)} contributes -2t/|Lambda_L| and drops out of
    /// the gamma-weighted sum.
    KernelSet kernels(double t) const;

    /// FFT evaluation of the same sums (nu = 1 only). Agrees with kernels()
    /// to 1e-10; kept as the fast path for long chains.
    KernelSet kernels_fft(double t) const;

    /// Exact flow: q_x(t) = sum_y q_y(0) h_t^{(0)}(x-y) - p_y(0) h_t^{(-1)}(x-y),
    ///             p_x(t) = sum_y q_y(0) h_t^{(1)}(x-y) + p_y(0) h_t^{(0)}(x-y).
    PhasePoint flow(const PhasePoint& x0, double t) const;

    /// Evolved generator f_t with W(f_t) = W(f) o Phi_t:
    ///   Re f_t(y) = sum_x Re f(x) h^{(0)}(x-y) + Im f(x) h^{(1)}(x-y)
    ///   Im f_t(y) = sum_x Im f(x) h^{(0)}(x-y) - Re f(x) h^{(-1)}(x-y)
    WeylGenerator evolve_weyl(const WeylGenerator& f, double t) const;

    /// Compares |h_t^{(m)}(x)| against the kernel decay bound
    ///   pref_m * exp(-mu (|x| - c max(2/mu, e^{mu/2+1}) |t|)),
    /// pref = {1/c, 1, c e^{mu/2}}, at every site.
    KernelDecayReport kernel_decay_report(double t, double mu) const;
    KernelDecayReport kernel_decay_report(const KernelSet& ks, double mu) const;

  private:
    TorusLattice lat_;
    HarmonicParams params_;
    SpectralTable table_;
};

/// H_h evaluated at a phase point.
double harmonic_energy(const TorusLattice& lat, const HarmonicParams& params,
                       const PhasePoint& x);

}  // namespace lrl
