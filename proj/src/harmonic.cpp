#include "lrl/harmonic.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace lrl {

namespace {

// sin(2 gamma t) / gamma with the gamma -> 0 limit 2t. Zero modes are exact
// zeros of the dispersion (omega = 0), so a plain threshold is enough.
double sinc_term(double gamma, double t) {
    if (gamma < 1e-12) return 2.0 * t;
    return std::sin(2.0 * gamma * t) / gamma;
}

}  // namespace

double HarmonicParams::coupling() const {
    return std::sqrt(omega * omega + 4.0 * lambda_sum());
}

void HarmonicParams::validate(int nu) const {
    if (!(omega >= 0.0)) throw std::invalid_argument("omega must be nonnegative");
    if (static_cast<int>(lambda.size()) != nu)
        throw std::invalid_argument("lambda must have one coupling per lattice dimension");
    for (double l : lambda)
        if (!(l >= 0.0)) throw std::invalid_argument("couplings lambda_j must be nonnegative");
}

double dispersion(const HarmonicParams& params, std::span<const double> k) {
    double s = params.omega * params.omega;
    for (std::size_t j = 0; j < k.size(); ++j) {
        const double sj = std::sin(0.5 * k[j]);
        s += 4.0 * params.lambda[j] * sj * sj;
    }
    return std::sqrt(s);
}

SpectralTable SpectralTable::build(const TorusLattice& lat, const HarmonicParams& params) {
    const SiteIndex n = lat.size();
    SpectralTable table;
    table.kgrid.resize(n, lat.nu());
    table.gamma.resize(n);
    const double step = M_PI / lat.half_side();
    std::vector<double> k(lat.nu());
    for (SiteIndex i = 0; i < n; ++i) {
        const auto coords = lat.site(i);
        for (int j = 0; j < lat.nu(); ++j) {
            k[j] = step * coords[j];
            table.kgrid(i, j) = k[j];
        }
        table.gamma(i) = dispersion(params, k);
    }
    return table;
}

HarmonicSolver::HarmonicSolver(const TorusLattice& lat, HarmonicParams params)
    : lat_(lat), params_(std::move(params)) {
    params_.validate(lat_.nu());
    table_ = SpectralTable::build(lat_, params_);
}

// The finite Fourier sums of the kernels, written in their even form.
// Pairing k with -k removes the sin(k.x) component exactly (gamma is even
// under the reflection convention), leaving
//   h^{(0)}(x)  =  (1/N) sum_k cos(k.x) cos(2 gamma t)
//   h^{(-1)}(x) = -(1/N) sum_k cos(k.x) sin(2 gamma t)/gamma
//   h^{(1)}(x)  = -(1/N) sum_k cos(k.x) gamma sin(2 gamma t)
// which is manifestly real and even in x. The omega = 0 zero mode enters
// h^{(-1)} through the sin(2 gamma t)/gamma -> 2t limit, i.e. as -2t/N.
KernelSet HarmonicSolver::kernels(double t) const {
    const SiteIndex n = lat_.size();
    KernelSet ks;
    ks.t = t;
    ks.h_minus1.setZero(n);
    ks.h_0.setZero(n);
    ks.h_plus1.setZero(n);

    Eigen::VectorXd cos_term(n), sinc(n), gsin(n);
    for (SiteIndex k = 0; k < n; ++k) {
        const double g = table_.gamma(k);
        cos_term(k) = std::cos(2.0 * g * t);
        sinc(k) = sinc_term(g, t);
        gsin(k) = g * std::sin(2.0 * g * t);
    }

    const int nu = lat_.nu();
    for (SiteIndex x = 0; x < n; ++x) {
        const auto coords = lat_.site(x);
        double h0 = 0.0, hm = 0.0, hp = 0.0;
        for (SiteIndex k = 0; k < n; ++k) {
            double phase = 0.0;
            for (int j = 0; j < nu; ++j) phase += table_.kgrid(k, j) * coords[j];
            const double c = std::cos(phase);
            h0 += c * cos_term(k);
            hm -= c * sinc(k);
            hp -= c * gsin(k);
        }
        ks.h_0(x) = h0 / n;
        ks.h_minus1(x) = hm / n;
        ks.h_plus1(x) = hp / n;
    }
    if (!ks.h_0.allFinite() || !ks.h_minus1.allFinite() || !ks.h_plus1.allFinite())
        throw std::logic_error("kernel evaluation produced non-finite values");
    return ks;
}

KernelSet HarmonicSolver::kernels_fft(double t) const {
    if (lat_.nu() != 1)
        throw std::invalid_argument("kernels_fft is the nu = 1 fast path; use kernels()");
    const SiteIndex n = lat_.size();

    // Even-projected spectral symbols; the transform of each is analytically
    // real, so the imaginary residue is pure roundoff and is asserted small.
    std::vector<std::complex<double>> symbol_0(n), symbol_m(n), symbol_p(n);
    for (SiteIndex k = 0; k < n; ++k) {
        const double g = table_.gamma(k);
        symbol_0[k] = {std::cos(2.0 * g * t), 0.0};
        symbol_m[k] = {-sinc_term(g, t), 0.0};
        symbol_p[k] = {-g * std::sin(2.0 * g * t), 0.0};
    }

    // k = pi m / L at the site with coordinate m, and k.x = 2 pi m x / N:
    // reindex both sides by residues mod N and apply one backward DFT.
    std::vector<std::complex<double>> in(n), out(n);
    static std::mutex plan_mutex;  // FFTW planning is not thread safe
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }

    KernelSet ks;
    ks.t = t;
    ks.h_minus1.resize(n);
    ks.h_0.resize(n);
    ks.h_plus1.resize(n);

    const auto run = [&](const std::vector<std::complex<double>>& symbol, Eigen::VectorXd& h) {
        for (SiteIndex k = 0; k < n; ++k) {
            const int m = ((lat_.site(k)[0] % n) + n) % n;
            in[m] = symbol[k];
        }
        fftw_execute(plan);
        for (SiteIndex x = 0; x < n; ++x) {
            const int m = ((lat_.site(x)[0] % n) + n) % n;
            if (std::abs(out[m].imag()) > 1e-10 * n)
                throw std::logic_error("kernel FFT: imaginary residue above 1e-10");
            h(x) = out[m].real() / n;
        }
    };
    run(symbol_0, ks.h_0);
    run(symbol_m, ks.h_minus1);
    run(symbol_p, ks.h_plus1);

    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    return ks;
}

PhasePoint HarmonicSolver::flow(const PhasePoint& x0, double t) const {
    const SiteIndex n = lat_.size();
    if (x0.q.size() != n || x0.p.size() != n)
        throw std::domain_error("phase point does not match the lattice");
    if (!x0.finite()) throw std::domain_error("phase point has non-finite entries");

    const KernelSet ks = kernels(t);
    PhasePoint out = PhasePoint::zero(n);
    for (SiteIndex x = 0; x < n; ++x) {
        double q = 0.0, p = 0.0;
        for (SiteIndex y = 0; y < n; ++y) {
            const SiteIndex d = lat_.wrap_diff(x, y);
            q += x0.q(y) * ks.h_0(d) - x0.p(y) * ks.h_minus1(d);
            p += x0.q(y) * ks.h_plus1(d) + x0.p(y) * ks.h_0(d);
        }
        out.q(x) = q;
        out.p(x) = p;
    }
    return out;
}

WeylGenerator HarmonicSolver::evolve_weyl(const WeylGenerator& f, double t) const {
    check_support(f, lat_);
    const SiteIndex n = lat_.size();
    const KernelSet ks = kernels(t);

    WeylGenerator out;
    out.sites.resize(n);
    out.values.resize(n);
    for (SiteIndex y = 0; y < n; ++y) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < f.sites.size(); ++i) {
            const SiteIndex d = lat_.wrap_diff(f.sites[i], y);
            const double fr = f.values[i].real();
            const double fi = f.values[i].imag();
            re += fr * ks.h_0(d) + fi * ks.h_plus1(d);
            im += fi * ks.h_0(d) - fr * ks.h_minus1(d);
        }
        out.sites[y] = y;
        out.values[y] = {re, im};
    }
    return out;
}

KernelDecayReport HarmonicSolver::kernel_decay_report(double t, double mu) const {
    return kernel_decay_report(kernels(t), mu);
}

KernelDecayReport HarmonicSolver::kernel_decay_report(const KernelSet& ks, double mu) const {
    if (!(mu > 0.0)) throw std::domain_error("kernel decay rate mu must be positive");
    const double t = ks.t;
    const double c = params_.coupling();
    const double vfac = std::max(2.0 / mu, std::exp(mu / 2.0 + 1.0));
    const std::array<double, 3> pref = {
        c > 0.0 ? 1.0 / c : std::numeric_limits<double>::infinity(),
        1.0,
        c * std::exp(mu / 2.0),
    };

    KernelDecayReport report;
    report.t = t;
    report.mu = mu;
    report.min_margin = std::numeric_limits<double>::infinity();
    report.rows.reserve(lat_.size());
    for (SiteIndex x = 0; x < lat_.size(); ++x) {
        KernelDecayRow row;
        row.site = x;
        const double envelope =
            std::exp(-mu * (lat_.distance_to_origin(x) - c * vfac * std::abs(t)));
        for (int m = 0; m < 3; ++m) {
            row.abs_value[m] = std::abs(ks.by_order(m - 1)(x));
            row.bound[m] = pref[m] * envelope;
            row.margin[m] = row.bound[m] - row.abs_value[m];
            report.min_margin = std::min(report.min_margin, row.margin[m]);
        }
        report.rows.push_back(row);
    }
    report.all_pass = report.min_margin >= -1e-12;
    return report;
}

double harmonic_energy(const TorusLattice& lat, const HarmonicParams& params,
                       const PhasePoint& x) {
    double h = 0.0;
    for (SiteIndex i = 0; i < lat.size(); ++i) {
        h += x.p(i) * x.p(i) + params.omega * params.omega * x.q(i) * x.q(i);
        for (int j = 0; j < lat.nu(); ++j) {
            const double dq = x.q(i) - x.q(lat.neighbor(i, j, +1));
            h += params.lambda[j] * dq * dq;
        }
    }
    return h;
}

}  // namespace lrl
