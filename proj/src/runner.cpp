#include "lrl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "lrl/bounds.hpp"
#include "lrl/errors.hpp"
#include "lrl/format.hpp"
#include "lrl/observables.hpp"
#include "lrl/rng.hpp"

namespace lrl {

namespace {

// Worker pool over independent jobs. Results are whatever fn writes by
// index; errors are collected per job and the lowest-index one rethrown,
// so failures are reported deterministically.
void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int workers =
        std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

std::string site_label(const TorusLattice& lat, SiteIndex s) {
    std::string out;
    const auto coords = lat.site(s);
    for (int j = 0; j < lat.nu(); ++j) {
        if (j) out += ':';
        out += std::to_string(coords[j]);
    }
    return out;
}

int support_distance(const TorusLattice& lat, const std::vector<SiteIndex>& X,
                     const std::vector<SiteIndex>& Y) {
    int d = std::numeric_limits<int>::max();
    for (SiteIndex x : X)
        for (SiteIndex y : Y) d = std::min(d, lat.distance(x, y));
    return d;
}

PhasePoint draw_phase_point(Xoshiro256pp& rng, SiteIndex n, double amplitude) {
    PhasePoint x = PhasePoint::zero(n);
    for (SiteIndex s = 0; s < n; ++s) x.q(s) = rng.uniform(-amplitude, amplitude);
    for (SiteIndex s = 0; s < n; ++s) x.p(s) = rng.uniform(-amplitude, amplitude);
    return x;
}

}  // namespace

RunSummary run_kernels(const ExperimentConfig& cfg, std::ostream& csv) {
    const TorusLattice lat = cfg.make_lattice();
    const HarmonicSolver solver(lat, cfg.harmonic());
    const std::vector<double> ts = cfg.schedule();

    std::vector<std::string> blocks(ts.size());
    std::vector<char> block_pass(ts.size(), 1);
    parallel_for(static_cast<int>(ts.size()), [&](int it) {
        const KernelSet ks = solver.kernels(ts[it]);
        const KernelDecayReport rep = solver.kernel_decay_report(ks, cfg.mu);
        std::string out;
        for (const KernelDecayRow& row : rep.rows) {
            out += format_number(ts[it]);
            out += ',';
            out += site_label(lat, row.site);
            out += ',';
            out += format_number(ks.h_minus1(row.site));
            out += ',';
            out += format_number(ks.h_0(row.site));
            out += ',';
            out += format_number(ks.h_plus1(row.site));
            for (int m = 0; m < 3; ++m) {
                out += ',';
                out += format_number(row.margin[m]);
            }
            out += '\n';
        }
        blocks[it] = std::move(out);
        block_pass[it] = rep.all_pass ? 1 : 0;
    });

    csv << "t,x,h_minus1,h_0,h_plus1,margin_minus1,margin_0,margin_plus1\n";
    RunSummary summary;
    for (std::size_t it = 0; it < ts.size(); ++it) {
        csv << blocks[it];
        summary.rows += lat.size();
        summary.all_pass = summary.all_pass && block_pass[it];
    }
    return summary;
}

namespace {

struct SweepRow {
    double t;
    int d_xy;
    double measured;
    double envelope;
};

void write_sweep_rows(std::ostream& csv, const std::vector<SweepRow>& rows, double abs_tol,
                      RunSummary& summary) {
    csv << "t,d_XY,measured,envelope,margin,pass\n";
    for (const SweepRow& row : rows) {
        const double margin = row.envelope - row.measured;
        const bool pass = margin >= -abs_tol;
        csv << format_number(row.t) << ',' << row.d_xy << ',' << format_number(row.measured)
            << ',' << format_number(row.envelope) << ',' << format_number(margin) << ','
            << (pass ? "true" : "false") << '\n';
        ++summary.rows;
        summary.all_pass = summary.all_pass && pass;
    }
}

// Sampled sweep body shared by the anharmonic and multisite modes: every
// initial condition is integrated once through the whole schedule (tangent
// carried along), and each schedule point contributes the bracket drawn from
// the recorded tangent blocks. The recorded quantity is a sampled lower
// bound on the sup norm, labeled "measured" in the CSV.
std::vector<std::vector<double>> sampled_bracket_magnitudes(const ExperimentConfig& cfg,
                                                            const AnharmonicSystem& sys) {
    const std::vector<double> ts = cfg.schedule();
    const WeylGenerator f = cfg.f();
    const WeylGenerator g = cfg.g();
    const SiteIndex n = sys.lattice.size();

    std::vector<int> forward, backward;  // schedule indices by sign of t
    for (int i = 0; i < static_cast<int>(ts.size()); ++i)
        (ts[i] >= 0.0 ? forward : backward).push_back(i);
    std::sort(backward.rbegin(), backward.rend());  // toward more negative t

    Xoshiro256pp rng(cfg.seed);
    std::vector<PhasePoint> initials;
    initials.reserve(cfg.count);
    for (int i = 0; i < cfg.count; ++i)
        initials.push_back(draw_phase_point(rng, n, cfg.sample_amplitude));

    std::vector<std::vector<double>> magnitudes(cfg.count,
                                                std::vector<double>(ts.size(), 0.0));
    parallel_for(cfg.count, [&](int ic) {
        const auto run_direction = [&](const std::vector<int>& order) {
            if (order.empty()) return;
            LeapfrogStepper stepper(sys, initials[ic], /*with_tangent=*/true);
            for (int idx : order) {
                stepper.advance_to(ts[idx], cfg.dt);
                const FlowWithTangent snapshot{stepper.state(), stepper.tangent()};
                magnitudes[ic][idx] =
                    std::abs(bracket_from_tangent(sys, f, g, snapshot, initials[ic]));
            }
        };
        run_direction(forward);
        run_direction(backward);
    });
    return magnitudes;
}

}  // namespace

RunSummary run_sweep(const ExperimentConfig& cfg, SweepMode mode, std::ostream& csv) {
    const TorusLattice lat = cfg.make_lattice();
    const WeylGenerator f = cfg.f();
    const WeylGenerator g = cfg.g();
    const std::vector<double> ts = cfg.schedule();
    const double norm_product = f.norm_inf() * g.norm_inf();
    const double cardinality = static_cast<double>(std::min(f.sites.size(), g.sites.size()));
    const int d_xy = support_distance(lat, cfg.f_support, cfg.g_support);

    RunSummary summary;
    if (mode == SweepMode::harmonic) {
        const HarmonicSolver solver(lat, cfg.harmonic());
        std::vector<SweepRow> rows(ts.size());
        parallel_for(static_cast<int>(ts.size()), [&](int it) {
            const double measured = harmonic_bracket_norm(solver, f, g, ts[it]);
            const double envelope = harmonic_envelope(lat, cfg.harmonic(), cfg.f_support,
                                                      cfg.g_support, ts[it], cfg.mu,
                                                      HarmonicEnvelopeVariant::weyl) *
                                    norm_product * cardinality;
            rows[it] = {ts[it], d_xy, measured, envelope};
        });
        write_sweep_rows(csv, rows, cfg.abs_tol, summary);
        return summary;
    }

    if (mode == SweepMode::anharmonic && cfg.kind != PotentialKind::gaussian_site)
        throw ConfigError("sweep --mode anharmonic needs potential.kind = gaussian_site");
    if (mode == SweepMode::multisite && cfg.kind != PotentialKind::gaussian_pair)
        throw ConfigError("sweep --mode multisite needs potential.kind = gaussian_pair");

    const AnharmonicSystem sys = cfg.make_system();

    std::vector<double> envelopes(ts.size());
    if (mode == SweepMode::anharmonic) {
        for (std::size_t it = 0; it < ts.size(); ++it)
            envelopes[it] = anharmonic_envelope(lat, cfg.harmonic(), *sys.site, cfg.f_support,
                                                cfg.g_support, ts[it], cfg.mu, cfg.epsilon) *
                            norm_product * cardinality;
    } else {
        const AssumptionConstants constants = assumption_constants(sys);
        for (std::size_t it = 0; it < ts.size(); ++it)
            envelopes[it] = multisite_envelope(lat, cfg.harmonic(), constants, cfg.f_support,
                                               cfg.g_support, ts[it], cfg.epsilon) *
                            norm_product * cardinality;
    }

    try {
        const auto magnitudes = sampled_bracket_magnitudes(cfg, sys);
        std::vector<SweepRow> rows(ts.size());
        for (std::size_t it = 0; it < ts.size(); ++it) {
            double measured = 0.0;
            for (int ic = 0; ic < cfg.count; ++ic)
                measured = std::max(measured, magnitudes[ic][it]);
            rows[it] = {ts[it], d_xy, measured, envelopes[it]};
        }
        write_sweep_rows(csv, rows, cfg.abs_tol, summary);
    } catch (const DivergenceError& err) {
        // Diagnostic row, then surface the failure to the caller.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        csv << "t,d_XY,measured,envelope,margin,pass\n";
        csv << format_number(err.time()) << ',' << d_xy << ',' << format_number(nan) << ','
            << format_number(nan) << ',' << format_number(nan) << ",false\n";
        csv.flush();
        throw;
    }
    return summary;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

class CheckReporter {
  public:
    explicit CheckReporter(std::ostream& out) : out_(out) {}

    void run(const char* name, const std::function<std::pair<bool, std::string>()>& fn) {
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        out_ << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) out_ << "  (" << detail << ")";
        out_ << '\n';
        all_ = all_ && ok;
    }

    bool all() const noexcept { return all_; }

  private:
    std::ostream& out_;
    bool all_ = true;
};

double max_abs_diff(const PhasePoint& a, const PhasePoint& b) {
    return std::max((a.q - b.q).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff());
}

// Small overlapping-generator pair (the configured f and g usually have
// disjoint supports, which makes the Weyl-relation checks vacuous).
std::pair<WeylGenerator, WeylGenerator> overlapping_pair(const TorusLattice& lat,
                                                         std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    const SiteIndex a = static_cast<SiteIndex>(rng.next() % lat.size());
    const SiteIndex b = static_cast<SiteIndex>(rng.next() % lat.size());
    WeylGenerator f, g;
    f.sites = {a};
    f.values = {{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
    if (b != a) {
        f.sites.push_back(b);
        f.values.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    g.sites = {a};
    g.values = {{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
    std::vector<std::size_t> order(f.sites.size());
    if (f.sites.size() == 2 && f.sites[0] > f.sites[1]) {
        std::swap(f.sites[0], f.sites[1]);
        std::swap(f.values[0], f.values[1]);
    }
    return {f, g};
}

}  // namespace

bool run_verify(const ExperimentConfig& cfg, std::ostream& report) {
    const TorusLattice lat = cfg.make_lattice();
    const HarmonicParams params = cfg.harmonic();
    const HarmonicSolver solver(lat, params);
    const AnharmonicSystem sys = cfg.make_system();
    const SiteIndex n = lat.size();
    const double c = params.coupling();

    std::istringstream echo(cfg.echo());
    std::string line;
    while (std::getline(echo, line)) report << "# " << line << '\n';

    CheckReporter checks(report);

    checks.run("torus_metric", [&]() -> std::pair<bool, std::string> {
        bool ok = true;
        for (SiteIndex x = 0; x < n && ok; ++x) {
            ok = ok && lat.distance(x, x) == 0;
            for (SiteIndex y = 0; y < n && ok; ++y) {
                const int d = lat.distance(x, y);
                ok = ok && d == lat.distance(y, x) && d <= lat.nu() * lat.half_side() &&
                     (d > 0 || x == y);
            }
        }
        Xoshiro256pp rng(cfg.seed + 1);
        const int triples = n <= 64 ? n * n * n : 20000;
        for (int i = 0; i < triples && ok; ++i) {
            SiteIndex x, y, z;
            if (n <= 64) {
                x = static_cast<SiteIndex>(i / (n * n));
                y = static_cast<SiteIndex>((i / n) % n);
                z = static_cast<SiteIndex>(i % n);
            } else {
                x = static_cast<SiteIndex>(rng.next() % n);
                y = static_cast<SiteIndex>(rng.next() % n);
                z = static_cast<SiteIndex>(rng.next() % n);
            }
            ok = ok && lat.distance(x, z) <= lat.distance(x, y) + lat.distance(y, z);
        }
        return {ok, std::to_string(n) + " sites"};
    });

    checks.run("f_convolution", [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        Xoshiro256pp rng(cfg.seed + 2);
        for (const double mu : {0.0, 0.5, 1.0, 2.0}) {
            const DecayProfile profile(mu, lat.nu());
            const int pairs = n <= 64 ? n * n : 4096;
            for (int i = 0; i < pairs; ++i) {
                SiteIndex x, y;
                if (n <= 64) {
                    x = static_cast<SiteIndex>(i / n);
                    y = static_cast<SiteIndex>(i % n);
                } else {
                    x = static_cast<SiteIndex>(rng.next() % n);
                    y = static_cast<SiteIndex>(rng.next() % n);
                }
                const ConvolutionCheck chk = verify_f_convolution(lat, profile, x, y);
                worst = std::max(worst, chk.lhs / chk.rhs);
                if (!chk.pass) return {false, "violated at mu = " + format_number(mu)};
            }
        }
        return {true, "worst lhs/rhs = " + format_number(worst)};
    });

    checks.run("kernel_identities", [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        for (const double t : {0.25, 0.7, 1.3}) {
            const KernelSet plus = solver.kernels(t);
            const KernelSet minus = solver.kernels(-t);
            worst = std::max(worst, (plus.h_0 - minus.h_0).cwiseAbs().maxCoeff());
            worst = std::max(worst, (plus.h_minus1 + minus.h_minus1).cwiseAbs().maxCoeff());
            worst = std::max(worst, (plus.h_plus1 + minus.h_plus1).cwiseAbs().maxCoeff());
            if (worst > 1e-12) return {false, "time parity residual " + format_number(worst)};

            for (SiteIndex x = 0; x < n; ++x) {
                const SiteIndex r = lat.reflect(x);
                worst = std::max(worst, std::abs(plus.h_0(x) - plus.h_0(r)));
            }
            if (worst > 1e-12) return {false, "evenness residual " + format_number(worst)};

            // dh^{(-1)}/dt = -2 h^{(0)}, dh^{(0)}/dt = 2 h^{(1)}
            const double fd = 1e-5;
            const KernelSet hi = solver.kernels(t + fd);
            const KernelSet lo = solver.kernels(t - fd);
            const Eigen::VectorXd dm = (hi.h_minus1 - lo.h_minus1) / (2.0 * fd);
            const Eigen::VectorXd d0 = (hi.h_0 - lo.h_0) / (2.0 * fd);
            const double ode_res =
                std::max((dm + 2.0 * plus.h_0).cwiseAbs().maxCoeff(),
                         (d0 - 2.0 * plus.h_plus1).cwiseAbs().maxCoeff());
            if (ode_res > 1e-6) return {false, "kernel ODE residual " + format_number(ode_res)};

            const double sum_res =
                std::abs(plus.h_0.sum() - std::cos(2.0 * params.omega * t));
            if (sum_res > 1e-10) return {false, "sum rule residual " + format_number(sum_res)};
        }
        return {true, "parity/evenness residual <= " + format_number(worst)};
    });

    checks.run("kernel_decay", [&]() -> std::pair<bool, std::string> {
        double min_margin = std::numeric_limits<double>::infinity();
        const double t_hi = cfg.t_max > 0.0 ? cfg.t_max : 1.0;
        for (const double t : {0.0, 0.5 * t_hi, t_hi}) {
            const KernelDecayReport rep = solver.kernel_decay_report(t, cfg.mu);
            min_margin = std::min(min_margin, rep.min_margin);
            if (!rep.all_pass) return {false, "margin " + format_number(rep.min_margin)};
        }
        return {true, "min margin " + format_number(min_margin)};
    });

    checks.run("flow_group_law", [&]() -> std::pair<bool, std::string> {
        Xoshiro256pp rng(cfg.seed + 3);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const PhasePoint once = solver.flow(x0, 0.75);
            const PhasePoint twice = solver.flow(solver.flow(x0, 0.4), 0.35);
            worst = std::max(worst, max_abs_diff(once, twice));
        }
        return {worst <= 1e-9, "max residual " + format_number(worst)};
    });

    checks.run("harmonic_energy_conservation", [&]() -> std::pair<bool, std::string> {
        Xoshiro256pp rng(cfg.seed + 4);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const double e0 = harmonic_energy(lat, params, x0);
            const double e1 = harmonic_energy(lat, params, solver.flow(x0, 1.0));
            worst = std::max(worst, std::abs(e1 - e0) / std::max(1.0, std::abs(e0)));
        }
        return {worst <= 1e-9, "max relative drift " + format_number(worst)};
    });

    checks.run("weyl_evolution", [&]() -> std::pair<bool, std::string> {
        Xoshiro256pp rng(cfg.seed + 5);
        const WeylGenerator f = cfg.f();
        const double t = 0.5;
        const WeylGenerator ft = solver.evolve_weyl(f, t);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            worst = std::max(worst,
                             std::abs(weyl_eval(ft, x0) - weyl_eval(f, solver.flow(x0, t))));
        }
        return {worst <= 1e-9, "max residual " + format_number(worst)};
    });

    checks.run("weyl_relation_fd", [&]() -> std::pair<bool, std::string> {
        const auto [f, g] = overlapping_pair(lat, cfg.seed + 6);
        SmoothObservable A = make_weyl_observable(f);
        SmoothObservable B = make_weyl_observable(g);
        A.grad_q = A.grad_p = nullptr;  // force the finite-difference path
        B.grad_q = B.grad_p = nullptr;
        const WeylBracket exact = poisson_bracket_weyl(f, g);
        Xoshiro256pp rng(cfg.seed + 7);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const Complex fd = poisson_bracket_numeric(A, B, x0, 1e-4);
            worst = std::max(worst, std::abs(fd - exact.eval(x0)));
        }
        return {worst <= 1e-6, "max residual " + format_number(worst)};
    });

    const double t_span = std::min(2.0, std::max(cfg.t_max, 0.5));

    checks.run("energy_conservation_integrated", [&]() -> std::pair<bool, std::string> {
        // leapfrog drift scales with (2 c dt)^2; absurd dt must fail here
        const double tol = 1e-8 + 2.0 * (2.0 * c * cfg.dt) * (2.0 * c * cfg.dt);
        Xoshiro256pp rng(cfg.seed + 8);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const double e0 = hamiltonian_eval(sys, x0);
            const PhasePoint xt = integrate_flow(sys, x0, t_span, cfg.dt);
            const double e1 = hamiltonian_eval(sys, xt);
            worst = std::max(worst, std::abs(e1 - e0) / std::max(1.0, std::abs(e0)));
        }
        return {worst <= tol,
                "max relative drift " + format_number(worst) + ", tol " + format_number(tol)};
    });

    checks.run("leapfrog_reversibility", [&]() -> std::pair<bool, std::string> {
        Xoshiro256pp rng(cfg.seed + 9);
        const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
        PhasePoint there = integrate_flow(sys, x0, 0.7, cfg.dt);
        LeapfrogStepper back(sys, there, false);
        back.advance_to(-0.7, cfg.dt);  // relative span back to t = 0
        const double residual = max_abs_diff(back.state(), x0);
        return {residual <= 1e-8, "return residual " + format_number(residual)};
    });

    checks.run("symplecticity", [&]() -> std::pair<bool, std::string> {
        if (n > 256) return {true, "skipped (lattice too large for the dense check)"};
        Xoshiro256pp rng(cfg.seed + 10);
        const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
        const TangentFlow tf = integrate_tangent(sys, x0, 0.5, cfg.dt);
        Eigen::MatrixXd jac(2 * n, 2 * n);
        jac.topLeftCorner(n, n) = tf.dq_dq0;
        jac.topRightCorner(n, n) = tf.dq_dp0;
        jac.bottomLeftCorner(n, n) = tf.dp_dq0;
        jac.bottomRightCorner(n, n) = tf.dp_dp0;
        Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        omega.topRightCorner(n, n).setIdentity();
        omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
        const double residual = (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
        return {residual <= 1e-6, "max |J^T O J - O| = " + format_number(residual)};
    });

    checks.run("tangent_vs_finite_difference", [&]() -> std::pair<bool, std::string> {
        if (n > 64) return {true, "skipped (lattice too large for the dense check)"};
        Xoshiro256pp rng(cfg.seed + 11);
        const PhasePoint x0 = draw_phase_point(rng, n, 2.0);
        const double t = 0.5, fd = 1e-5;
        const TangentFlow tf = integrate_tangent(sys, x0, t, cfg.dt);
        double worst = 0.0;
        for (int rep = 0; rep < 2; ++rep) {
            const SiteIndex y = static_cast<SiteIndex>(rng.next() % n);
            for (const bool momentum : {false, true}) {
                PhasePoint hi = x0, lo = x0;
                (momentum ? hi.p(y) : hi.q(y)) += fd;
                (momentum ? lo.p(y) : lo.q(y)) -= fd;
                const PhasePoint fhi = integrate_flow(sys, hi, t, cfg.dt);
                const PhasePoint flo = integrate_flow(sys, lo, t, cfg.dt);
                for (SiteIndex x = 0; x < n; ++x) {
                    const double dq = (fhi.q(x) - flo.q(x)) / (2.0 * fd);
                    const double dp = (fhi.p(x) - flo.p(x)) / (2.0 * fd);
                    const double ref_q = momentum ? tf.dq_dp0(x, y) : tf.dq_dq0(x, y);
                    const double ref_p = momentum ? tf.dp_dp0(x, y) : tf.dp_dq0(x, y);
                    worst = std::max({worst, std::abs(dq - ref_q), std::abs(dp - ref_p)});
                }
            }
        }
        return {worst <= 1e-4, "max entry error " + format_number(worst)};
    });

    const AssumptionConstants constants = assumption_constants(sys);

    checks.run("lemma_solution_bound", [&]() -> std::pair<bool, std::string> {
        Xoshiro256pp rng(cfg.seed + 12);
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const SolutionBound sb = apriori_solution_bound(sys, constants, x0);
            LeapfrogStepper stepper(sys, x0, false);
            for (double t = 0.0; t <= t_span + 1e-12; t += t_span / 8.0) {
                stepper.advance_to(t, cfg.dt);
                const double peak = std::max(stepper.state().q.cwiseAbs().maxCoeff(),
                                             stepper.state().p.cwiseAbs().maxCoeff());
                const double bound = sb.k1 * std::exp(sb.k2 * t);
                worst = std::max(worst, peak - bound);
                if (peak > bound * (1.0 + 1e-9))
                    return {false, "violated at t = " + format_number(t)};
            }
        }
        return {true, "max (peak - bound) = " + format_number(worst)};
    });

    checks.run("lemma_jacobian_bound", [&]() -> std::pair<bool, std::string> {
        if (n > 256) return {true, "skipped (lattice too large for the dense check)"};
        Xoshiro256pp rng(cfg.seed + 13);
        const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
        for (const double t : {0.5, 1.0}) {
            const TangentFlow tf = integrate_tangent(sys, x0, t, cfg.dt);
            const JacobianBound jb = jacobian_bound(sys, constants, t);
            const double q_peak = std::max(tf.dq_dq0.cwiseAbs().maxCoeff(),
                                           tf.dq_dp0.cwiseAbs().maxCoeff());
            const double p_peak = std::max(tf.dp_dq0.cwiseAbs().maxCoeff(),
                                           tf.dp_dp0.cwiseAbs().maxCoeff());
            if (q_peak > jb.q_rows * (1.0 + 1e-9) || p_peak > jb.p_rows * (1.0 + 1e-9))
                return {false, "violated at t = " + format_number(t)};
        }
        return {true, {}};
    });

    checks.run("lemma_bracket_bound", [&]() -> std::pair<bool, std::string> {
        const auto [f, g] = overlapping_pair(lat, cfg.seed + 14);
        Xoshiro256pp rng(cfg.seed + 15);
        for (int i = 0; i < 5; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            for (const double t : {0.5, 1.0}) {
                const double value = std::abs(bracket_pointwise(sys, f, g, x0, t, cfg.dt));
                const double bound = bracket_apriori_bound(sys, constants, f, g, t);
                if (value > bound * (1.0 + 1e-9))
                    return {false, "violated at t = " + format_number(t)};
            }
        }
        return {true, {}};
    });

    checks.run("bracket_weyl_t0", [&]() -> std::pair<bool, std::string> {
        const auto [f, g] = overlapping_pair(lat, cfg.seed + 16);
        const WeylBracket exact = poisson_bracket_weyl(f, g);
        Xoshiro256pp rng(cfg.seed + 17);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const PhasePoint x0 = draw_phase_point(rng, n, cfg.sample_amplitude);
            const Complex value = bracket_pointwise(sys, f, g, x0, 0.0, cfg.dt);
            worst = std::max(worst, std::abs(value - exact.eval(x0)));
        }
        return {worst <= 1e-10, "max residual " + format_number(worst)};
    });

    report << (checks.all() ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n");
    return checks.all();
}

// ---------------------------------------------------------------------------
// bounds report
// ---------------------------------------------------------------------------

void run_bounds(const ExperimentConfig& cfg, std::ostream& report) {
    const HarmonicParams params = cfg.harmonic();
    const double rate = cfg.mu + cfg.epsilon;
    const double sup_factor = decay_sup_factor(cfg.nu, cfg.epsilon);

    double kappa = 0.0;
    if (cfg.kind == PotentialKind::gaussian_site)
        kappa = kappa_v(gaussian_site_potential(cfg.amplitude, cfg.width), 1e-8);
    const EnvelopeParams env =
        make_envelope_params(cfg.nu, params, cfg.mu, cfg.epsilon, kappa, 0.0, 0.0);
    const VelocityEstimates vel = estimate_velocities(cfg.nu, params, env);
    const double prefactor = (1.0 + env.c * std::exp(rate / 2.0) + 1.0 / env.c) * sup_factor;

    std::istringstream echo(cfg.echo());
    std::string line;
    while (std::getline(echo, line)) report << "# " << line << '\n';

    report << "c_omega_lambda = " << format_number(env.c)
           << "   [sqrt(omega^2 + 4 sum_j lambda_j)]\n";
    report << "v_h(mu) = " << format_number(vel.v_h)
           << "   [c * max(2/mu, e^(mu/2+1)), mu = " << format_number(cfg.mu) << "]\n";
    report << "mu0 = " << format_number(vel.mu0) << "   [root of 2/mu = e^(mu/2+1) in (1/2, 1)]\n";
    report << "v_h(mu0) = " << format_number(vel.v_h_opt) << "   [= (2/mu0) c <= 4c]\n";
    report << "residual(mu0) = "
           << format_number(std::abs(2.0 / vel.mu0 - std::exp(vel.mu0 / 2.0 + 1.0)))
           << "   [bisection residual]\n";
    report << "C_nu = " << format_number(env.cnu)
           << "   [2^(nu+1) sum_z (1+|z|)^-(nu+1), certified truncation]\n";
    report << "C = " << format_number(prefactor)
           << "   [(1 + c e^((mu+eps)/2) + 1/c) sup_s (1+s)^(nu+1) e^(-eps s)]\n";
    report << "kappa_V = " << format_number(env.kappa)
           << "   [int |r| |hat(V')(r)| dr; 0 without a site potential]\n";
    report << "delta = " << format_number(vel.delta)
           << "   [(mu+eps) v_h(mu+eps) + C C_nu kappa_V]\n";
    report << "v_ah = " << format_number(vel.v_ah)
           << "   [(1 + eps/mu) v_h(mu+eps) + C C_nu kappa_V / mu]\n";

    if (cfg.kind == PotentialKind::gaussian_pair) {
        const AnharmonicSystem sys = cfg.make_system();
        const AssumptionConstants constants = assumption_constants(sys);
        const double rate3 = constants.mu3 + cfg.epsilon;
        const double pre3 = (1.0 + env.c * std::exp(rate3 / 2.0) + 1.0 / env.c) *
                            decay_sup_factor(cfg.nu, cfg.epsilon);
        report << "C_3 = " << format_number(constants.c3)
               << "   [pair Fourier strength times Z^nu weight sum]\n";
        report << "mu_3 = " << format_number(constants.mu3) << "   [pair weight rate]\n";
        const double delta3 =
            rate3 * harmonic_velocity(rate3, params) + pre3 * constants.c3 * env.cnu * env.cnu;
        report << "delta_ms = " << format_number(delta3)
               << "   [(mu3+eps) v_h(mu3+eps) + C C_3 C_nu^2]\n";
        if (constants.mu3 > 0.0) {
            report << "v_ah_ms = "
                   << format_number(anharmonic_velocity(constants.mu3, cfg.epsilon, params,
                                                        constants.c3, VelocityMode::multi_site))
                   << "   [(1 + eps/mu3) v_h(mu3+eps) + C C_3 C_nu^2 / mu3]\n";
        } else {
            report << "v_ah_ms = none   [mu3 = 0: polynomial interaction decay]\n";
        }
    }
}

}  // namespace lrl
