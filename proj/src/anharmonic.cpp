#include "lrl/anharmonic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lrl/errors.hpp"
#include "lrl/observables.hpp"
#include "lrl/rng.hpp"

namespace lrl {

AnharmonicSystem AnharmonicSystem::make(const TorusLattice& lat, HarmonicParams params,
                                        std::optional<SiteSitePotential> site,
                                        std::optional<PairPotential> pair) {
    params.validate(lat.nu());
    AnharmonicSystem sys{lat, std::move(params), std::move(site), std::move(pair), {}};
    if (sys.pair) {
        const DecayProfile weight(sys.pair->weight_mu, lat.nu());
        for (SiteIndex i = 0; i < lat.size(); ++i)
            for (SiteIndex j = i + 1; j < lat.size(); ++j)
                sys.bonds.push_back({i, j, weight.value(lat.distance(i, j))});
    }
    return sys;
}

namespace {

// F_x = -dU/dq_x for the configuration energy U.
Eigen::VectorXd force(const AnharmonicSystem& sys, const Eigen::VectorXd& q) {
    const TorusLattice& lat = sys.lattice;
    const double omega2 = sys.params.omega * sys.params.omega;
    Eigen::VectorXd f(q.size());
    for (SiteIndex x = 0; x < lat.size(); ++x) {
        double acc = -2.0 * omega2 * q(x);
        for (int j = 0; j < lat.nu(); ++j) {
            acc -= 2.0 * sys.params.lambda[j] *
                   (2.0 * q(x) - q(lat.neighbor(x, j, +1)) - q(lat.neighbor(x, j, -1)));
        }
        if (sys.site) acc -= sys.site->dv(q(x));
        f(x) = acc;
    }
    for (const PairBond& b : sys.bonds) {
        f(b.i) -= b.weight * sys.pair->d1(q(b.i), q(b.j));
        f(b.j) -= b.weight * sys.pair->d2(q(b.i), q(b.j));
    }
    return f;
}

}  // namespace

double hamiltonian_eval(const AnharmonicSystem& sys, const PhasePoint& x) {
    if (!x.finite()) throw std::runtime_error("phase point has non-finite entries");
    double h = harmonic_energy(sys.lattice, sys.params, x);
    if (sys.site)
        for (SiteIndex z = 0; z < sys.lattice.size(); ++z) h += sys.site->v(x.q(z));
    for (const PairBond& b : sys.bonds) h += b.weight * sys.pair->v(x.q(b.i), x.q(b.j));
    if (!std::isfinite(h)) throw std::runtime_error("Hamiltonian evaluated to a non-finite value");
    return h;
}

VectorField vector_field(const AnharmonicSystem& sys, const PhasePoint& x) {
    return {2.0 * x.p, force(sys, x.q)};
}

void add_hessian_product(const AnharmonicSystem& sys, const Eigen::VectorXd& q,
                         const Eigen::MatrixXd& in, Eigen::MatrixXd& out, double scale) {
    const TorusLattice& lat = sys.lattice;
    const double omega2 = sys.params.omega * sys.params.omega;
    const double diag_h = 2.0 * omega2 + 4.0 * sys.params.lambda_sum();
    for (SiteIndex x = 0; x < lat.size(); ++x) {
        double diag = diag_h;
        if (sys.site) diag += sys.site->d2v(q(x));
        out.row(x) += scale * diag * in.row(x);
        for (int j = 0; j < lat.nu(); ++j) {
            out.row(x) -= scale * 2.0 * sys.params.lambda[j] *
                          (in.row(lat.neighbor(x, j, +1)) + in.row(lat.neighbor(x, j, -1)));
        }
    }
    for (const PairBond& b : sys.bonds) {
        const double h11 = b.weight * sys.pair->d11(q(b.i), q(b.j));
        const double h12 = b.weight * sys.pair->d12(q(b.i), q(b.j));
        const double h22 = b.weight * sys.pair->d22(q(b.i), q(b.j));
        out.row(b.i) += scale * (h11 * in.row(b.i) + h12 * in.row(b.j));
        out.row(b.j) += scale * (h12 * in.row(b.i) + h22 * in.row(b.j));
    }
}

TangentFlow TangentFlow::identity(SiteIndex n) {
    TangentFlow tf;
    tf.dq_dq0 = Eigen::MatrixXd::Identity(n, n);
    tf.dq_dp0 = Eigen::MatrixXd::Zero(n, n);
    tf.dp_dq0 = Eigen::MatrixXd::Zero(n, n);
    tf.dp_dp0 = Eigen::MatrixXd::Identity(n, n);
    return tf;
}

LeapfrogStepper::LeapfrogStepper(const AnharmonicSystem& sys, PhasePoint x0, bool with_tangent)
    : sys_(&sys), x_(std::move(x0)), with_tangent_(with_tangent) {
    const SiteIndex n = sys.lattice.size();
    if (x_.q.size() != n || x_.p.size() != n)
        throw std::domain_error("phase point does not match the lattice");
    if (!x_.finite()) throw std::domain_error("phase point has non-finite entries");
    if (with_tangent_) {
        jq_.setZero(n, 2 * n);
        jp_.setZero(n, 2 * n);
        jq_.leftCols(n).setIdentity();
        jp_.rightCols(n).setIdentity();
    }
}

void LeapfrogStepper::step(double h) {
    // half kick
    if (with_tangent_) add_hessian_product(*sys_, x_.q, jq_, jp_, -0.5 * h);
    x_.p += 0.5 * h * force(*sys_, x_.q);
    // drift: qdot = 2p
    x_.q += 2.0 * h * x_.p;
    if (with_tangent_) jq_ += 2.0 * h * jp_;
    // half kick at the new configuration
    if (with_tangent_) add_hessian_product(*sys_, x_.q, jq_, jp_, -0.5 * h);
    x_.p += 0.5 * h * force(*sys_, x_.q);

    ++steps_done_;
    if (!x_.finite())
        throw DivergenceError("leapfrog integration diverged", steps_done_, t_ + h);
}

void LeapfrogStepper::advance_to(double t_target, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator step dt must be positive");
    const double span = t_target - t_;
    if (span == 0.0) return;
    if (std::abs(span) / dt > 1e8) throw std::invalid_argument("|t|/dt exceeds the 1e8 step cap");
    const auto n = static_cast<std::int64_t>(std::ceil(std::abs(span) / dt - 1e-9));
    const double h = span / static_cast<double>(std::max<std::int64_t>(n, 1));
    for (std::int64_t i = 0; i < n; ++i) {
        step(h);
        t_ += h;
    }
    t_ = t_target;
}

TangentFlow LeapfrogStepper::tangent() const {
    if (!with_tangent_) throw std::logic_error("stepper was constructed without tangent rows");
    const SiteIndex n = sys_->lattice.size();
    TangentFlow tf;
    tf.t = t_;
    tf.dq_dq0 = jq_.leftCols(n);
    tf.dq_dp0 = jq_.rightCols(n);
    tf.dp_dq0 = jp_.leftCols(n);
    tf.dp_dp0 = jp_.rightCols(n);
    return tf;
}

namespace {

PhasePoint integrate_rk4(const AnharmonicSystem& sys, PhasePoint x, double t, double dt) {
    if (std::abs(t) / dt > 1e8) throw std::invalid_argument("|t|/dt exceeds the 1e8 step cap");
    const auto n = static_cast<std::int64_t>(std::ceil(std::abs(t) / dt - 1e-9));
    if (n == 0) return x;
    const double h = t / static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const VectorField k1 = vector_field(sys, x);
        const VectorField k2 =
            vector_field(sys, {x.q + 0.5 * h * k1.dq, x.p + 0.5 * h * k1.dp});
        const VectorField k3 =
            vector_field(sys, {x.q + 0.5 * h * k2.dq, x.p + 0.5 * h * k2.dp});
        const VectorField k4 = vector_field(sys, {x.q + h * k3.dq, x.p + h * k3.dp});
        x.q += h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
        x.p += h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        if (!x.finite())
            throw DivergenceError("rk4 integration diverged", i + 1,
                                  static_cast<double>(i + 1) * h);
    }
    return x;
}

}  // namespace

PhasePoint integrate_flow(const AnharmonicSystem& sys, const PhasePoint& x0, double t, double dt,
                          Scheme scheme) {
    if (scheme == Scheme::rk4) {
        if (!x0.finite()) throw std::domain_error("phase point has non-finite entries");
        return integrate_rk4(sys, x0, t, dt);
    }
    LeapfrogStepper stepper(sys, x0, /*with_tangent=*/false);
    stepper.advance_to(t, dt);
    return stepper.state();
}

FlowWithTangent integrate_with_tangent(const AnharmonicSystem& sys, const PhasePoint& x0,
                                       double t, double dt) {
    LeapfrogStepper stepper(sys, x0, /*with_tangent=*/true);
    stepper.advance_to(t, dt);
    return {stepper.state(), stepper.tangent()};
}

TangentFlow integrate_tangent(const AnharmonicSystem& sys, const PhasePoint& x0, double t,
                              double dt) {
    return integrate_with_tangent(sys, x0, t, dt).tangent;
}

Complex bracket_from_tangent(const AnharmonicSystem& sys, const WeylGenerator& f,
                             const WeylGenerator& g, const FlowWithTangent& flow,
                             const PhasePoint& x0) {
    check_support(f, sys.lattice);
    check_support(g, sys.lattice);
    double contraction = 0.0;  // sum_y A_y Im g(y) - B_y Re g(y)
    for (std::size_t jg = 0; jg < g.sites.size(); ++jg) {
        const SiteIndex y = g.sites[jg];
        double a = 0.0, b = 0.0;
        for (std::size_t jf = 0; jf < f.sites.size(); ++jf) {
            const SiteIndex x = f.sites[jf];
            const double fr = f.values[jf].real();
            const double fi = f.values[jf].imag();
            a += fr * flow.tangent.dq_dq0(x, y) + fi * flow.tangent.dp_dq0(x, y);
            b += fr * flow.tangent.dq_dp0(x, y) + fi * flow.tangent.dp_dp0(x, y);
        }
        contraction += a * g.values[jg].imag() - b * g.values[jg].real();
    }
    return -contraction * weyl_eval(f, flow.state) * weyl_eval(g, x0);
}

Complex bracket_pointwise(const AnharmonicSystem& sys, const WeylGenerator& f,
                          const WeylGenerator& g, const PhasePoint& x0, double t, double dt) {
    const FlowWithTangent flow = integrate_with_tangent(sys, x0, t, dt);
    return bracket_from_tangent(sys, f, g, flow, x0);
}

namespace {

constexpr double kGridHalfwidth = 50.0;
constexpr double kGridStep = 1e-2;
constexpr int kRandomChecks = 10000;
constexpr std::uint64_t kCheckSeed = 0x5eed5eed5eed5eedULL;

// Grid maximum of |f| over [-50, 50], refined around the coarse argmax so
// the returned value sits above the true supremum; used when a sup is not
// given in closed form.
double grid_sup(const std::function<double(double)>& f) {
    double m = 0.0, at = 0.0;
    for (double q = -kGridHalfwidth; q <= kGridHalfwidth + 0.5 * kGridStep; q += kGridStep) {
        const double v = std::abs(f(q));
        if (v > m) {
            m = v;
            at = q;
        }
    }
    for (double q = at - 2.0 * kGridStep; q <= at + 2.0 * kGridStep; q += 1e-5)
        m = std::max(m, std::abs(f(q)));
    return m * (1.0 + 1e-6) + 1e-12;
}

double grid_sup2(const std::function<double(double, double)>& f) {
    constexpr double step = 0.25;
    double m = 0.0, at1 = 0.0, at2 = 0.0;
    for (double q1 = -kGridHalfwidth; q1 <= kGridHalfwidth + 0.5 * step; q1 += step)
        for (double q2 = -kGridHalfwidth; q2 <= kGridHalfwidth + 0.5 * step; q2 += step) {
            const double v = std::abs(f(q1, q2));
            if (v > m) {
                m = v;
                at1 = q1;
                at2 = q2;
            }
        }
    for (double q1 = at1 - step; q1 <= at1 + step; q1 += 2e-3)
        for (double q2 = at2 - step; q2 <= at2 + step; q2 += 2e-3)
            m = std::max(m, std::abs(f(q1, q2)));
    return m * (1.0 + 1e-5) + 1e-12;
}

void certify_site_bound(const std::function<double(double)>& f, double bound, const char* name) {
    const double allowance = bound * 1e-9 + 1e-12;
    for (double q = -kGridHalfwidth; q <= kGridHalfwidth + 0.5 * kGridStep; q += kGridStep)
        if (std::abs(f(q)) > bound + allowance)
            throw AssumptionError(std::string("assumption violated on grid: ") + name + " at q = " +
                                  std::to_string(q));
    Xoshiro256pp rng(kCheckSeed);
    for (int i = 0; i < kRandomChecks; ++i) {
        const double q = rng.uniform(-kGridHalfwidth, kGridHalfwidth);
        if (std::abs(f(q)) > bound + allowance)
            throw AssumptionError(std::string("assumption violated at random point: ") + name +
                                  " at q = " + std::to_string(q));
    }
}

void certify_pair_bound(const std::function<double(double, double)>& f, double bound,
                        const char* name) {
    const double allowance = bound * 1e-9 + 1e-12;
    constexpr double step = 0.25;
    for (double q1 = -kGridHalfwidth; q1 <= kGridHalfwidth + 0.5 * step; q1 += step)
        for (double q2 = -kGridHalfwidth; q2 <= kGridHalfwidth + 0.5 * step; q2 += step)
            if (std::abs(f(q1, q2)) > bound + allowance)
                throw AssumptionError(std::string("assumption violated on grid: ") + name);
    Xoshiro256pp rng(kCheckSeed);
    for (int i = 0; i < kRandomChecks; ++i) {
        const double q1 = rng.uniform(-kGridHalfwidth, kGridHalfwidth);
        const double q2 = rng.uniform(-kGridHalfwidth, kGridHalfwidth);
        if (std::abs(f(q1, q2)) > bound + allowance)
            throw AssumptionError(std::string("assumption violated at random point: ") + name);
    }
}

}  // namespace

AssumptionConstants assumption_constants(const AnharmonicSystem& sys) {
    AssumptionConstants out;
    if (!sys.site && !sys.pair) return out;  // free harmonic system: all zero

    const int nu = sys.lattice.nu();
    double grad_total = 0.0;   // uniform bound on sum_Z |d_x V_Z|
    double hess_diag = 0.0;    // uniform bound on the x = y second-derivative sum
    double hess_offdiag = 0.0; // coefficient of F_mu2(d) off the diagonal
    double strength = 0.0;     // C3 pieces

    if (sys.site) {
        const SiteSitePotential& pot = *sys.site;
        const double m1 = pot.sup_dv >= 0.0 ? pot.sup_dv : grid_sup(pot.dv);
        const double m2 = pot.sup_d2v >= 0.0 ? pot.sup_d2v : grid_sup(pot.d2v);
        certify_site_bound(pot.dv, m1, "|V'| <= C (eq. harmdom0 input)");
        certify_site_bound(pot.d2v, m2, "|V''| <= C2 (eq. 2derbd0 input)");
        grad_total += m1;
        hess_diag += m2;
        strength += resolve_kappa(pot, 1e-8);
    }

    if (sys.pair) {
        const PairPotential& pot = *sys.pair;
        const double m1 = std::max(pot.sup_d1 >= 0.0 ? pot.sup_d1 : grid_sup2(pot.d1),
                                   pot.sup_d2 >= 0.0 ? pot.sup_d2 : grid_sup2(pot.d2));
        const double m11 = std::max(pot.sup_d11 >= 0.0 ? pot.sup_d11 : grid_sup2(pot.d11),
                                    pot.sup_d22 >= 0.0 ? pot.sup_d22 : grid_sup2(pot.d22));
        const double m12 = pot.sup_d12 >= 0.0 ? pot.sup_d12 : grid_sup2(pot.d12);
        certify_pair_bound(pot.d1, m1, "|d1 V| (eq. harmdom0 input)");
        certify_pair_bound(pot.d2, m1, "|d2 V| (eq. harmdom0 input)");
        certify_pair_bound(pot.d11, m11, "|d11 V| (eq. 2derbd0 input)");
        certify_pair_bound(pot.d22, m11, "|d22 V| (eq. 2derbd0 input)");
        certify_pair_bound(pot.d12, m12, "|d12 V| (eq. 2derbd0 input)");

        // Z^nu weight sums make the constants volume independent.
        const double weight_sum = zn_decay_sum(pot.weight_mu, nu, 1e-6);
        grad_total += m1 * (weight_sum - 1.0);
        hess_diag += m11 * (weight_sum - 1.0);
        hess_offdiag = m12;
        strength += resolve_pair_strength(pot, 1e-6) * weight_sum;
        out.mu2 = pot.weight_mu;
        out.mu3 = pot.weight_mu;
    } else {
        // single-site interactions only touch x = y; any positive rate works
        out.mu2 = 1.0;
        out.mu3 = 1.0;
    }

    out.c1 = grad_total * grad_total;
    out.c1_tilde = 1.0;
    out.mu1 = 1.0;
    out.c2 = std::max(hess_diag, hess_offdiag);
    out.c3 = strength;
    return out;
}

SolutionBound apriori_solution_bound(const AnharmonicSystem& sys,
                                     const AssumptionConstants& constants, const PhasePoint& x0) {
    double peak = 0.0;
    for (SiteIndex x = 0; x < sys.lattice.size(); ++x)
        peak = std::max(peak, x0.p(x) * x0.p(x) + x0.q(x) * x0.q(x));
    const double k1 = std::sqrt(peak + constants.c1_tilde);

    const double lsum = sys.params.lambda_sum();
    const double omega2 = sys.params.omega * sys.params.omega;
    double k2 = std::abs(omega2 + 2.0 * lsum - 1.0) + 4.0 * lsum + 0.5;
    if (constants.c1 > 0.0) {
        k2 += 0.5 * constants.c1 *
              lattice_decay_sum(sys.lattice, DecayProfile(constants.mu1, sys.lattice.nu()));
    }
    return {k1, k2};
}

JacobianBound jacobian_bound(const AnharmonicSystem& sys, const AssumptionConstants& constants,
                             double t) {
    if (!(t >= 0.0)) throw std::domain_error("jacobian_bound is stated for t >= 0");
    const double lsum = sys.params.lambda_sum();
    double k = 2.0 * sys.params.omega * sys.params.omega + 8.0 * lsum;
    if (constants.c2 > 0.0) {
        k += constants.c2 *
             lattice_decay_sum(sys.lattice, DecayProfile(constants.mu2, sys.lattice.nu()));
    }
    const double q_rows = std::max(1.0, 2.0 * t) * std::exp(k * t * t);
    const double p_rows = 1.0 + t * (k + 2.0 * lsum) * q_rows;
    return {q_rows, p_rows, k};
}

double bracket_apriori_bound(const AnharmonicSystem& sys, const AssumptionConstants& constants,
                             const WeylGenerator& f, const WeylGenerator& g, double t) {
    const JacobianBound jb = jacobian_bound(sys, constants, std::abs(t));
    return 4.0 * std::max(jb.q_rows, jb.p_rows) * static_cast<double>(f.sites.size()) *
           static_cast<double>(g.sites.size()) * f.norm_inf() * g.norm_inf();
}

}  // namespace lrl
