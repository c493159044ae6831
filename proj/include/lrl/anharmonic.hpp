#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lrl/harmonic.hpp"
#include "lrl/lattice.hpp"
#include "lrl/potentials.hpp"
#include "lrl/weyl.hpp"

namespace lrl {

/// One weighted pair bond F_{weight_mu}(d(i,j)) V(q_i, q_j), i < j.
struct PairBond {
    SiteIndex i, j;
    double weight;
};

/// H = H_h + sum_z V(q_z) + sum_{z1<z2} F_mu(d(z1,z2)) V(q_{z1}, q_{z2}),
/// with either potential optional. Pair bonds are enumerated once here.
struct AnharmonicSystem {
    TorusLattice lattice;
    HarmonicParams params;
    std::optional<SiteSitePotential> site;
    std::optional<PairPotential> pair;
    std::vector<PairBond> bonds;

    static AnharmonicSystem make(const TorusLattice& lat, HarmonicParams params,
                                 std::optional<SiteSitePotential> site = std::nullopt,
                                 std::optional<PairPotential> pair = std::nullopt);
};

double hamiltonian_eval(const AnharmonicSystem& sys, const PhasePoint& x);

struct VectorField {
    Eigen::VectorXd dq, dp;
};

/// Hamilton's equations: dq_x = 2 p_x,
/// dp_x = -2 omega^2 q_x - 2 sum_j lambda_j (2q_x - q_{x+e_j} - q_{x-e_j})
///        - sum_{Z owning x} d_x V_Z.
VectorField vector_field(const AnharmonicSystem& sys, const PhasePoint& x);

/// out += scale * Hess_U(q) * in, where U is the configuration energy.
/// in and out have one row per site.
void add_hessian_product(const AnharmonicSystem& sys, const Eigen::VectorXd& q,
                         const Eigen::MatrixXd& in, Eigen::MatrixXd& out, double scale);

enum class Scheme { leapfrog, rk4 };

/// Jacobian of the flow with respect to the initial condition, in the four
/// site-indexed blocks d{q,p}_x(t) / d{q,p}_y(0).
struct TangentFlow {
    double t = 0.0;
    Eigen::MatrixXd dq_dq0, dq_dp0, dp_dq0, dp_dp0;

    static TangentFlow identity(SiteIndex n);
};

struct FlowWithTangent {
    PhasePoint state;
    TangentFlow tangent;
};

/// Kick-drift-kick Stormer-Verlet for the separable H = sum p^2 + U(q),
/// optionally carrying the exact tangent map of the discrete flow. Steps
/// are uniform per advance_to segment, sized as close to dt as possible.
class LeapfrogStepper {
  public:
    LeapfrogStepper(const AnharmonicSystem& sys, PhasePoint x0, bool with_tangent);

    void advance_to(double t_target, double dt);

    double time() const noexcept { return t_; }
    const PhasePoint& state() const noexcept { return x_; }
    TangentFlow tangent() const;

  private:
    void step(double h);

    const AnharmonicSystem* sys_;
    PhasePoint x_;
    double t_ = 0.0;
    std::int64_t steps_done_ = 0;
    bool with_tangent_;
    Eigen::MatrixXd jq_, jp_;  // N x 2N tangent rows [d./dq0 | d./dp0]
};

PhasePoint integrate_flow(const AnharmonicSystem& sys, const PhasePoint& x0, double t, double dt,
                          Scheme scheme = Scheme::leapfrog);

FlowWithTangent integrate_with_tangent(const AnharmonicSystem& sys, const PhasePoint& x0,
                                       double t, double dt);

TangentFlow integrate_tangent(const AnharmonicSystem& sys, const PhasePoint& x0, double t,
                              double dt);

/// {alpha_t(W(f)), W(g)}(x0) assembled from tangent blocks: with
///   A_y = sum_x Re f(x) dq_x/dq_y + Im f(x) dp_x/dq_y,
///   B_y = sum_x Re f(x) dq_x/dp_y + Im f(x) dp_x/dp_y,
/// the bracket is -sum_y (A_y Im g(y) - B_y Re g(y)) W(f)(Phi_t x0) W(g)(x0).
Complex bracket_from_tangent(const AnharmonicSystem& sys, const WeylGenerator& f,
                             const WeylGenerator& g, const FlowWithTangent& flow,
                             const PhasePoint& x0);

Complex bracket_pointwise(const AnharmonicSystem& sys, const WeylGenerator& f,
                          const WeylGenerator& g, const PhasePoint& x0, double t, double dt);

/// Constants certifying the interaction assumptions for the configured
/// potentials: (C1, C1~, mu1) for the gradient domination, (C2, mu2) for the
/// second-derivative decay, (C3, mu3) for the Fourier-strength decay.
struct AssumptionConstants {
    double c1 = 0.0, c1_tilde = 0.0, mu1 = 0.0;
    double c2 = 0.0, mu2 = 0.0;
    double c3 = 0.0, mu3 = 0.0;
};

/// Derives the constants (closed forms for the Gaussian family, otherwise
/// grid optimization) and certifies them on the documented grid plus random
/// spot checks. Violations raise AssumptionError naming the inequality.
AssumptionConstants assumption_constants(const AnharmonicSystem& sys);

struct SolutionBound {
    double k1, k2;  // max(|q_x(t)|, |p_x(t)|) <= k1 exp(k2 t) for t >= 0
};

SolutionBound apriori_solution_bound(const AnharmonicSystem& sys,
                                     const AssumptionConstants& constants, const PhasePoint& x0);

struct JacobianBound {
    double q_rows;  // bound on |dq_x(t)/d(q,p)_y(0)|
    double p_rows;  // bound on |dp_x(t)/d(q,p)_y(0)|
    double k;       // Gronwall rate 2 omega^2 + 8 sum lambda + C2 sum_x F_mu2(d(0,x))
};

JacobianBound jacobian_bound(const AnharmonicSystem& sys, const AssumptionConstants& constants,
                             double t);

/// A priori bound on |{alpha_t(W(f)), W(g)}|: 4 max(Jacobian entry bounds)
/// times |X| |Y| ||f|| ||g||.
double bracket_apriori_bound(const AnharmonicSystem& sys, const AssumptionConstants& constants,
                             const WeylGenerator& f, const WeylGenerator& g, double t);

}  // namespace lrl
