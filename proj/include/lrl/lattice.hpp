#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lrl {

using SiteIndex = std::int32_t;

/// The periodic box Lambda_L = (-L, L]^nu in Z^nu with the torus metric
/// d(x,y) = sum_j min_eta |x_j - y_j + 2L eta|.
///
/// Sites are enumerated row-major over coordinates ascending in (-L, L],
/// so the enumeration is a stable bijection with [0, (2L)^nu).
class TorusLattice {
  public:
    TorusLattice(int nu, int L);

    int nu() const noexcept { return nu_; }
    int half_side() const noexcept { return L_; }
    int side() const noexcept { return side_; }
    SiteIndex size() const noexcept { return size_; }

    /// Coordinates of site i, each in (-L, L].
    std::span<const int> site(SiteIndex i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * nu_, static_cast<std::size_t>(nu_)};
    }

    /// Index of the site with the given coordinates (wrapped into (-L, L]).
    SiteIndex index_of(std::span<const int> coords) const;

    /// Reduce one coordinate into the fundamental window (-L, L].
    int wrap_coord(int c) const noexcept {
        int r = c % side_;
        if (r > L_) r -= side_;
        if (r <= -L_) r += side_;
        return r;
    }

    /// Site index of the periodically wrapped difference x - y.
    SiteIndex wrap_diff(SiteIndex x, SiteIndex y) const;

    /// Site index of the reflection -x (the convention maps the edge L to L).
    SiteIndex reflect(SiteIndex x) const;

    /// Torus metric d(x, y).
    int distance(SiteIndex x, SiteIndex y) const;

    /// d(0, x); equals the L1 norm of the canonical coordinates of x.
    int distance_to_origin(SiteIndex x) const;

    /// Neighbor x +/- e_dim with periodic wrap. dir is +1 or -1.
    SiteIndex neighbor(SiteIndex x, int dim, int dir) const {
        const auto base = static_cast<std::size_t>(x) * nu_ + dim;
        return dir > 0 ? nbr_plus_[base] : nbr_minus_[base];
    }

  private:
    int nu_;
    int L_;
    int side_;  // 2L
    SiteIndex size_;
    std::vector<int> coords_;
    std::vector<SiteIndex> nbr_plus_, nbr_minus_;
};

/// The decay profile F_mu(r) = e^{-mu r} / (1+r)^{nu+1} of Eq. family F.
struct DecayProfile {
    double mu;
    int nu;

    DecayProfile(double mu, int nu);

    /// F_mu(r); r must be nonnegative.
    double value(double r) const;
};

/// C_nu = 2^{nu+1} sum_{z in Z^nu} (1+|z|)^{-(nu+1)}, evaluated by radius
/// truncation with an analytic tail bound. The returned value is an upper
/// bound on the exact constant with relative error at most rel_tol.
double convolution_constant(int nu, double rel_tol);

/// convolution_constant(nu, 1e-6), memoized per nu.
double default_convolution_constant(int nu);

/// sum_{z in Z^nu} F_mu(|z|), same truncation scheme (upper bound, relative
/// error at most rel_tol). Shared by the assumption-constant certification.
double zn_decay_sum(double mu, int nu, double rel_tol);

/// sum_{x in Lambda_L} F(d(0, x)) on the given lattice.
double lattice_decay_sum(const TorusLattice& lat, const DecayProfile& profile);

struct ConvolutionCheck {
    double lhs;   // sum_z F(d(x,z)) F(d(z,y))
    double rhs;   // C_nu F(d(x,y))
    bool pass;
};

/// Checks the convolution property of F_mu on the torus for one site pair.
ConvolutionCheck verify_f_convolution(const TorusLattice& lat, const DecayProfile& profile,
                                      SiteIndex x, SiteIndex y);

}  // namespace lrl
