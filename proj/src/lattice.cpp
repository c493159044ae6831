#include "lrl/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace lrl {

namespace {

constexpr std::int64_t kMaxSites = 1 << 22;

std::int64_t checked_size(int nu, int L) {
    std::int64_t n = 1;
    for (int j = 0; j < nu; ++j) {
        n *= 2LL * L;
        if (n > kMaxSites) {
            throw std::invalid_argument("lattice (2L)^nu = too many sites, max " +
                                        std::to_string(kMaxSites));
        }
    }
    return n;
}

}  // namespace

TorusLattice::TorusLattice(int nu, int L) : nu_(nu), L_(L), side_(2 * L) {
    if (nu < 1) throw std::invalid_argument("lattice dimension nu must be >= 1");
    if (L < 1) throw std::invalid_argument("lattice half side L must be >= 1");
    size_ = static_cast<SiteIndex>(checked_size(nu, L));

    coords_.resize(static_cast<std::size_t>(size_) * nu_);
    std::vector<int> c(nu_, -L_ + 1);
    for (SiteIndex i = 0; i < size_; ++i) {
        for (int j = 0; j < nu_; ++j) coords_[static_cast<std::size_t>(i) * nu_ + j] = c[j];
        // row-major increment: last coordinate fastest
        for (int j = nu_ - 1; j >= 0; --j) {
            if (++c[j] <= L_) break;
            c[j] = -L_ + 1;
        }
    }

    nbr_plus_.resize(coords_.size());
    nbr_minus_.resize(coords_.size());
    std::vector<int> tmp(nu_);
    for (SiteIndex i = 0; i < size_; ++i) {
        for (int j = 0; j < nu_; ++j) {
            auto s = site(i);
            tmp.assign(s.begin(), s.end());
            tmp[j] = wrap_coord(tmp[j] + 1);
            nbr_plus_[static_cast<std::size_t>(i) * nu_ + j] = index_of(tmp);
            tmp[j] = wrap_coord(s[j] - 1);
            nbr_minus_[static_cast<std::size_t>(i) * nu_ + j] = index_of(tmp);
        }
    }
}

SiteIndex TorusLattice::index_of(std::span<const int> coords) const {
    if (static_cast<int>(coords.size()) != nu_)
        throw std::domain_error("site has wrong number of coordinates");
    std::int64_t idx = 0;
    for (int j = 0; j < nu_; ++j) {
        const int digit = wrap_coord(coords[j]) + L_ - 1;  // in [0, 2L)
        idx = idx * side_ + digit;
    }
    return static_cast<SiteIndex>(idx);
}

SiteIndex TorusLattice::wrap_diff(SiteIndex x, SiteIndex y) const {
    const auto sx = site(x);
    const auto sy = site(y);
    std::int64_t idx = 0;
    for (int j = 0; j < nu_; ++j) {
        const int digit = wrap_coord(sx[j] - sy[j]) + L_ - 1;
        idx = idx * side_ + digit;
    }
    return static_cast<SiteIndex>(idx);
}

SiteIndex TorusLattice::reflect(SiteIndex x) const {
    const auto sx = site(x);
    std::int64_t idx = 0;
    for (int j = 0; j < nu_; ++j) {
        const int digit = wrap_coord(-sx[j]) + L_ - 1;
        idx = idx * side_ + digit;
    }
    return static_cast<SiteIndex>(idx);
}

int TorusLattice::distance(SiteIndex x, SiteIndex y) const {
    if (x < 0 || x >= size_ || y < 0 || y >= size_)
        throw std::domain_error("site index outside the lattice");
    const auto sx = site(x);
    const auto sy = site(y);
    int d = 0;
    // After reduction into (-L, L] the minimum over eta is attained at eta = 0.
    for (int j = 0; j < nu_; ++j) d += std::abs(wrap_coord(sx[j] - sy[j]));
    return d;
}

int TorusLattice::distance_to_origin(SiteIndex x) const {
    if (x < 0 || x >= size_) throw std::domain_error("site index outside the lattice");
    const auto sx = site(x);
    int d = 0;
    for (int j = 0; j < nu_; ++j) d += std::abs(sx[j]);
    return d;
}

DecayProfile::DecayProfile(double mu_in, int nu_in) : mu(mu_in), nu(nu_in) {
    if (!(mu >= 0.0)) throw std::invalid_argument("decay rate mu must be nonnegative");
    if (nu < 1) throw std::invalid_argument("decay profile dimension nu must be >= 1");
}

double DecayProfile::value(double r) const {
    if (!(r >= 0.0)) throw std::domain_error("F_mu argument must be nonnegative");
    return std::exp(-mu * r) / std::pow(1.0 + r, nu + 1);
}

namespace {

// Number of points of Z^nu with L1 norm exactly r:
//   N_nu(r) = sum_{k=1..min(nu,r)} 2^k C(nu,k) C(r-1,k-1),  N_nu(0) = 1.
double shell_count(int nu, std::int64_t r) {
    if (r == 0) return 1.0;
    double total = 0.0;
    double choose_nu_k = 1.0;  // C(nu, k)
    double pow2 = 1.0;
    for (int k = 1; k <= nu && k <= r; ++k) {
        choose_nu_k *= static_cast<double>(nu - k + 1) / k;
        pow2 *= 2.0;
        double choose_r = 1.0;  // C(r-1, k-1)
        for (int i = 1; i < k; ++i) choose_r *= static_cast<double>(r - i) / i;
        total += pow2 * choose_nu_k * choose_r;
    }
    return total;
}

// Tail bound for sum_{r>R} N_nu(r) e^{-mu r} (1+r)^{-(nu+1)}.
// Uses N_nu(r) <= 3^nu r^{nu-1}, so each term is at most 3^nu e^{-mu r}/(1+r)^2.
double tail_bound(double mu, int nu, std::int64_t R) {
    const double c = std::pow(3.0, nu);
    if (mu > 0.0) {
        return c * std::exp(-mu * static_cast<double>(R + 1)) / (1.0 - std::exp(-mu));
    }
    return c / static_cast<double>(R);
}

}  // namespace

double zn_decay_sum(double mu, int nu, double rel_tol) {
    if (nu < 1) throw std::invalid_argument("nu must be >= 1");
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be nonnegative");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

    constexpr std::int64_t kMaxRadius = std::int64_t{1} << 31;
    double partial = 1.0;  // r = 0 term
    for (std::int64_t r = 1; r <= kMaxRadius; ++r) {
        partial += shell_count(nu, r) * std::exp(-mu * static_cast<double>(r)) /
                   std::pow(1.0 + static_cast<double>(r), nu + 1);
        if ((r & (r - 1)) == 0 || r == kMaxRadius) {  // check at powers of two
            const double tail = tail_bound(mu, nu, r);
            if (tail <= rel_tol * partial) return partial + tail;
        }
    }
    throw std::invalid_argument("zn_decay_sum: rel_tol unattainable within the radius cap");
}

double convolution_constant(int nu, double rel_tol) {
    return std::pow(2.0, nu + 1) * zn_decay_sum(0.0, nu, rel_tol);
}

double default_convolution_constant(int nu) {
    static std::mutex mtx;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(nu);
    if (it == cache.end()) it = cache.emplace(nu, convolution_constant(nu, 1e-6)).first;
    return it->second;
}

double lattice_decay_sum(const TorusLattice& lat, const DecayProfile& profile) {
    double s = 0.0;
    for (SiteIndex x = 0; x < lat.size(); ++x) s += profile.value(lat.distance_to_origin(x));
    return s;
}

ConvolutionCheck verify_f_convolution(const TorusLattice& lat, const DecayProfile& profile,
                                      SiteIndex x, SiteIndex y) {
    double lhs = 0.0;
    for (SiteIndex z = 0; z < lat.size(); ++z)
        lhs += profile.value(lat.distance(x, z)) * profile.value(lat.distance(z, y));
    const double rhs = default_convolution_constant(profile.nu) * profile.value(lat.distance(x, y));
    return {lhs, rhs, lhs <= rhs};
}

}  // namespace lrl
