#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lrl/anharmonic.hpp"
#include "lrl/harmonic.hpp"
#include "lrl/lattice.hpp"
#include "lrl/weyl.hpp"

namespace lrl {

enum class PotentialKind { none, gaussian_site, gaussian_pair };

/// Fully validated experiment description. Parsed from the flat
/// `section.key = value` grammar ('#' comments, comma-separated lists,
/// ':'-separated site coordinates, complex literals like 1, i, 0.5-2i).
struct ExperimentConfig {
    int nu = 1;
    int L = 8;

    double omega = 1.0;
    std::vector<double> lambda;  // one coupling per dimension

    PotentialKind kind = PotentialKind::none;
    double amplitude = 1.0;
    double width = 1.0;
    double weight_mu = 1.0;

    std::vector<SiteIndex> f_support, g_support;
    std::vector<Complex> f_values, g_values;

    double t_min = 0.0, t_max = 1.0;
    int t_steps = 11;

    double mu = 1.0, epsilon = 0.5;

    double dt = 1e-3;
    Scheme scheme = Scheme::leapfrog;

    int count = 50;
    double sample_amplitude = 5.0;
    std::uint64_t seed = 12345;

    double abs_tol = 1e-9;
    std::string output_path;

    TorusLattice make_lattice() const { return {nu, L}; }
    HarmonicParams harmonic() const { return {omega, lambda}; }
    AnharmonicSystem make_system() const;
    WeylGenerator f() const { return {f_support, f_values}; }
    WeylGenerator g() const { return {g_support, g_values}; }
    std::vector<double> schedule() const;

    /// Canonical `section.key = value` echo of every effective setting.
    std::string echo() const;
};

/// Parses and validates; throws ConfigError with the offending line or field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

}  // namespace lrl
