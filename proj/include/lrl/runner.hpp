#pragma once

#include <iosfwd>

#include "lrl/config.hpp"

namespace lrl {

enum class SweepMode { harmonic, anharmonic, multisite };

struct RunSummary {
    int rows = 0;
    bool all_pass = true;
};

/// Kernel tables over the schedule: one CSV row per (t, site) with the three
/// kernel values and their decay-bound margins at the configured mu.
RunSummary run_kernels(const ExperimentConfig& cfg, std::ostream& csv);

/// Bracket-vs-envelope sweep over the schedule. Harmonic mode records the
/// exact bracket norm |Im<f_t, g>|; the sampled modes record the maximum of
/// |{alpha_t(W(f)), W(g)}(x0)| over the configured initial conditions.
RunSummary run_sweep(const ExperimentConfig& cfg, SweepMode mode, std::ostream& csv);

/// Invariant suite. Prints one PASS/FAIL line per check; returns all-pass.
bool run_verify(const ExperimentConfig& cfg, std::ostream& report);

/// Constants and velocities from the configured system, with formulas.
void run_bounds(const ExperimentConfig& cfg, std::ostream& report);

}  // namespace lrl
