#pragma once

#include <cstdint>

#include "rwre/config.hpp"
#include "rwre/result_table.hpp"
#include "rwre/walk.hpp"

namespace rwre {

// Runs the experiment described by `config` and returns its table. The
// bytes of to_csv() depend on the config only, never on `threads`.
//
// Wall time is not part of the table (it would break byte replay); callers
// report it separately.
ResultTable run_experiment(const ExperimentConfig& config, int threads = 1);

// Trajectory `trial` of a regen experiment: annealed walk of `steps` steps
// from the origin.
Trajectory regen_trajectory(const EnvironmentLaw& law, std::uint64_t steps, std::uint64_t trial,
                            std::uint64_t master_seed);

// Environment used by single-environment experiments (torus, fn_tail
// sequence mode).
Environment experiment_environment(const EnvironmentLaw& law, const std::string& kind, std::uint64_t master_seed,
                                   std::uint64_t index = 0);

}  // namespace rwre
