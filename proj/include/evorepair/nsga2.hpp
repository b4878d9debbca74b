// Copyright 2026 The evorepair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// NSGA-II over patch genomes: initialization, binary tournament, half
// uniform crossover, single-position mutation, non-dominated sorting and
// crowding truncation, with an archive of plausible patches.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evorepair/patch.hpp"
#include "evorepair/rng.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

enum class StopMode : std::uint8_t { full_budget, first_plausible };

const char* to_string(StopMode mode) noexcept;
StopMode stop_mode_from_string(std::string_view name);

struct EvolutionConfig {
  int population_size = 40;
  int max_generations = 50;
  double fitness_weight = 0.5;
  double init_weight = 0.06;
  std::uint64_t seed = 42;
  StopMode stop_mode = StopMode::full_budget;
  double wall_clock_limit_s = 3600.0;

  /// Throws a config error when an invariant fails.
  void validate() const;
};

struct Individual {
  PatchGenome genome;
  std::optional<FitnessVector> fitness;
  bool plausible = false;
};

std::vector<Individual> init_population(std::span<const SuspiciousStatement> lbs,
                                        const EvolutionConfig& cfg, Rng& rng);

/// Pareto dominance for minimization.
inline bool dominates(const FitnessVector& a, const FitnessVector& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

/// Fronts of indices into `pop`; front 0 is the non-dominated set. Indices
/// within a front are ascending.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const FitnessVector> pop);

/// Crowding distance of each member of one front (same order as input).
std::vector<double> crowding_distance(std::span<const FitnessVector> front);

/// Swaps floor(k/2) of the k differing positions, whole tuples at a time.
std::pair<PatchGenome, PatchGenome> hux_crossover(const PatchGenome& a, const PatchGenome& b, Rng& rng);

/// Picks one position; flips its enable bit and resamples the other three
/// genes.
PatchGenome mutate(const PatchGenome& g, std::span<const SuspiciousStatement> lbs, Rng& rng);

struct EvaluationResult {
  FitnessVector fitness;
  bool plausible = false;
  /// Phenotype identity; equal keys are the same patch.
  std::string patch_key;
};

class BatchEvaluator {
 public:
  virtual ~BatchEvaluator() = default;
  /// One result per genome, in input order.
  virtual std::vector<EvaluationResult> evaluate(std::span<const PatchGenome> genomes) = 0;
};

struct ArchiveEntry {
  PatchGenome genome;
  FitnessVector fitness;
  std::size_t evaluations_at_discovery = 0;
  int generation = 0;
  std::string patch_key;
};

struct GenerationSummary {
  int generation = 0;
  FitnessVector best;  // lowest f2, then lowest f1
};

struct EvolutionResult {
  std::vector<ArchiveEntry> archive;  // discovery order, distinct patches
  std::vector<GenerationSummary> generations;
  std::vector<Individual> final_population;
  std::size_t evaluations = 0;
  std::string stop_reason;
  std::optional<std::string> error;
};

EvolutionResult evolve(std::span<const SuspiciousStatement> lbs, BatchEvaluator& evaluator,
                       const EvolutionConfig& cfg, Rng& rng);

/// Archive entries ordered by f1 (then discovery), truncated to `limit`.
std::vector<ArchiveEntry> smallest_patches(std::span<const ArchiveEntry> archive, std::size_t limit = 10);

}  // namespace evorepair
