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

#include "evorepair/nsga2.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "evorepair/error.hpp"

namespace evorepair {

const char* to_string(StopMode mode) noexcept {
  return mode == StopMode::first_plausible ? "first_plausible" : "full_budget";
}

StopMode stop_mode_from_string(std::string_view name) {
  if (name == "full_budget") return StopMode::full_budget;
  if (name == "first_plausible") return StopMode::first_plausible;
  fail(ErrorKind::config, "unknown stop mode '" + std::string(name) + "'");
}

void EvolutionConfig::validate() const {
  if (population_size < 2 || population_size % 2 != 0)
    fail(ErrorKind::config, "population size must be even and at least 2");
  if (max_generations < 1) fail(ErrorKind::config, "generation budget must be at least 1");
  if (!(fitness_weight >= 0.0)) fail(ErrorKind::config, "fitness weight must be non-negative");
  if (!(init_weight > 0.0 && init_weight <= 1.0)) fail(ErrorKind::config, "initialization weight must lie in (0, 1]");
  if (!(wall_clock_limit_s > 0.0)) fail(ErrorKind::config, "wall clock limit must be positive");
}

namespace {

std::uint32_t pick(std::size_t range, Rng& rng) {
  return range == 0 ? 0 : static_cast<std::uint32_t>(rng.below(range));
}

EditKind pick_operation(Rng& rng) { return static_cast<EditKind>(1 + rng.below(3)); }

}  // namespace

std::vector<Individual> init_population(std::span<const SuspiciousStatement> lbs, const EvolutionConfig& cfg,
                                        Rng& rng) {
  require(!lbs.empty(), "cannot initialize a population without likely-buggy statements");
  std::vector<Individual> pop(cfg.population_size);
  for (Individual& ind : pop) {
    PatchGenome g(lbs.size());
    for (std::size_t j = 0; j < lbs.size(); ++j) {
      const double p = std::min(1.0, cfg.init_weight * (1.0 + lbs[j].susp));
      g.enabled[j] = rng.bernoulli(p) ? 1 : 0;
      g.operation[j] = pick_operation(rng);
      g.replace_pick[j] = pick(lbs[j].replacement_candidates.size(), rng);
      g.insert_pick[j] = pick(lbs[j].insertion_candidates.size(), rng);
    }
    ind.genome = std::move(g);
  }
  return pop;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const FitnessVector> pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominators(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pop[p], pop[q]))
        dominated[p].push_back(q);
      else if (dominates(pop[q], pop[p]))
        ++dominators[p];
    }
    if (dominators[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current)
      for (std::size_t q : dominated[p])
        if (--dominators[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const FitnessVector> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (int objective = 0; objective < 2; ++objective) {
    auto value = [&](std::size_t i) { return objective == 0 ? front[i].f1 : front[i].f2; };
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    const double range = value(order.back()) - value(order.front());
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (range <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k)
      dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
  }
  return dist;
}

std::pair<PatchGenome, PatchGenome> hux_crossover(const PatchGenome& a, const PatchGenome& b, Rng& rng) {
  require(a.consistent() && b.consistent() && a.size() == b.size(), "crossover parents differ in length");
  PatchGenome c1 = a, c2 = b;
  std::vector<std::size_t> differing;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!a.same_at(b, j)) differing.push_back(j);
  const std::size_t swaps = differing.size() / 2;
  // Partial Fisher-Yates: the first `swaps` slots become a uniform sample
  // without replacement.
  for (std::size_t i = 0; i < swaps; ++i) {
    const std::size_t k = i + rng.below(differing.size() - i);
    std::swap(differing[i], differing[k]);
    c1.swap_at(c2, differing[i]);
  }
  return {std::move(c1), std::move(c2)};
}

PatchGenome mutate(const PatchGenome& g, std::span<const SuspiciousStatement> lbs, Rng& rng) {
  require(g.consistent() && g.size() == lbs.size() && !lbs.empty(), "mutation genome does not match statements");
  PatchGenome out = g;
  const std::size_t j = rng.below(g.size());
  out.enabled[j] = out.enabled[j] ? 0 : 1;
  out.operation[j] = pick_operation(rng);
  out.replace_pick[j] = pick(lbs[j].replacement_candidates.size(), rng);
  out.insert_pick[j] = pick(lbs[j].insertion_candidates.size(), rng);
  return out;
}

namespace {

struct Ranking {
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

Ranking rank_population(const std::vector<Individual>& pop) {
  std::vector<FitnessVector> fit;
  fit.reserve(pop.size());
  for (const auto& ind : pop) fit.push_back(*ind.fitness);
  Ranking r{std::vector<std::size_t>(pop.size()), std::vector<double>(pop.size())};
  const auto fronts = fast_nondominated_sort(fit);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<FitnessVector> members;
    for (std::size_t i : fronts[f]) members.push_back(fit[i]);
    const auto cd = crowding_distance(members);
    for (std::size_t k = 0; k < fronts[f].size(); ++k) {
      r.rank[fronts[f][k]] = f;
      r.crowding[fronts[f][k]] = cd[k];
    }
  }
  return r;
}

/// Keeps `n` individuals: whole fronts while they fit, then the most
/// spread-out members of the first front that overflows.
std::vector<Individual> truncate(std::vector<Individual> pool, std::size_t n) {
  std::vector<FitnessVector> fit;
  for (const auto& ind : pool) fit.push_back(*ind.fitness);
  std::vector<Individual> out;
  out.reserve(n);
  for (const auto& front : fast_nondominated_sort(fit)) {
    if (out.size() + front.size() <= n) {
      for (std::size_t i : front) out.push_back(std::move(pool[i]));
      if (out.size() == n) break;
      continue;
    }
    std::vector<FitnessVector> members;
    for (std::size_t i : front) members.push_back(fit[i]);
    const auto cd = crowding_distance(members);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t k = 0; out.size() < n; ++k) out.push_back(std::move(pool[front[order[k]]]));
    break;
  }
  return out;
}

std::size_t tournament(const Ranking& r, Rng& rng) {
  const std::size_t n = r.rank.size();
  const std::size_t a = rng.below(n);
  const std::size_t b = rng.below(n);
  if (r.rank[a] != r.rank[b]) return r.rank[a] < r.rank[b] ? a : b;
  if (r.crowding[a] != r.crowding[b]) return r.crowding[a] > r.crowding[b] ? a : b;
  return a;
}

GenerationSummary summarize(int generation, const std::vector<Individual>& pop) {
  GenerationSummary s{generation, *pop.front().fitness};
  for (const auto& ind : pop) {
    const FitnessVector& f = *ind.fitness;
    if (f.f2 < s.best.f2 || (f.f2 == s.best.f2 && f.f1 < s.best.f1)) s.best = f;
  }
  return s;
}

}  // namespace

EvolutionResult evolve(std::span<const SuspiciousStatement> lbs, BatchEvaluator& evaluator,
                       const EvolutionConfig& cfg, Rng& rng) {
  cfg.validate();
  require(!lbs.empty(), "evolution needs at least one likely-buggy statement");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = static_cast<std::size_t>(cfg.population_size);
  EvolutionResult result;
  std::unordered_set<std::string> archived;

  // Evaluates in place and archives newly seen plausible patches.
  auto evaluate = [&](std::vector<Individual>& batch, int generation) {
    std::vector<PatchGenome> genomes;
    genomes.reserve(batch.size());
    for (const auto& ind : batch) genomes.push_back(ind.genome);
    std::vector<EvaluationResult> res = evaluator.evaluate(genomes);
    require(res.size() == batch.size(), "evaluator returned a result count different from its input");
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++result.evaluations;
      batch[i].fitness = res[i].fitness;
      batch[i].plausible = res[i].plausible;
      if (res[i].plausible && archived.insert(res[i].patch_key).second)
        result.archive.push_back({batch[i].genome, res[i].fitness, result.evaluations, generation, res[i].patch_key});
    }
  };
  auto out_of_time = [&] {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return elapsed >= cfg.wall_clock_limit_s;
  };

  std::vector<Individual> population = init_population(lbs, cfg, rng);
  try {
    evaluate(population, 0);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.stop_reason = "error";
    return result;
  }
  result.generations.push_back(summarize(0, population));

  result.stop_reason = "generations";
  for (int gen = 1; gen <= cfg.max_generations; ++gen) {
    if (cfg.stop_mode == StopMode::first_plausible && !result.archive.empty()) {
      result.stop_reason = "first_plausible";
      break;
    }
    if (out_of_time()) {
      result.stop_reason = "time_limit";
      break;
    }
    const Ranking ranking = rank_population(population);
    std::vector<Individual> offspring;
    offspring.reserve(n);
    while (offspring.size() < n) {
      const PatchGenome& p1 = population[tournament(ranking, rng)].genome;
      const PatchGenome& p2 = population[tournament(ranking, rng)].genome;
      auto [c1, c2] = hux_crossover(p1, p2, rng);
      offspring.push_back({mutate(c1, lbs, rng), std::nullopt, false});
      offspring.push_back({mutate(c2, lbs, rng), std::nullopt, false});
    }
    try {
      evaluate(offspring, gen);
    } catch (const std::exception& e) {
      result.error = e.what();
      result.stop_reason = "error";
      break;
    }
    std::vector<Individual> pool = std::move(population);
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    population = truncate(std::move(pool), n);
    result.generations.push_back(summarize(gen, population));
  }
  if (result.stop_reason == "generations" && cfg.stop_mode == StopMode::first_plausible && !result.archive.empty())
    result.stop_reason = "first_plausible";
  result.final_population = std::move(population);
  return result;
}

std::vector<ArchiveEntry> smallest_patches(std::span<const ArchiveEntry> archive, std::size_t limit) {
  std::vector<ArchiveEntry> out(archive.begin(), archive.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const ArchiveEntry& a, const ArchiveEntry& b) { return a.fitness.f1 < b.fitness.f1; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

}  // namespace evorepair
