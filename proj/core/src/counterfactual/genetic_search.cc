/*
 * Copyright 2026 The STR Studio Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "strstudio/counterfactual/genetic_search.h"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "strstudio/util/random.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::counterfactual {
namespace {

using catalog::IsMissing;

struct Gene {
  int feature;
  bool categorical;
  int num_codes;
  double lo, hi, sigma;
};

struct Candidate {
  std::vector<double> genes;
  double predicted = 0.0;
  double distance = 0.0;
  double fitness = 0.0;
};

class Search {
 public:
  Search(const gbdt::TreeEnsemble& model, const CfRequest& request,
         std::vector<Gene> genes)
      : model_(model),
        request_(request),
        genes_(std::move(genes)),
        rng_(request.ga.seed),
        x_(request.instance.values) {}

  absl::StatusOr<CounterfactualResult> Run(SearchTrace* trace) {
    const GaConfig& ga = request_.ga;
    double lambda = ga.lambda0;
    int lambda_steps = 0;

    std::vector<Candidate> population(ga.population_size);
    population[0].genes = Original();
    for (int p = 1; p < ga.population_size; ++p) {
      population[p].genes = Original();
      // Sparse mutant: one forced gene plus the usual per-gene rate.
      const size_t forced = rng_.UniformIndex(genes_.size());
      for (size_t g = 0; g < genes_.size(); ++g) {
        if (g == forced || rng_.Bernoulli(ga.mutation_rate)) {
          Mutate(g, population[p].genes[g]);
        }
      }
    }

    std::vector<int> order;
    for (int generation = 0;; ++generation) {
      for (Candidate& c : population) {
        RETURN_IF_ERROR(Evaluate(c));
        Consider(c);
        c.fitness = Fitness(c, lambda);
      }
      order.resize(population.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return population[a].fitness < population[b].fitness;
      });
      if (trace != nullptr) {
        std::vector<std::vector<double>> elites;
        for (int e = 0; e < std::max(1, ga.elite_count); ++e) {
          elites.push_back(FullVector(population[order[e]].genes));
        }
        trace->elites.push_back(std::move(elites));
      }
      if (generation == ga.generations) break;

      if (!Feasible(population[order[0]]) && lambda_steps < ga.lambda_max_steps) {
        lambda *= ga.lambda_multiplier;
        ++lambda_steps;
        for (Candidate& c : population) c.fitness = Fitness(c, lambda);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
          return population[a].fitness < population[b].fitness;
        });
      }

      std::vector<Candidate> next;
      next.reserve(population.size());
      for (int e = 0; e < ga.elite_count; ++e) next.push_back(population[order[e]]);
      while (static_cast<int>(next.size()) < ga.population_size) {
        const Candidate& a = population[Tournament(population)];
        const Candidate& b = population[Tournament(population)];
        Candidate child;
        child.genes = a.genes;
        if (rng_.Bernoulli(ga.crossover_rate)) {
          for (size_t g = 0; g < genes_.size(); ++g) {
            if (rng_.Bernoulli(0.5)) child.genes[g] = b.genes[g];
          }
        }
        for (size_t g = 0; g < genes_.size(); ++g) {
          if (rng_.Bernoulli(ga.mutation_rate)) Mutate(g, child.genes[g]);
        }
        next.push_back(std::move(child));
      }
      population = std::move(next);
    }

    const Candidate& chosen = best_feasible_ ? *best_feasible_ : population[order[0]];
    CounterfactualResult result;
    result.counterfactual.values = FullVector(chosen.genes);
    result.counterfactual.product_id = request_.instance.product_id;
    result.original_prediction = model_.PredictUnchecked(x_);
    result.predicted = chosen.predicted;
    result.target = request_.target;
    result.distance = chosen.distance;
    result.feasible = Feasible(chosen);
    result.final_lambda = lambda;
    return result;
  }

 private:
  std::vector<double> Original() const {
    std::vector<double> genes;
    for (const Gene& g : genes_) genes.push_back(x_[g.feature]);
    return genes;
  }

  std::vector<double> FullVector(const std::vector<double>& genes) const {
    std::vector<double> full = x_;
    for (size_t g = 0; g < genes_.size(); ++g) full[genes_[g].feature] = genes[g];
    return full;
  }

  void Mutate(size_t g, double& value) {
    const Gene& gene = genes_[g];
    if (gene.categorical) {
      value = 1.0 + static_cast<double>(rng_.UniformIndex(gene.num_codes));
    } else if (IsMissing(value)) {
      value = rng_.Uniform(gene.lo, gene.hi);
    } else {
      value = std::clamp(value + gene.sigma * rng_.Normal(), gene.lo, gene.hi);
    }
  }

  absl::Status Evaluate(Candidate& c) const {
    const std::vector<double> full = FullVector(c.genes);
    c.predicted = model_.PredictUnchecked(full);
    ASSIGN_OR_RETURN(c.distance, Distance(x_, full, request_.distance));
    return absl::OkStatus();
  }

  bool Feasible(const Candidate& c) const {
    return std::fabs(c.predicted - request_.target) <= request_.tolerance;
  }

  double Fitness(const Candidate& c, double lambda) const {
    const double miss = c.predicted - request_.target;
    return lambda * miss * miss + c.distance;
  }

  void Consider(const Candidate& c) {
    if (!Feasible(c)) return;
    if (!best_feasible_ || c.distance < best_feasible_->distance) best_feasible_ = c;
  }

  size_t Tournament(const std::vector<Candidate>& population) {
    size_t best = rng_.UniformIndex(population.size());
    for (int k = 1; k < request_.ga.tournament_size; ++k) {
      const size_t other = rng_.UniformIndex(population.size());
      if (population[other].fitness < population[best].fitness) best = other;
    }
    return best;
  }

  const gbdt::TreeEnsemble& model_;
  const CfRequest& request_;
  std::vector<Gene> genes_;
  utils::Random rng_;
  std::vector<double> x_;
  std::optional<Candidate> best_feasible_;
};

}  // namespace

absl::Status GaConfig::Validate() const {
  if (population_size < 2) return absl::InvalidArgumentError("population_size must be >= 2");
  if (generations < 0) return absl::InvalidArgumentError("generations must be >= 0");
  if (elite_count < 0 || elite_count >= population_size) {
    return absl::InvalidArgumentError("elite_count must be in [0, population_size)");
  }
  if (tournament_size < 1) return absl::InvalidArgumentError("tournament_size must be >= 1");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    return absl::InvalidArgumentError("crossover_rate must be in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    return absl::InvalidArgumentError("mutation_rate must be in [0, 1]");
  }
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    return absl::InvalidArgumentError("lambda0 must be positive");
  }
  if (!(lambda_multiplier > 1.0) || !std::isfinite(lambda_multiplier)) {
    return absl::InvalidArgumentError("lambda_multiplier must be > 1");
  }
  if (lambda_max_steps < 0) return absl::InvalidArgumentError("lambda_max_steps must be >= 0");
  return absl::OkStatus();
}

absl::StatusOr<CounterfactualResult> SolveCounterfactual(
    const gbdt::TreeEnsemble& model, const catalog::FeatureSchema& schema,
    const CfRequest& request, SearchTrace* trace) {
  RETURN_IF_ERROR(model.CheckSchema(schema));
  RETURN_IF_ERROR(request.ga.Validate());
  RETURN_IF_ERROR(request.distance.Validate());
  const int d = schema.size();
  if (static_cast<int>(request.instance.values.size()) != d) {
    return absl::InvalidArgumentError(StrCat("instance has ", request.instance.values.size(),
                                             " features, schema has ", d));
  }
  if (static_cast<int>(request.distance.size()) != d) {
    return absl::InvalidArgumentError("distance spec does not match the schema");
  }
  if (request.mutable_features.empty()) {
    return absl::InvalidArgumentError("no mutable features");
  }
  if (!(request.tolerance > 0.0)) {
    return absl::InvalidArgumentError("tolerance must be positive");
  }
  if (!std::isfinite(request.target)) {
    return absl::InvalidArgumentError("target must be finite");
  }
  const std::set<int> mutable_set(request.mutable_features.begin(),
                                  request.mutable_features.end());
  std::vector<Gene> genes;
  for (const int f : mutable_set) {
    if (f < 0 || f >= d) {
      return absl::OutOfRangeError(StrCat("mutable feature index ", f, " out of range"));
    }
    const auto& spec = schema.feature(f);
    Gene gene{f, spec.categorical(), spec.num_codes(), 0.0, 0.0, 0.0};
    if (spec.categorical()) {
      if (spec.num_codes() < 1) {
        return absl::FailedPreconditionError(StrCat("feature '", spec.name, "' has no codes"));
      }
    } else {
      if (!(request.distance.scale[f] > 0.0)) {
        return absl::FailedPreconditionError(
            StrCat("mutable feature '", spec.name, "' has zero distance scale"));
      }
      const double range = spec.max - spec.min;
      gene.lo = spec.min - 0.1 * range;
      gene.hi = spec.max + 0.1 * range;
      gene.sigma = range / 10.0;
    }
    genes.push_back(gene);
  }
  Search search(model, request, std::move(genes));
  ASSIGN_OR_RETURN(CounterfactualResult result, search.Run(trace));
  ASSIGN_OR_RETURN(result.diffs, ComputeDiff(request.instance.values,
                                             result.counterfactual.values, schema));
  return result;
}

absl::StatusOr<std::vector<int>> MatchFeatures(const catalog::FeatureSchema& schema,
                                               const std::vector<std::string>& patterns) {
  std::set<int> matched;
  for (const std::string& pattern : patterns) {
    bool any = false;
    for (int i = 0; i < schema.size(); ++i) {
      if (fnmatch(pattern.c_str(), schema.feature(i).name.c_str(), 0) == 0) {
        matched.insert(i);
        any = true;
      }
    }
    if (!any) {
      return absl::InvalidArgumentError(StrCat("pattern '", pattern, "' matches no feature"));
    }
  }
  return std::vector<int>(matched.begin(), matched.end());
}

absl::StatusOr<std::vector<int>> MutableExcept(const catalog::FeatureSchema& schema,
                                               const std::vector<std::string>& frozen) {
  std::set<int> excluded;
  if (!frozen.empty()) {
    ASSIGN_OR_RETURN(const std::vector<int> f, MatchFeatures(schema, frozen));
    excluded.insert(f.begin(), f.end());
  }
  std::vector<int> out;
  for (int i = 0; i < schema.size(); ++i) {
    if (!excluded.contains(i)) out.push_back(i);
  }
  return out;
}

}  // namespace strstudio::counterfactual
