#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "traceinv/errors.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

enum class DeStrategy { best1exp, rand1exp, best1bin };

inline std::string to_string(DeStrategy s) {
  switch (s) {
    case DeStrategy::best1exp: return "best/1/exp";
    case DeStrategy::rand1exp: return "rand/1/exp";
    case DeStrategy::best1bin: return "best/1/bin";
  }
  return "unknown";
}

struct DeOptions {
  int population = 40;
  DeStrategy strategy = DeStrategy::best1exp;
  double weight = 0.8;          // F
  double crossover = 0.9;       // CR
  int max_generations = 200;
  double relative_tolerance = 1e-8;  // stop when std(f) < tol * |best f|
  double absolute_tolerance = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

inline nlohmann::ordered_json to_json(const DeOptions& o) {
  nlohmann::ordered_json j;
  j["population"] = o.population;
  j["strategy"] = to_string(o.strategy);
  j["F"] = o.weight;
  j["CR"] = o.crossover;
  j["max_generations"] = o.max_generations;
  j["relative_tolerance"] = o.relative_tolerance;
  j["absolute_tolerance"] = o.absolute_tolerance;
  j["seed"] = o.seed;
  return j;
}

struct DeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int generations = 0;
  long evaluations = 0;
  bool converged = false;  // false: max_generations hit, x is best so far
};

/// Box-constrained global minimization by differential evolution (Storn and
/// Price). The trial vectors of one generation are evaluated together
/// (possibly concurrently) and selection is applied afterwards in population
/// order, so the run depends only on the seed. All random draws come from one
/// engine on the calling thread.
inline DeResult differential_evolution(const std::function<double(const Eigen::VectorXd&)>& objective,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const DeOptions& opt = {}) {
  const Index dim = lower.size();
  if (dim < 1 || upper.size() != dim) throw DimensionMismatch("differential_evolution: bad bounds");
  if (((upper - lower).array() <= 0.0).any()) throw InvalidArgument("differential_evolution: empty search box");
  if (opt.population < 4) throw InvalidArgument("differential_evolution: population must be >= 4");

  const int np = opt.population;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Eigen::VectorXd> pop(static_cast<std::size_t>(np));
  for (auto& x : pop) {
    x.resize(dim);
    for (Index d = 0; d < dim; ++d) x[d] = lower[d] + unif(rng) * (upper[d] - lower[d]);
  }
  std::vector<double> fit(static_cast<std::size_t>(np));
  DeResult res;
  auto evaluate_all = [&](const std::vector<Eigen::VectorXd>& xs, std::vector<double>& out) {
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = objective(xs[i]); }, opt.threads);
    res.evaluations += static_cast<long>(xs.size());
  };
  evaluate_all(pop, fit);

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  };
  auto converged = [&] {
    double mean = 0.0;
    for (double f : fit) mean += f;
    mean /= np;
    double var = 0.0;
    for (double f : fit) var += (f - mean) * (f - mean);
    const double sd = std::sqrt(var / np);
    return sd <= opt.absolute_tolerance + opt.relative_tolerance * std::abs(fit[best_index()]);
  };

  std::vector<Eigen::VectorXd> trials(static_cast<std::size_t>(np));
  std::vector<double> trial_fit(static_cast<std::size_t>(np));
  while (res.generations < opt.max_generations && !converged()) {
    const std::size_t best = best_index();
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      do r1 = static_cast<int>(rng() % static_cast<std::uint64_t>(np)); while (r1 == i);
      do r2 = static_cast<int>(rng() % static_cast<std::uint64_t>(np)); while (r2 == i || r2 == r1);
      do r3 = static_cast<int>(rng() % static_cast<std::uint64_t>(np)); while (r3 == i || r3 == r1 || r3 == r2);
      const auto& base = opt.strategy == DeStrategy::rand1exp ? pop[static_cast<std::size_t>(r3)] : pop[best];
      const Eigen::VectorXd mutant =
          base + opt.weight * (pop[static_cast<std::size_t>(r1)] - pop[static_cast<std::size_t>(r2)]);

      Eigen::VectorXd trial = pop[static_cast<std::size_t>(i)];
      if (opt.strategy == DeStrategy::best1bin) {
        const Index forced = static_cast<Index>(rng() % static_cast<std::uint64_t>(dim));
        for (Index d = 0; d < dim; ++d) {
          if (d == forced || unif(rng) < opt.crossover) trial[d] = mutant[d];
        }
      } else {
        // Exponential crossover: copy a run of consecutive coordinates.
        Index d = static_cast<Index>(rng() % static_cast<std::uint64_t>(dim));
        Index copied = 0;
        do {
          trial[d] = mutant[d];
          d = (d + 1) % dim;
          ++copied;
        } while (copied < dim && unif(rng) < opt.crossover);
      }
      for (Index d = 0; d < dim; ++d) {
        // Out-of-box coordinates are redrawn between the parent and the violated bound.
        if (trial[d] < lower[d]) trial[d] = lower[d] + unif(rng) * (pop[static_cast<std::size_t>(i)][d] - lower[d]);
        if (trial[d] > upper[d]) trial[d] = upper[d] - unif(rng) * (upper[d] - pop[static_cast<std::size_t>(i)][d]);
      }
      trials[static_cast<std::size_t>(i)] = std::move(trial);
    }
    evaluate_all(trials, trial_fit);
    for (std::size_t i = 0; i < static_cast<std::size_t>(np); ++i) {
      if (trial_fit[i] <= fit[i]) {
        pop[i] = trials[i];
        fit[i] = trial_fit[i];
      }
    }
    ++res.generations;
  }

  const std::size_t best = best_index();
  res.x = pop[best];
  res.value = fit[best];
  res.converged = converged();
  return res;
}

/// One-dimensional convenience overload.
inline DeResult differential_evolution(const std::function<double(double)>& objective, double lower, double upper,
                                       const DeOptions& opt = {}) {
  return differential_evolution([&](const Eigen::VectorXd& x) { return objective(x[0]); },
                                Eigen::VectorXd::Constant(1, lower), Eigen::VectorXd::Constant(1, upper), opt);
}

}  // namespace traceinv
