#pragma once

// Independent reference implementations used only by tests. They share no
// code with the library paths they check.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ospe/dtree.hpp"

namespace oracle {

struct Example {
  ospe::textprep::WordSet words;
  bool correct;
};

// Shannon entropy in bits via natural logarithms.
inline double entropy_bits(double correct, double incorrect) {
  const double n = correct + incorrect;
  double h = 0.0;
  for (double part : {correct, incorrect}) {
    if (part > 0) h -= (part / n) * std::log(part / n);
  }
  return h / std::log(2.0);
}

struct BruteForceChoice {
  std::string word;
  double gain;
};

// Enumerates every candidate word, keeps the best gain and the smallest word
// reaching it (within 1e-12). Splits that leave one side empty are skipped.
inline std::optional<BruteForceChoice> best_rule(const std::vector<Example>& examples,
                                                 const std::vector<std::string>& candidates) {
  double c = 0, i = 0;
  for (const auto& e : examples) (e.correct ? c : i) += 1;
  if (c == 0 || i == 0) return std::nullopt;
  const double parent = entropy_bits(c, i);

  std::vector<std::pair<std::string, double>> gains;
  for (const auto& word : candidates) {
    double tc = 0, ti = 0, fc = 0, fi = 0;
    for (const auto& e : examples) {
      const bool has = e.words.count(word) > 0;
      if (has) (e.correct ? tc : ti) += 1;
      else (e.correct ? fc : fi) += 1;
    }
    const double nt = tc + ti, nf = fc + fi;
    if (nt == 0 || nf == 0) continue;
    const double split = (nt * entropy_bits(tc, ti) + nf * entropy_bits(fc, fi)) / (nt + nf);
    gains.emplace_back(word, parent - split);
  }
  if (gains.empty()) return std::nullopt;
  double best = -1;
  for (const auto& [w, g] : gains) best = std::max(best, g);
  std::optional<BruteForceChoice> choice;
  for (const auto& [w, g] : gains) {
    if (g >= best - 1e-12 && (!choice || w < choice->word)) choice = BruteForceChoice{w, g};
  }
  return choice;
}

// Simpson's rule on the Student t density; p = P(|T| >= |t|).
inline double t_two_tailed_by_quadrature(double t, double dof) {
  const double log_norm = std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2) - 0.5 * std::log(dof * M_PI);
  auto density = [&](double x) { return std::exp(log_norm - (dof + 1) / 2 * std::log1p(x * x / dof)); };
  // Integrate the centre [0, |t|] and double it; the tail mass is 1 - that.
  const double upper = std::fabs(t);
  if (upper == 0) return 1.0;
  const int steps = 200000;
  const double h = upper / steps;
  double sum = density(0) + density(upper);
  for (int k = 1; k < steps; ++k) sum += density(k * h) * (k % 2 ? 4 : 2);
  const double centre = sum * h / 3;
  return 1.0 - 2.0 * centre;
}

}  // namespace oracle
