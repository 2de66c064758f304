#pragma once

#include <functional>
#include <string>
#include <vector>

#include "conjtamer/action.hpp"
#include "conjtamer/flatten.hpp"
#include "conjtamer/grid_function.hpp"
#include "conjtamer/periodic.hpp"

namespace conjtamer {

struct DefectInfo {
  /// sup over grid nodes of |u(x) - u(g(x)) - log Dg(x)|
  double sup = 0.0;
  double location = 0.0;
  /// sup over nodes and cell midpoints (the refinement check)
  double refined = 0.0;
};

enum class Construction { BirkhoffPositiveBall, NilpotentShell, Composite };

std::string to_string(Construction c);

struct CohomSolution {
  GridFunction u;
  std::vector<DefectInfo> defects;  // one per generator
  Construction construction = Construction::BirkhoffPositiveBall;
  /// n for Birkhoff, k_n for the nilpotent shell.
  int parameter = 0;

  double max_defect() const;
};

/// Per-generator defect of u on the action (u interpolated at g(x)).
std::vector<DefectInfo> cocycle_defect(const GridFunction& u, const Action& a);

/// u_n = |B+(n)|^{-1} sum over B+(n) of log De, normalised so that
/// integral exp(u_n) = 1. The action must be free abelian.
CohomSolution birkhoff_solution(const Action& a, int n);

/// u_1, ..., u_{n_max} from a single pass over B+(n_max), normalised.
std::vector<GridFunction> birkhoff_sequence(const Action& a, int n_max);

struct ShellOptions {
  int k_max = 16;
  double C = 4.0;
  /// Exponent threshold N0 of the large-exponent estimate.
  int N0 = 4;
};

struct NilpotentSolution {
  CohomSolution solution;
  double measured_C = 0.0;
  /// C N0 max|c| / k_n
  double small_exponent_term = 0.0;
  /// M C delta with delta = max over letters j and N0 <= m <= M k_n of sup |log Df_j^m| / m
  double large_exponent_term = 0.0;
  double delta = 0.0;
};

/// u = |B(k_n)|^{-1} sum over B(k_n) of log De with k_n the selected shell
/// radius number `shell_index`. Throws NoAdmissibleRadius.
NilpotentSolution nilpotent_average_solution(const Action& a, int shell_index, const ShellOptions& opts = {});

/// Average over the full ball B(k), normalised.
GridFunction ball_average(const Action& a, int k);

/// |B+(n)|^{-1} sum over B+(n) of log Df_i(e(x)).
double empirical_measure_integral(const Action& a, std::size_t i, int n, double x);

/// phi with log Dphi = u + C, C = -log integral exp(u). Throws NonFinite.
Diffeo conjugacy_from_log_density(const GridFunction& u);

/// Mean of log Df along a periodic orbit (throws NotPeriodic if the points
/// do not form an orbit to 1e-8), or a Birkhoff average from x.
double invariant_mean_log_derivative(const Diffeo& f, const PeriodicOrbit& orbit);
double invariant_mean_log_derivative(const Diffeo& f, double x, int N);

/// Defect of u = w o psi + log Dpsi on the original action, at grid nodes
/// that are not flagged points.
std::vector<DefectInfo> composite_defect(const GridFunction& w, const Flattening& psi, const Action& a);

struct PathSample {
  double t = 0.0;
  Diffeo phi;
  Action conjugated;
  /// max over generators of sup |log D(conjugated generator)|
  double c1_gap = 0.0;
  std::vector<double> defects;
  /// max over generators of max(c0, dlog) to the previous sample (0 for the first)
  double step_distance = 0.0;
};

/// Samples t = 1, 1 + 1/steps, ..., n_max with
/// v_t = (1-s) u_n + s u_{n+1} + C_t (t = n + s) and phi_t = integral exp(v_t).
/// Samples are handed to `sink` in order; computation is parallel in batches.
void for_each_path_sample(const Action& a, int n_max, int steps_per_unit,
                          const std::function<void(const PathSample&)>& sink);
std::vector<PathSample> path_of_conjugates(const Action& a, int n_max, int steps_per_unit);

/// Per-generator solutions u_1..u_n_max for any presentation: Birkhoff over
/// B+(n) when free abelian, else averages over B(n).
std::vector<GridFunction> solution_sequence(const Action& a, int n_max);

}  // namespace conjtamer
