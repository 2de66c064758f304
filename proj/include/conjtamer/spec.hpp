#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conjtamer/action.hpp"

namespace conjtamer {

/// How one generator was defined in the spec text.
struct GeneratorSource {
  enum class Kind { Expression, Knots, Samples };
  std::string name;
  Kind kind = Kind::Expression;
  std::string expression;
  /// When set, the generator is conjugator o expression o conjugator^{-1}.
  std::optional<std::string> conjugator;
  std::vector<std::pair<double, double>> knots;
  /// Log-derivative samples and circle offset.
  std::vector<double> samples;
  double offset = 0.0;
  int line = 0;
};

struct PipelineParams {
  double lambda = 0.9048;
  int radius = 40;
  double epsilon = 0.1;
  double delta = 0.1;
  std::optional<double> alpha;
  int nmax = 24;
  int steps = 8;
  int L = 4;
  double resolution = 0.01;
  int period_max = 4;
};

struct ActionSpec {
  Space space;
  Presentation presentation;
  std::vector<GeneratorSource> generators;
  /// Relations checked at load: user relations plus the ones implied by the
  /// presentation (commutators of abelian generators, lhs rhs^{-1} of rules).
  std::vector<Word> relations;
  /// Relations as written by the user.
  std::vector<std::string> user_relations;
  double relation_tolerance = 1e-6;
  PipelineParams pipeline;
  Action action;
  std::vector<RelationDeviation> deviations;
};

/// Spec text:
///
///   # comment
///   [space]
///   kind = interval | circle
///   grid = 4096
///
///   [group]
///   generators = a b
///   type = abelian | nilpotent | free   (default: nilpotent with rules,
///                                        abelian without)
///   rule = b a -> a b c^-1          (repeatable)
///   define c = a b a^-1 b^-1        (extra normal-form letters)
///   bounded_generation = 4
///   relation = [a,b]                (repeatable; words, [u,v] commutators)
///   relation_tolerance = 1e-6
///
///   [generators]
///   a = x/(2-x)
///   a = x + 0.618034
///   a.conjugator = x + 0.1*sin(2*pi*x)
///   b = knots (0,0) (0.05,0.2) (1,1)
///   b = samples offset=0.25: 0.01 0.02 ...   (log-derivative at the nodes)
///
///   [pipeline]                      (one key per line)
///   lambda, radius, epsilon, delta, alpha, nmax, steps, L, resolution,
///   period_max
///
/// Errors are ParseError (SyntaxError, UnknownFunction, UnknownGenerator)
/// with line and column, or RelationViolation with the measured deviation.
/// `grid` replaces the grid size given in [space].
ActionSpec parse_action_spec(std::string_view text, std::optional<int> grid = std::nullopt);

/// The same spec with every generator written as log-derivative samples of
/// the given action, which must share the spec's presentation and space.
std::string write_sampled_spec(const ActionSpec& spec, const Action& action);

}  // namespace conjtamer
