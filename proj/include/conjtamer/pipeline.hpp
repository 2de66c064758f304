#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conjtamer/cohomology.hpp"
#include "conjtamer/flatten.hpp"
#include "conjtamer/spec.hpp"
#include "json.hpp"

namespace conjtamer {

enum class Command { TameLipschitz, TameC1, Path, Detect, Flatten, Report };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

inline constexpr int kSchemaVersion = 1;

/// A library error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), "[" + stage + "] " + strip_code(cause)), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  static std::string strip_code(const Error& e) {
    const std::string what = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  }
  std::string stage_;
};

/// Stages in order: periodic orbits, flattening psi, solution w on the
/// flattened action, composite u = w o psi + log Dpsi, conjugation.
struct TameC1Outcome {
  std::vector<std::vector<PeriodicOrbit>> orbits;  // per generator, before flattening
  FlattenResult flattening;
  /// Index n of the chosen u_n (smallest refined defect over 1..nmax).
  int n = 0;
  CohomSolution w;
  /// Defect of the composite u on the original action away from flagged points.
  std::vector<DefectInfo> composite;
  Diffeo phi_w;
  Action final_action;
  /// sup |log D| per generator of the final action.
  std::vector<double> final_sup;
  double final_max = 0.0;
  /// Largest |log multiplier| / period over the flattened periodic orbits:
  /// no conjugate can go below it.
  double floor = 0.0;
  /// final_max - floor.
  double defect_slack = 0.0;
  bool certified = false;
  /// Periodic orbits of the final generators, and whether each satisfies
  /// |log Df^N(x0)| < N final_max (1 + 1e-6).
  std::vector<std::vector<PeriodicOrbit>> final_orbits;
  bool multiplier_bound_holds = true;
};

TameC1Outcome tame_c1(const ActionSpec& spec);

struct Artifacts {
  nlohmann::json report;
  /// Extra output files (name, content).
  std::vector<std::pair<std::string, std::string>> files;
  /// False when bounds were not met (exit code 3).
  bool certified = true;
};

/// Runs one command. Library errors are rethrown as StageError.
Artifacts run_pipeline(Command c, const ActionSpec& spec);

/// Writes report.json and the extra files into dir (created if missing).
void write_artifacts(const Artifacts& art, const std::filesystem::path& dir);

/// {space, grid_size, log_deriv, offset}
nlohmann::json to_json(const Diffeo& f);

}  // namespace conjtamer
