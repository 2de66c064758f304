#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "conjtamer/pipeline.hpp"

using namespace conjtamer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitSpec = 2;
constexpr int kExitCertification = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugates group actions on the interval and the circle towards isometries."};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = "out";
  std::optional<int> grid, radius, nmax, steps, L, period_max;
  std::optional<double> lambda, epsilon, delta, alpha, resolution;

  app.add_option("--spec", spec_path, "action spec file")->required()->check(CLI::ExistingFile);
  app.add_option("--grid", grid, "grid size override (power of two >= 16)");
  app.add_option("--lambda", lambda, "weight of the truncated measure, in (0,1)");
  app.add_option("--radius", radius, "truncation radius N");
  app.add_option("--epsilon", epsilon, "target sup |log D| for tame-c1");
  app.add_option("--delta", delta, "flattening threshold");
  app.add_option("--alpha", alpha, "flattening exponent override");
  app.add_option("--nmax,--ball-radius", nmax, "largest solution index n");
  app.add_option("--steps,--path-steps", steps, "path samples per unit of t");
  app.add_option("-L", L, "word length bound for detect");
  app.add_option("--resolution", resolution, "detect search spacing and margin");
  app.add_option("--period-max", period_max, "largest period searched");
  app.add_option("--out", out_dir, "output directory");

  for (Command c : {Command::TameLipschitz, Command::TameC1, Command::Path, Command::Detect, Command::Flatten,
                    Command::Report}) {
    auto* sub = app.add_subcommand(std::string(to_string(c)))->fallthrough();
    if (c == Command::Detect) sub->add_flag("--resilient", "search resilient pairs (the only mode)");
  }

  CLI11_PARSE(app, argc, argv);
  const Command command = *parse_command(app.get_subcommands().front()->get_name());

  ActionSpec spec;
  try {
    std::ifstream in(spec_path);
    std::ostringstream text;
    text << in.rdbuf();
    spec = parse_action_spec(text.str(), grid);
  } catch (const Error& e) {
    std::cerr << spec_path << ": " << e.what() << '\n';
    return kExitSpec;
  }
  PipelineParams& pp = spec.pipeline;
  if (lambda) pp.lambda = *lambda;
  if (radius) pp.radius = *radius;
  if (epsilon) pp.epsilon = *epsilon;
  if (delta) pp.delta = *delta;
  if (alpha) pp.alpha = *alpha;
  if (nmax) pp.nmax = *nmax;
  if (steps) pp.steps = *steps;
  if (L) pp.L = *L;
  if (resolution) pp.resolution = *resolution;
  if (period_max) pp.period_max = *period_max;

  try {
    const Artifacts art = run_pipeline(command, spec);
    write_artifacts(art, out_dir);
    std::cout << art.report.dump(2) << '\n';
    return art.certified ? kExitOk : kExitCertification;
  } catch (const StageError& e) {
    std::cerr << "error " << e.what() << '\n';
    return e.code() == ErrorCode::LambdaOutOfRange ? kExitSpec : kExitFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
