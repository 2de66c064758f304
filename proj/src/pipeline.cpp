#include "conjtamer/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conjtamer/periodic.hpp"
#include "conjtamer/taming.hpp"

namespace conjtamer {

using nlohmann::json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::TameLipschitz: return "tame-lipschitz";
    case Command::TameC1: return "tame-c1";
    case Command::Path: return "path";
    case Command::Detect: return "detect";
    case Command::Flatten: return "flatten";
    case Command::Report: return "report";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::TameLipschitz, Command::TameC1, Command::Path, Command::Detect, Command::Flatten,
                    Command::Report})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

json to_json(const Diffeo& f) {
  const auto ld = f.log_derivative_samples();
  return {{"space", to_string(f.space().kind)},
          {"grid_size", f.space().grid_size},
          {"log_deriv", std::vector<double>(ld.begin(), ld.end())},
          {"offset", f.offset()}};
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::string group_type(const Presentation& p) {
  return p.abelian() ? "abelian" : (p.rules().empty() ? "free" : "nilpotent");
}

json header(Command c, const ActionSpec& spec) {
  const Presentation& p = spec.presentation;
  json rel = json::array();
  for (const auto& d : spec.deviations) rel.push_back({{"relation", d.relation}, {"c0", d.c0}, {"dlog", d.dlog}});
  const PipelineParams& pp = spec.pipeline;
  json params = {{"lambda", pp.lambda}, {"radius", pp.radius}, {"epsilon", pp.epsilon}, {"delta", pp.delta},
                 {"nmax", pp.nmax},     {"steps", pp.steps},   {"L", pp.L},             {"resolution", pp.resolution},
                 {"period_max", pp.period_max}};
  if (pp.alpha) params["alpha"] = *pp.alpha;
  return {{"schema_version", kSchemaVersion},
          {"command", std::string(to_string(c))},
          {"space", {{"kind", to_string(spec.space.kind)}, {"grid_size", spec.space.grid_size}}},
          {"group",
           {{"generators", p.generators()},
            {"normal_form_alphabet", p.alphabet()},
            {"type", group_type(p)},
            {"relations", rel}}},
          {"parameters", params}};
}

json orbit_json(const PeriodicOrbit& o) {
  return {{"points", o.points},
          {"period", o.period},
          {"log_multiplier", o.log_multiplier()},
          {"classification", o.identity_like ? "identity-like" : (o.hyperbolic ? "hyperbolic" : "parabolic")}};
}

json orbits_json(const Action& a, const std::vector<std::vector<PeriodicOrbit>>& orbits) {
  json out = json::object();
  for (std::size_t g = 0; g < orbits.size(); ++g) {
    json list = json::array();
    for (const auto& o : orbits[g]) list.push_back(orbit_json(o));
    out[a.name(g)] = list;
  }
  return out;
}

std::vector<std::vector<PeriodicOrbit>> generator_orbits(const Action& a, int period_max) {
  std::vector<std::vector<PeriodicOrbit>> out;
  for (std::size_t g = 0; g < a.rank(); ++g) out.push_back(find_periodic_points(a.map(g), period_max));
  return out;
}

double sup_log_derivative(const Diffeo& f) { return f.log_derivative().sup_norm(); }

json per_generator(const Action& a, const std::vector<double>& v) {
  json out = json::object();
  for (std::size_t g = 0; g < v.size(); ++g) out[a.name(g)] = v[g];
  return out;
}

json defects_json(const Action& a, const std::vector<DefectInfo>& d) {
  json out = json::object();
  for (std::size_t g = 0; g < d.size(); ++g)
    out[a.name(g)] = {{"sup", d[g].sup}, {"location", d[g].location}, {"refined", d[g].refined}};
  return out;
}

FlattenOptions flatten_options(const ActionSpec& spec) {
  FlattenOptions fo;
  fo.delta = spec.pipeline.delta;
  fo.alpha_override = spec.pipeline.alpha;
  fo.period_max = spec.pipeline.period_max;
  return fo;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Artifacts run_tame_lipschitz(const ActionSpec& spec) {
  const PipelineParams& pp = spec.pipeline;
  const TamingResult t = stage("tame", [&] { return tame_lipschitz(spec.action, pp.lambda, pp.radius); });
  const PushforwardCheck push = stage("pushforward", [&] { return check_pushforward(t.measure, spec.action); });
  Artifacts art;
  json& r = art.report = header(Command::TameLipschitz, spec);
  json gens = json::object();
  for (const auto& g : t.report.generators)
    gens[g.name] = {{"lip", g.dq_h},
                    {"lip_inv", g.inverse_dq_h},
                    {"lip_2h", g.dq_2h},
                    {"lip_inv_2h", g.inverse_dq_2h},
                    {"untamed_lip", g.untamed_dq_h},
                    {"untamed_lip_inv", g.untamed_inverse_dq_h}};
  r["per_generator"] = gens;
  r["tail_bound"] = t.report.tail_bound;
  r["tail_exact"] = t.measure.tail_exact();
  r["mass"] = t.report.mass;
  r["mass_bound"] = t.measure.mass_bound();
  r["growth_constant"] = t.measure.growth_constant();
  r["slack"] = t.report.slack;
  r["bound"] = t.report.bound;
  r["pushforward"] = {{"intervals", push.intervals}, {"violations", push.violations}, {"worst_margin", push.worst_margin}};
  r["certified"] = t.report.certified && push.violations == 0;
  r["reason"] = push.violations == 0 ? t.report.reason
                                     : (t.report.reason.empty() ? "" : t.report.reason + "; ") +
                                           "pushforward inequality violated";
  art.certified = r["certified"].get<bool>();
  art.files.emplace_back("tamed.spec", write_sampled_spec(spec, t.tamed));
  return art;
}

Artifacts run_tame_c1(const ActionSpec& spec) {
  const TameC1Outcome o = tame_c1(spec);
  const Action& a = spec.action;
  Artifacts art;
  json& r = art.report = header(Command::TameC1, spec);
  std::vector<double> original, flattened;
  for (std::size_t g = 0; g < a.rank(); ++g) {
    original.push_back(sup_log_derivative(a.map(g)));
    flattened.push_back(sup_log_derivative(o.flattening.tamed.map(g)));
  }
  const Flattening& psi = o.flattening.psi;
  json stages;
  stages["periodic"] = orbits_json(a, o.orbits);
  stages["flatten"] = {{"alpha", o.flattening.alpha},
                       {"points", psi.points()},
                       {"radius", psi.radius()},
                       {"identity", psi.is_identity()},
                       {"sup_log_derivative", per_generator(a, flattened)}};
  stages["solve"] = {{"n", o.n},
                     {"construction", a.presentation().abelian() ? "BirkhoffPositiveBall" : "FullBallAverage"},
                     {"defects", defects_json(a, o.w.defects)}};
  stages["compose"] = {{"construction", to_string(psi.is_identity() ? o.w.construction : Construction::Composite)},
                       {"defects", defects_json(a, o.composite)}};
  stages["final"] = {{"sup_log_derivative", per_generator(a, o.final_sup)},
                     {"max", o.final_max},
                     {"floor", o.floor},
                     {"defect_slack", o.defect_slack},
                     {"epsilon", spec.pipeline.epsilon},
                     {"certified", o.certified}};
  stages["multipliers"] = {{"bounded", o.multiplier_bound_holds}, {"orbits", orbits_json(a, o.final_orbits)}};
  r["stages"] = stages;
  r["sup_log_derivative"] = {{"original", per_generator(a, original)},
                             {"flattened", per_generator(a, flattened)},
                             {"final", per_generator(a, o.final_sup)}};
  r["certified"] = o.certified;
  art.certified = o.certified;
  art.files.emplace_back("tamed.spec", write_sampled_spec(spec, o.final_action));
  return art;
}

Artifacts run_path(const ActionSpec& spec) {
  const PipelineParams& pp = spec.pipeline;
  const Action& a = spec.action;
  const FlattenResult fl = stage("flatten", [&] { return flatten_hyperbolic(a, flatten_options(spec)); });
  const Action& base = fl.tamed;
  std::ostringstream jsonl, csv;
  csv << "t,c1_gap,step_distance";
  for (std::size_t g = 0; g < a.rank(); ++g) csv << ",defect_" << a.name(g);
  csv << '\n';
  json integer_gaps = json::array();
  double max_step = 0.0;
  std::size_t count = 0;
  PathSample last;
  stage("path", [&] {
    for_each_path_sample(base, pp.nmax, pp.steps, [&](const PathSample& s) {
      json line = {{"t", s.t},
                   {"c1_gap", s.c1_gap},
                   {"defects", per_generator(a, s.defects)},
                   {"step_distance", s.step_distance},
                   {"phi", to_json(s.phi)}};
      jsonl << line.dump() << '\n';
      csv << format_double(s.t) << ',' << format_double(s.c1_gap) << ',' << format_double(s.step_distance);
      for (double d : s.defects) csv << ',' << format_double(d);
      csv << '\n';
      if (s.t == std::floor(s.t)) integer_gaps.push_back({s.t, s.c1_gap});
      max_step = std::max(max_step, s.step_distance);
      ++count;
      last = s;
    });
    return 0;
  });
  Artifacts art;
  json& r = art.report = header(Command::Path, spec);
  r["flattened"] = !fl.psi.is_identity();
  r["samples"] = count;
  r["final_c1_gap"] = last.c1_gap;
  r["integer_c1_gaps"] = integer_gaps;
  r["max_step_distance"] = max_step;
  if (a.space().is_circle()) {
    json rot = json::object();
    for (std::size_t g = 0; g < a.rank(); ++g)
      rot[a.name(g)] = {{"start", rotation_number(base.map(g), 10000).value},
                        {"end", rotation_number(last.conjugated.map(g), 10000).value}};
    r["rotation_numbers"] = rot;
  }
  art.files.emplace_back("path.jsonl", jsonl.str());
  art.files.emplace_back("path.csv", csv.str());
  return art;
}

Artifacts run_detect(const ActionSpec& spec) {
  const PipelineParams& pp = spec.pipeline;
  const Action& a = spec.action;
  const auto w = stage("detect", [&] { return detect_resilient(a, pp.L, pp.resolution); });
  Artifacts art;
  json& r = art.report = header(Command::Detect, spec);
  if (!w) {
    r["witness"] = nullptr;
    return art;
  }
  const Diffeo f = word_realize(a, w->f_word), g = word_realize(a, w->g_word);
  r["witness"] = {{"f_word", a.presentation().format(w->f_word)},
                  {"g_word", a.presentation().format(w->g_word)},
                  {"x", w->x},
                  {"y", w->y},
                  {"points", {w->x, f.lift(w->x), f.lift(w->y), g.lift(w->x), g.lift(w->y), w->y}},
                  {"margins", w->margins}};
  return art;
}

Artifacts run_flatten(const ActionSpec& spec) {
  const Action& a = spec.action;
  const FlattenResult fl = stage("flatten", [&] { return flatten_hyperbolic(a, flatten_options(spec)); });
  const auto before = stage("periodic", [&] { return generator_orbits(a, spec.pipeline.period_max); });
  const auto after = stage("periodic", [&] { return generator_orbits(fl.tamed, spec.pipeline.period_max); });
  Artifacts art;
  json& r = art.report = header(Command::Flatten, spec);
  r["alpha"] = fl.alpha;
  r["points"] = fl.psi.points();
  r["radius"] = fl.psi.radius();
  r["identity"] = fl.psi.is_identity();
  r["orbits_before"] = orbits_json(a, before);
  r["orbits_after"] = orbits_json(a, after);
  art.files.emplace_back("flattened.spec", write_sampled_spec(spec, fl.tamed));
  return art;
}

Artifacts run_report(const ActionSpec& spec) {
  const Action& a = spec.action;
  const PipelineParams& pp = spec.pipeline;
  Artifacts art;
  json& r = art.report = header(Command::Report, spec);
  const int k = std::min(pp.radius, 8);
  r["ball_sizes"] = stage("balls", [&] { return ball_sizes(a.presentation(), k); });
  if (k >= 2)
    r["shell_growth_constant"] = stage("balls", [&] { return select_shell_radii(a.presentation(), k, 1e9).measured_constant; });
  r["orbits"] = orbits_json(a, stage("periodic", [&] { return generator_orbits(a, pp.period_max); }));
  std::vector<double> sup;
  for (std::size_t g = 0; g < a.rank(); ++g) sup.push_back(sup_log_derivative(a.map(g)));
  r["sup_log_derivative"] = per_generator(a, sup);
  if (a.space().is_circle()) {
    std::vector<double> rho;
    for (std::size_t g = 0; g < a.rank(); ++g) rho.push_back(rotation_number(a.map(g), 10000).value);
    r["rotation_numbers"] = per_generator(a, rho);
  }
  return art;
}

}  // namespace

TameC1Outcome tame_c1(const ActionSpec& spec) {
  const PipelineParams& pp = spec.pipeline;
  const Action& a = spec.action;
  TameC1Outcome o;
  o.orbits = stage("periodic", [&] { return generator_orbits(a, pp.period_max); });
  o.flattening = stage("flatten", [&] { return flatten_hyperbolic(a, flatten_options(spec)); });
  const Action& flat = o.flattening.tamed;

  stage("solve", [&] {
    const std::vector<GridFunction> seq = solution_sequence(flat, pp.nmax);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto d = cocycle_defect(seq[i], flat);
      double m = 0.0;
      for (const auto& x : d) m = std::max(m, x.refined);
      if (m < best) {
        best = m;
        o.n = static_cast<int>(i) + 1;
        o.w.u = seq[i];
        o.w.defects = d;
      }
    }
    o.w.construction = a.presentation().abelian() ? Construction::BirkhoffPositiveBall : Construction::NilpotentShell;
    o.w.parameter = o.n;
    return 0;
  });

  stage("compose", [&] {
    o.composite = composite_defect(o.w.u, o.flattening.psi, a);
    o.phi_w = conjugacy_from_log_density(o.w.u);
    o.final_action = flat.conjugated(o.phi_w);
    return 0;
  });

  stage("certify", [&] {
    for (std::size_t g = 0; g < a.rank(); ++g) {
      o.final_sup.push_back(sup_log_derivative(o.final_action.map(g)));
      o.final_max = std::max(o.final_max, o.final_sup.back());
    }
    for (const auto& orbits : generator_orbits(flat, pp.period_max))
      for (const auto& orb : orbits)
        if (!orb.identity_like) o.floor = std::max(o.floor, std::abs(orb.log_multiplier()) / orb.period);
    o.defect_slack = o.final_max - o.floor;
    o.certified = o.final_max <= pp.epsilon;
    o.final_orbits = generator_orbits(o.final_action, pp.period_max);
    for (const auto& orbits : o.final_orbits)
      for (const auto& orb : orbits) {
        const double m = std::abs(orb.log_multiplier());
        if (!(m < orb.period * o.final_max * (1.0 + 1e-6) || m <= 1e-12)) o.multiplier_bound_holds = false;
      }
    return 0;
  });
  return o;
}

Artifacts run_pipeline(Command c, const ActionSpec& spec) {
  switch (c) {
    case Command::TameLipschitz: return run_tame_lipschitz(spec);
    case Command::TameC1: return run_tame_c1(spec);
    case Command::Path: return run_path(spec);
    case Command::Detect: return run_detect(spec);
    case Command::Flatten: return run_flatten(spec);
    case Command::Report: return run_report(spec);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown command");
}

void write_artifacts(const Artifacts& art, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
    out << content;
  };
  write("report.json", art.report.dump(2) + "\n");
  for (const auto& [name, content] : art.files) write(name, content);
}

}  // namespace conjtamer
