#include "conjtamer/spec.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "conjtamer/build.hpp"
#include "conjtamer/expr.hpp"

namespace conjtamer {

namespace {

struct Located {
  std::string text;
  int line = 0;
  int column = 0;  // 1-based column of text[0]
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg, int line, int column) {
  throw ParseError(code, msg, line, column);
}

[[noreturn]] void fail(const std::string& msg, const Located& at, std::size_t offset = 0) {
  fail(ErrorCode::SyntaxError, msg, at.line, at.column + static_cast<int>(offset));
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trims and shifts the column accordingly.
Located trim(Located s) {
  std::size_t b = 0, e = s.text.size();
  while (b < e && is_space(s.text[b])) ++b;
  while (e > b && is_space(s.text[e - 1])) --e;
  return {s.text.substr(b, e - b), s.line, s.column + static_cast<int>(b)};
}

double parse_number(const Located& s, std::size_t& pos) {
  while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
  const char* begin = s.text.data() + pos;
  const char* end = s.text.data() + s.text.size();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin) fail("expected a number", s, pos);
  pos += static_cast<std::size_t>(ptr - begin);
  return v;
}

double whole_number(const Located& s) {
  std::size_t pos = 0;
  const double v = parse_number(s, pos);
  while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
  if (pos != s.text.size()) fail("unexpected trailing text", s, pos);
  return v;
}

int whole_integer(const Located& s) {
  const double v = whole_number(s);
  if (v != static_cast<double>(static_cast<int>(v))) fail("expected an integer", s);
  return static_cast<int>(v);
}

void expect(const Located& s, std::size_t& pos, char c) {
  while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
  if (pos >= s.text.size() || s.text[pos] != c) fail(std::string("expected '") + c + "'", s, pos);
  ++pos;
}

std::vector<std::pair<double, double>> parse_knots(const Located& s, std::size_t pos) {
  std::vector<std::pair<double, double>> out;
  for (;;) {
    while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
    if (pos >= s.text.size()) break;
    expect(s, pos, '(');
    const double x = parse_number(s, pos);
    expect(s, pos, ',');
    const double y = parse_number(s, pos);
    expect(s, pos, ')');
    out.emplace_back(x, y);
  }
  if (out.size() < 2) fail("knots need at least two points", s);
  return out;
}

void parse_samples(const Located& s, std::size_t pos, GeneratorSource& g) {
  while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
  if (s.text.compare(pos, 7, "offset=") == 0) {
    pos += 7;
    g.offset = parse_number(s, pos);
  }
  expect(s, pos, ':');
  for (;;) {
    while (pos < s.text.size() && is_space(s.text[pos])) ++pos;
    if (pos >= s.text.size()) break;
    g.samples.push_back(parse_number(s, pos));
  }
}

Expression parse_expression(const Located& s) {
  try {
    return Expression::parse(s.text, s.line);
  } catch (const ParseError& e) {
    fail(e.code(), e.reason(), s.line, s.column + e.column() - 1);
  }
}

bool starts_with_word(const std::string& text, std::string_view word) {
  return text.size() > word.size() && text.compare(0, word.size(), word) == 0 && is_space(text[word.size()]);
}

Word parse_word_at(const Presentation& p, const Located& s) {
  try {
    return p.parse_word(s.text);
  } catch (const Error& e) {
    fail(e.code(), e.what(), s.line, s.column);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ActionSpec parse_action_spec(std::string_view text, std::optional<int> grid_override) {
  ActionSpec spec;
  std::string section;
  std::string kind = "interval";
  int grid = 4096;
  Located grid_at{"", 0, 1};
  std::optional<Located> generators_line, type_line;
  std::vector<Located> rules, relations, defines;
  int bounded_generation = 1;
  std::map<std::string, GeneratorSource> sources;
  std::map<std::string, Located> conjugators;
  std::vector<std::pair<GeneratorSource, Located>> raw_sources;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const Located line = trim({raw, line_no, 1});
    if (line.text.empty()) continue;
    if (line.text.front() == '[') {
      if (line.text.back() != ']') fail("unterminated section header", line);
      section = line.text.substr(1, line.text.size() - 2);
      if (section != "space" && section != "group" && section != "generators" && section != "pipeline")
        fail("unknown section [" + section + "]", line);
      continue;
    }
    if (section.empty()) fail("entry outside of any section", line);

    if (section == "group" && starts_with_word(line.text, "define")) {
      defines.push_back(trim({line.text.substr(6), line.line, line.column + 6}));
      continue;
    }
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'", line);
    const Located key = trim({line.text.substr(0, eq), line.line, line.column});
    const Located value = trim({line.text.substr(eq + 1), line.line, line.column + static_cast<int>(eq) + 1});
    if (key.text.empty()) fail("missing key", line);
    if (value.text.empty()) fail("missing value", value);

    if (section == "space") {
      if (key.text == "kind") {
        if (value.text != "interval" && value.text != "circle") fail("kind must be interval or circle", value);
        kind = value.text;
      } else if (key.text == "grid") {
        grid = whole_integer(value);
        grid_at = value;
      } else {
        fail("unknown key '" + key.text + "' in [space]", key);
      }
    } else if (section == "group") {
      if (key.text == "generators") generators_line = value;
      else if (key.text == "type") type_line = value;
      else if (key.text == "rule") rules.push_back(value);
      else if (key.text == "relation") relations.push_back(value);
      else if (key.text == "bounded_generation") bounded_generation = whole_integer(value);
      else if (key.text == "relation_tolerance") spec.relation_tolerance = whole_number(value);
      else fail("unknown key '" + key.text + "' in [group]", key);
    } else if (section == "generators") {
      const auto dot = key.text.find('.');
      if (dot != std::string::npos) {
        if (key.text.substr(dot + 1) != "conjugator") fail("unknown attribute '" + key.text.substr(dot + 1) + "'", key, dot + 1);
        conjugators[key.text.substr(0, dot)] = value;
        continue;
      }
      GeneratorSource g;
      g.name = key.text;
      g.line = line.line;
      if (starts_with_word(value.text, "knots")) {
        g.kind = GeneratorSource::Kind::Knots;
        g.knots = parse_knots(value, 5);
      } else if (starts_with_word(value.text, "samples")) {
        g.kind = GeneratorSource::Kind::Samples;
        parse_samples(value, 7, g);
      } else {
        g.kind = GeneratorSource::Kind::Expression;
        g.expression = value.text;
      }
      raw_sources.emplace_back(std::move(g), value);
    } else {
      PipelineParams& pp = spec.pipeline;
      if (key.text == "lambda") pp.lambda = whole_number(value);
      else if (key.text == "radius") pp.radius = whole_integer(value);
      else if (key.text == "epsilon") pp.epsilon = whole_number(value);
      else if (key.text == "delta") pp.delta = whole_number(value);
      else if (key.text == "alpha") pp.alpha = whole_number(value);
      else if (key.text == "nmax") pp.nmax = whole_integer(value);
      else if (key.text == "steps") pp.steps = whole_integer(value);
      else if (key.text == "L") pp.L = whole_integer(value);
      else if (key.text == "resolution") pp.resolution = whole_number(value);
      else if (key.text == "period_max") pp.period_max = whole_integer(value);
      else fail("unknown key '" + key.text + "' in [pipeline]", key);
    }
  }

  if (grid_override) grid = *grid_override;
  try {
    spec.space = Space::checked({kind == "circle" ? SpaceKind::Circle : SpaceKind::Interval, grid});
  } catch (const Error& e) {
    fail(ErrorCode::SyntaxError, e.what(), grid_at.line, grid_at.column);
  }

  if (!generators_line) fail("[group] needs a 'generators' entry", {{}, line_no + 1, 1});
  std::vector<std::string> names;
  {
    std::istringstream ws(generators_line->text);
    for (std::string n; ws >> n;) names.push_back(n);
  }
  std::string type = rules.empty() ? "abelian" : "nilpotent";
  if (type_line) {
    type = type_line->text;
    if (type != "abelian" && type != "nilpotent" && type != "free")
      fail("type must be abelian, nilpotent or free", *type_line);
    if (type == "abelian" && !rules.empty()) fail("abelian groups take no rules", *type_line);
  }
  try {
    if (type == "abelian") {
      if (!defines.empty()) fail("abelian groups take no extra letters", defines.front());
      spec.presentation = Presentation::free_abelian(names);
    } else {
      std::vector<std::string> rule_text;
      for (const auto& r : rules) rule_text.push_back(r.text);
      std::vector<std::pair<std::string, std::string>> defs;
      for (const auto& d : defines) {
        const auto eq = d.text.find('=');
        if (eq == std::string::npos) fail("expected 'define name = word'", d);
        defs.emplace_back(trim({d.text.substr(0, eq), d.line, d.column}).text, trim({d.text.substr(eq + 1), d.line, d.column}).text);
      }
      spec.presentation = Presentation::with_rules(names, rule_text, bounded_generation, defs);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    const Located& at = rules.empty() ? *generators_line : rules.front();
    fail(e.code(), e.what(), at.line, at.column);
  }
  const Presentation& p = spec.presentation;

  // Implied relations first, then the user's.
  if (p.abelian()) {
    for (std::size_t i = 0; i < p.rank(); ++i)
      for (std::size_t j = i + 1; j < p.rank(); ++j) {
        const int a = static_cast<int>(i), b = static_cast<int>(j);
        spec.relations.push_back({{a, 1}, {b, 1}, {a, -1}, {b, -1}});
      }
  }
  for (const auto& r : p.rules()) spec.relations.push_back(free_reduce(concat(r.lhs, inverse(r.rhs))));
  for (const auto& r : relations) {
    spec.relations.push_back(parse_word_at(p, r));
    spec.user_relations.push_back(r.text);
  }

  for (auto& [g, at] : raw_sources) {
    try {
      p.generator_index(g.name);
    } catch (const Error&) {
      fail(ErrorCode::UnknownGenerator, "'" + g.name + "' is not a generator", at.line, 1);
    }
    if (static_cast<std::size_t>(p.generator_index(g.name)) >= p.rank())
      fail(ErrorCode::SyntaxError, "'" + g.name + "' is defined by the presentation", at.line, 1);
    if (sources.count(g.name)) fail(ErrorCode::SyntaxError, "generator '" + g.name + "' defined twice", at.line, 1);
    sources[g.name] = g;
  }
  for (const auto& [name, at] : conjugators) {
    auto it = sources.find(name);
    if (it == sources.end()) fail(ErrorCode::UnknownGenerator, "conjugator for undefined generator '" + name + "'", at.line, 1);
    if (it->second.kind != GeneratorSource::Kind::Expression) fail("conjugators apply to expressions only", at);
    it->second.conjugator = at.text;
  }

  std::vector<Diffeo> maps;
  for (const auto& name : p.generators()) {
    auto it = sources.find(name);
    if (it == sources.end()) fail(ErrorCode::SyntaxError, "generator '" + name + "' has no definition", line_no, 1);
    const GeneratorSource& g = it->second;
    const Located* at = nullptr;
    for (const auto& [src, loc] : raw_sources)
      if (src.name == name) at = &loc;
    try {
      switch (g.kind) {
        case GeneratorSource::Kind::Expression: {
          const Expression f = parse_expression(*at);
          if (g.conjugator) {
            const Expression h = parse_expression(conjugators.at(name));
            maps.push_back(build_conjugated(f, h, spec.space));
          } else {
            maps.push_back(build_diffeo(f, spec.space));
          }
          break;
        }
        case GeneratorSource::Kind::Knots:
          maps.push_back(build_from_knots(g.knots, spec.space));
          break;
        case GeneratorSource::Kind::Samples:
          if (g.samples.size() != spec.space.sample_count())
            fail("expected " + std::to_string(spec.space.sample_count()) + " samples, got " +
                     std::to_string(g.samples.size()),
                 *at);
          maps.push_back(Diffeo::from_log_derivative(spec.space, g.samples, g.offset));
          break;
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(e.code(), e.what(), at->line, at->column);
    }
    spec.generators.push_back(g);
  }

  spec.action = Action(p, std::move(maps));
  spec.deviations = check_relations(spec.action, spec.relations, spec.relation_tolerance);
  return spec;
}

std::string write_sampled_spec(const ActionSpec& spec, const Action& action) {
  require_same_space(spec.space, action.space());
  const Presentation& p = spec.presentation;
  std::ostringstream os;
  os << "[space]\nkind = " << to_string(spec.space.kind) << "\ngrid = " << spec.space.grid_size << "\n\n[group]\n";
  os << "generators =";
  for (const auto& g : p.generators()) os << ' ' << g;
  os << "\ntype = " << (p.abelian() ? "abelian" : (p.rules().empty() ? "free" : "nilpotent")) << '\n';
  for (const auto& r : p.rules()) os << "rule = " << p.format(r.lhs) << " -> " << p.format(r.rhs) << '\n';
  for (std::size_t i = p.rank(); i < p.alphabet().size(); ++i)
    os << "define " << p.alphabet()[i] << " = " << p.format(p.definition(i)) << '\n';
  if (!p.abelian()) os << "bounded_generation = " << p.bounded_generation() << '\n';
  for (const auto& r : spec.user_relations) os << "relation = " << r << '\n';
  os << "relation_tolerance = " << format_double(spec.relation_tolerance) << "\n\n[generators]\n";
  for (std::size_t i = 0; i < action.rank(); ++i) {
    const Diffeo& g = action.map(i);
    os << action.name(i) << " = samples offset=" << format_double(g.offset()) << ':';
    for (double v : g.log_derivative_samples()) os << ' ' << format_double(v);
    os << '\n';
  }
  const PipelineParams& pp = spec.pipeline;
  os << "\n[pipeline]\nlambda = " << format_double(pp.lambda) << "\nradius = " << pp.radius
     << "\nepsilon = " << format_double(pp.epsilon) << "\ndelta = " << format_double(pp.delta) << '\n';
  if (pp.alpha) os << "alpha = " << format_double(*pp.alpha) << '\n';
  os << "nmax = " << pp.nmax << "\nsteps = " << pp.steps << "\nL = " << pp.L
     << "\nresolution = " << format_double(pp.resolution) << "\nperiod_max = " << pp.period_max << '\n';
  return os.str();
}

}  // namespace conjtamer
