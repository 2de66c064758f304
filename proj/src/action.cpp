#include "conjtamer/action.hpp"

namespace conjtamer {

Action::Action(Presentation presentation, std::vector<Diffeo> generators) : presentation_(std::move(presentation)) {
  if (generators.size() != presentation_.rank() || generators.empty())
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(presentation_.rank()) +
                                                " generator maps, got " + std::to_string(generators.size()));
  for (const Diffeo& g : generators) require_same_space(g.space(), generators.front().space());
  maps_ = std::move(generators);
  for (const Diffeo& g : maps_) inverses_.push_back(invert(g));
  for (std::size_t i = presentation_.rank(); i < presentation_.alphabet().size(); ++i) {
    Diffeo extra = Diffeo::identity(maps_.front().space());
    const Word def = presentation_.definition(i);
    for (auto it = def.rbegin(); it != def.rend(); ++it) extra = compose(letter(*it), extra);
    inverses_.push_back(invert(extra));
    maps_.push_back(std::move(extra));
  }
}

const Diffeo& Action::letter(Letter l) const {
  if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= maps_.size())
    throw Error(ErrorCode::UnknownGenerator, "letter outside the action");
  return l.sign > 0 ? maps_[static_cast<std::size_t>(l.gen)] : inverses_[static_cast<std::size_t>(l.gen)];
}

Action Action::conjugated(const Diffeo& phi) const {
  std::vector<Diffeo> gens;
  for (std::size_t i = 0; i < rank(); ++i) gens.push_back(conjugate_action(maps_[i], phi));
  return Action(presentation_, std::move(gens));
}

Diffeo word_realize(const Action& a, const Word& w) {
  Diffeo result = Diffeo::identity(a.space());
  for (auto it = w.rbegin(); it != w.rend(); ++it) result = compose(a.letter(*it), result);
  return result;
}

std::vector<RelationDeviation> check_relations(const Action& a, const std::vector<Word>& relations, double tol) {
  std::vector<RelationDeviation> out;
  const Diffeo id = Diffeo::identity(a.space());
  for (const Word& r : relations) {
    const C1Distance d = c1_distance(word_realize(a, r), id);
    out.push_back({a.presentation().format(r), d.c0, d.dlog});
    if (!(d.c0 <= tol))
      throw Error(ErrorCode::RelationViolation, "relation " + out.back().relation + " deviates by " +
                                                    std::to_string(d.c0) + " (tolerance " + std::to_string(tol) + ")");
  }
  return out;
}

}  // namespace conjtamer
