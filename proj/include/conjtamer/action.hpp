#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "conjtamer/diffeo.hpp"
#include "conjtamer/group.hpp"
#include "conjtamer/parallel.hpp"

namespace conjtamer {

/// Assignment generator -> Diffeo. Extra normal-form letters are realised
/// from their defining words, and inverses are precomputed.
class Action {
 public:
  Action() = default;
  Action(Presentation presentation, std::vector<Diffeo> generators);

  const Presentation& presentation() const { return presentation_; }
  const Space& space() const { return maps_.front().space(); }
  std::size_t rank() const { return presentation_.rank(); }
  std::string name(std::size_t i) const { return presentation_.alphabet().at(i); }

  /// Map of alphabet letter i.
  const Diffeo& map(std::size_t i) const { return maps_.at(i); }
  const Diffeo& inverse_map(std::size_t i) const { return inverses_.at(i); }
  const Diffeo& letter(Letter l) const;
  /// The generating maps (first rank() letters).
  std::vector<Diffeo> generators() const { return {maps_.begin(), maps_.begin() + static_cast<std::ptrdiff_t>(rank())}; }

  /// Same presentation, generators phi o g o phi^{-1}.
  Action conjugated(const Diffeo& phi) const;
  Action with_generators(std::vector<Diffeo> generators) const { return Action(presentation_, std::move(generators)); }

 private:
  Presentation presentation_;
  std::vector<Diffeo> maps_;
  std::vector<Diffeo> inverses_;
};

/// Composite of the letters, rightmost applied first. The log-derivative is
/// accumulated through the cocycle identity by compose().
Diffeo word_realize(const Action& a, const Word& w);

struct RelationDeviation {
  std::string relation;
  double c0 = 0.0;
  double dlog = 0.0;
};

/// C0 and log-derivative deviation of every relation word from the identity.
/// Throws RelationViolation when some c0 exceeds tol.
std::vector<RelationDeviation> check_relations(const Action& a, const std::vector<Word>& relations, double tol);

/// Walks a ball in order and hands every element's orbit track to `visit`:
/// lifts e(x_j) and (optionally) cocycles log De(x_j) for base points x_j in
/// [begin, end). Base points are split across threads, so `visit` must only
/// touch state indexed by j; each element is visited once per chunk, in ball
/// order. Tracks are released after the last child of an element.
///
/// visit(element, begin, values, log_derivatives)
template <typename Visit>
void propagate_tracks(const Action& a, const Ball& ball, std::span<const double> base, bool with_cocycle,
                      Visit&& visit) {
  const std::size_t m = ball.size();
  std::vector<std::size_t> last_child(m, 0);
  for (std::size_t i = 1; i < m; ++i) last_child[static_cast<std::size_t>(ball.parent[i])] = i;
  parallel_for(
      base.size(),
      [&](std::size_t begin, std::size_t end) {
        const std::size_t len = end - begin;
        std::vector<std::vector<double>> values(m), logs(m);
        for (std::size_t i = 0; i < m; ++i) {
          std::vector<double>& v = values[i];
          std::vector<double>& c = logs[i];
          v.resize(len);
          if (with_cocycle) c.resize(len);
          if (i == 0) {
            for (std::size_t j = 0; j < len; ++j) v[j] = base[begin + j];
            if (with_cocycle) std::fill(c.begin(), c.end(), 0.0);
          } else {
            const auto p = static_cast<std::size_t>(ball.parent[i]);
            const Diffeo& s = a.letter(ball.letter[i]);
            const std::vector<double>& pv = values[p];
            for (std::size_t j = 0; j < len; ++j) v[j] = s.lift(pv[j]);
            if (with_cocycle) {
              const std::vector<double>& pc = logs[p];
              for (std::size_t j = 0; j < len; ++j) c[j] = pc[j] + s.log_derivative_at(pv[j]);
            }
            if (last_child[p] == i) {
              std::vector<double>().swap(values[p]);
              std::vector<double>().swap(logs[p]);
            }
          }
          visit(i, begin, std::span<const double>(v), std::span<const double>(c));
          if (last_child[i] == 0) {
            std::vector<double>().swap(values[i]);
            std::vector<double>().swap(logs[i]);
          }
        }
      },
      64);
}

}  // namespace conjtamer
