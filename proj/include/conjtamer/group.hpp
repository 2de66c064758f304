#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "conjtamer/errors.hpp"

namespace conjtamer {

/// One letter of a word: generator index and exponent sign (+1 or -1).
struct Letter {
  int gen = 0;
  int sign = 1;

  Letter inverse() const { return {gen, -sign}; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
/// Cancels adjacent x x^{-1} pairs.
Word free_reduce(const Word& w);

struct RewriteRule {
  Word lhs;
  Word rhs;
};

inline constexpr std::size_t kDefaultSizeCap = 10'000'000;

/// Generators plus a normal form.
///
/// Free abelian presentations use the exponent-vector normal form
/// f1^n1 ... fd^nd directly. Other nilpotent groups supply rewriting rules
/// which, together with free reduction, must be confluent on every word of
/// length <= 6; this is checked when the presentation is built.
///
/// The normal-form alphabet may be larger than the generating set: the
/// first rank() letters generate (balls and word lengths use only them) and
/// every further letter carries a defining word in the generators.
class Presentation {
 public:
  Presentation() = default;

  /// Z^d with the given generator names (an empty list is the trivial group).
  static Presentation free_abelian(std::vector<std::string> names);
  /// Rules in text form, e.g. "b a -> a b c^-1". Throws NonConfluent.
  /// `definitions` maps each extra alphabet letter (after the generators) to
  /// a word in the generators.
  static Presentation with_rules(std::vector<std::string> generators, const std::vector<std::string>& rules,
                                 int bounded_generation,
                                 const std::vector<std::pair<std::string, std::string>>& definitions = {});

  std::vector<std::string> generators() const { return {names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(rank_)}; }
  const std::vector<std::string>& alphabet() const { return names_; }
  std::size_t rank() const { return rank_; }
  /// Defining word of alphabet letter i; for i < rank() the letter itself.
  Word definition(std::size_t i) const;
  bool abelian() const { return abelian_; }
  /// M in the per-exponent bound |n_j| <= M k for elements of B(k).
  int bounded_generation() const { return bounded_generation_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }

  /// Throws UnknownGenerator.
  int generator_index(std::string_view name) const;

  Word normal_form(const Word& w) const;

  /// Words are whitespace-separated tokens "name" or "name^-1" (also
  /// "name^k" for integer k); "e" or an empty string is the identity.
  Word parse_word(std::string_view text) const;
  std::string format(const Word& w) const;

 private:
  Word rewrite(const Word& w) const;
  void check_confluence() const;

  std::vector<std::string> names_;
  std::size_t rank_ = 0;
  std::vector<Word> definitions_;
  std::vector<RewriteRule> rules_;
  bool abelian_ = true;
  int bounded_generation_ = 1;
};

enum class BallKind { Full, Positive };

/// Group elements listed so that every element except the first is
/// letter[i] * elements[parent[i]] with parent[i] < i. The first element is
/// the identity.
struct Ball {
  int radius = 0;
  BallKind kind = BallKind::Full;
  std::vector<Word> elements;
  std::vector<int> lengths;
  std::vector<std::ptrdiff_t> parent;
  std::vector<Letter> letter;

  std::size_t size() const { return elements.size(); }
  /// Number of elements of each length 0..max length.
  std::vector<std::size_t> sphere_sizes() const;
  /// Index of a normal-form word, or -1.
  std::ptrdiff_t find(const Word& normal_form) const;
  /// For each element, the index of its inverse (Full balls only).
  std::vector<std::size_t> inverse_indices(const Presentation& p) const;

  std::unordered_map<std::string, std::size_t> index;
};

/// Stable byte key of a normal-form word.
std::string word_key(const Word& w);

/// B+(n) = {f1^k1 ... fd^kd : 0 <= k_i < n} in lexicographic order of
/// exponent vectors. The parent of an element lowers its first nonzero
/// exponent.
Ball enumerate_positive_ball(int d, int n, std::size_t cap = kDefaultSizeCap);

/// Breadth-first closure of the identity under left multiplication by
/// generators and their inverses, deduplicated by normal form.
Ball enumerate_ball(const Presentation& p, int k, std::size_t cap = kDefaultSizeCap);

/// |B(0)|, ..., |B(k_max)|.
std::vector<std::size_t> ball_sizes(const Presentation& p, int k_max, std::size_t cap = kDefaultSizeCap);

/// Exact size of the l1 ball of radius k in Z^d.
std::uint64_t l1_ball_count(int d, int k);

struct ShellSelection {
  std::vector<int> radii;
  /// Smallest C for which at least one radius in 1..k_max is admissible.
  double measured_constant = 0.0;
};

/// Radii k in 1..k_max with |B(k+1) \ B(k)| / |B(k)| <= C / k.
ShellSelection select_shell_radii(const Presentation& p, int k_max, double C);

}  // namespace conjtamer
