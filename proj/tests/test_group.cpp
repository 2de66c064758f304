#include <random>

#include "conjtamer/group.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace conjtamer;

namespace {

Presentation heisenberg() {
  return Presentation::with_rules(
      {"a", "b"},
      {"b a -> a b c^-1", "b a^-1 -> a^-1 b c", "b^-1 a -> a b^-1 c", "b^-1 a^-1 -> a^-1 b^-1 c^-1",
       "c a -> a c", "c a^-1 -> a^-1 c", "c b -> b c", "c b^-1 -> b^-1 c",
       "c^-1 a -> a c^-1", "c^-1 a^-1 -> a^-1 c^-1", "c^-1 b -> b c^-1", "c^-1 b^-1 -> b^-1 c^-1"},
      4, {{"c", "a b a^-1 b^-1"}});
}

}  // namespace

TEST_CASE("positive balls") {
  const Ball b1 = enumerate_positive_ball(1, 4);
  REQUIRE(b1.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(b1.lengths[static_cast<std::size_t>(k)] == k);
  CHECK(enumerate_positive_ball(2, 3).size() == 9);
  const Ball b3 = enumerate_positive_ball(3, 10);
  CHECK(b3.size() == 1000);
  Word w;
  for (int i = 0; i < 9; ++i) w.push_back({1, 1});
  for (int i = 0; i < 5; ++i) w.push_back({2, 1});
  CHECK(b3.find(w) == 95);
  for (std::size_t i = 1; i < b3.size(); ++i) {
    const auto p = static_cast<std::size_t>(b3.parent[i]);
    REQUIRE(p < i);
    CHECK(concat({b3.letter[i]}, b3.elements[p]).size() == b3.elements[i].size());
  }
  CHECK_THROWS_WITH_AS(enumerate_positive_ball(4, 100, 1000), doctest::Contains("SizeOverflow"), Error);
}

TEST_CASE("full balls in Z^d match lattice counts") {
  const auto z1 = Presentation::free_abelian({"f"});
  CHECK(enumerate_ball(z1, 3).size() == 7);
  const auto z2 = Presentation::free_abelian({"f", "g"});
  CHECK(enumerate_ball(z2, 2).size() == 13);
  for (int d = 1; d <= 3; ++d) {
    std::vector<std::string> names;
    for (int i = 0; i < d; ++i) names.push_back("g" + std::to_string(i));
    const auto p = Presentation::free_abelian(names);
    const auto sizes = ball_sizes(p, 6);
    for (int k = 0; k <= 6; ++k) {
      CHECK(sizes[static_cast<std::size_t>(k)] == oracle::l1_ball_brute(d, k));
      CHECK(l1_ball_count(d, k) == oracle::l1_ball_brute(d, k));
      if (k > 0) CHECK(sizes[static_cast<std::size_t>(k)] >= sizes[static_cast<std::size_t>(k) - 1]);
    }
  }
  CHECK(enumerate_ball(Presentation::free_abelian({}), 5).size() == 1);
}

TEST_CASE("Heisenberg balls match the matrix BFS oracle") {
  const auto h3 = heisenberg();
  const auto expected = oracle::heisenberg_ball_sizes(8);
  CHECK(expected[1] == 5);
  const auto sizes = ball_sizes(h3, 8);
  for (int k = 0; k <= 8; ++k) CHECK(sizes[static_cast<std::size_t>(k)] == expected[static_cast<std::size_t>(k)]);
}

TEST_CASE("normal forms") {
  const auto h3 = heisenberg();
  CHECK(h3.format(h3.normal_form(h3.parse_word("b a"))) == "a b c^-1");
  CHECK(h3.format(h3.normal_form(h3.parse_word("[a,b]"))) == "c");
  CHECK(h3.format(h3.normal_form(h3.parse_word("a a^-1 b^2 b^-2"))) == "e");
  // Idempotence on random words up to length 6 over the full alphabet.
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> gen(0, 2), sign(0, 1), len(0, 6);
  for (int t = 0; t < 500; ++t) {
    Word w;
    for (int i = len(rng); i > 0; --i) w.push_back({gen(rng), sign(rng) ? 1 : -1});
    const Word nf = h3.normal_form(w);
    CHECK(h3.normal_form(nf) == nf);
  }
  const auto z2 = Presentation::free_abelian({"f", "g"});
  CHECK(z2.format(z2.normal_form(z2.parse_word("g f g^-1 f^3"))) == "f^4");
  CHECK_THROWS_WITH_AS(z2.parse_word("f h"), doctest::Contains("UnknownGenerator"), Error);
}

TEST_CASE("non-confluent rules are rejected") {
  CHECK_THROWS_WITH_AS(Presentation::with_rules({"a", "b"}, {"a b -> b", "b a -> a"}, 1),
                       doctest::Contains("NonConfluent"), Error);
  CHECK_THROWS_WITH_AS(Presentation::with_rules({"a", "b"}, {"b a -> a b c"}, 1), doctest::Contains("UnknownGenerator"),
                       Error);
}

TEST_CASE("shell radii") {
  const auto z1 = Presentation::free_abelian({"f"});
  auto sel = select_shell_radii(z1, 10, 1.0);
  CHECK(sel.radii.size() == 10);
  CHECK(sel.measured_constant == doctest::Approx(2.0 / 3.0));
  const auto z2 = Presentation::free_abelian({"f", "g"});
  sel = select_shell_radii(z2, 10, 3.0);
  CHECK(sel.radii.size() == 10);
  CHECK(sel.radii.front() == 1);
  CHECK(select_shell_radii(z2, 10, 1.0).radii.empty());
  sel = select_shell_radii(Presentation::free_abelian({}), 5, 0.1);
  CHECK(sel.radii.size() == 5);
  CHECK(sel.measured_constant == 0.0);
}
