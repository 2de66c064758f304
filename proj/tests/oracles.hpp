#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <vector>

namespace oracle {

/// Sizes of word-metric balls in the discrete Heisenberg group, computed by
/// BFS over upper unitriangular integer matrices
/// (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y').
inline std::vector<std::size_t> heisenberg_ball_sizes(int k_max) {
  using T = std::array<long, 3>;
  auto mul = [](const T& g, const T& h) { return T{g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]}; };
  const std::array<T, 4> gens{T{1, 0, 0}, T{-1, 0, 0}, T{0, 1, 0}, T{0, -1, 0}};
  std::set<T> seen{T{0, 0, 0}};
  std::vector<T> frontier{T{0, 0, 0}};
  std::vector<std::size_t> sizes{1};
  for (int r = 1; r <= k_max; ++r) {
    std::vector<T> next;
    for (const T& g : frontier)
      for (const T& s : gens) {
        const T h = mul(g, s);
        if (seen.insert(h).second) next.push_back(h);
      }
    frontier = std::move(next);
    sizes.push_back(seen.size());
  }
  return sizes;
}

/// Brute-force l1 lattice count in Z^d.
inline std::size_t l1_ball_brute(int d, int k) {
  std::vector<int> v(static_cast<std::size_t>(d), -k);
  std::size_t count = 0;
  for (;;) {
    int s = 0;
    for (int x : v) s += x < 0 ? -x : x;
    if (s <= k) ++count;
    int i = d - 1;
    while (i >= 0 && ++v[static_cast<std::size_t>(i)] > k) v[static_cast<std::size_t>(i--)] = -k;
    if (i < 0) break;
  }
  return count;
}

}  // namespace oracle
