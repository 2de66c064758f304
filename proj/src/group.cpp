#include "conjtamer/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace conjtamer {

namespace {

constexpr std::size_t kRewriteStepCap = 50'000'000;

bool ends_with(const Word& out, const Word& lhs) {
  if (lhs.size() > out.size()) return false;
  return std::equal(lhs.begin(), lhs.end(), out.end() - static_cast<std::ptrdiff_t>(lhs.size()));
}

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class WordParser {
 public:
  WordParser(const Presentation& p, std::string_view text) : p_(p), s_(text) {}

  Word parse() {
    Word w = sequence();
    skip();
    if (pos_ < s_.size()) fail("unexpected character");
    return w;
  }

 private:
  Word sequence() {
    Word w;
    for (;;) {
      skip();
      if (pos_ >= s_.size() || s_[pos_] == ',' || s_[pos_] == ']') return w;
      const Word part = atom();
      w.insert(w.end(), part.begin(), part.end());
    }
  }

  Word atom() {
    Word base;
    if (s_[pos_] == '[') {
      ++pos_;
      const Word a = sequence();
      expect(',');
      const Word b = sequence();
      expect(']');
      base = concat(concat(a, b), concat(inverse(a), inverse(b)));
    } else if (is_name_char(s_[pos_])) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "e" && !has_letter("e")) return {};
      base = {Letter{p_.generator_index(name), 1}};
    } else {
      fail("unexpected character");
    }
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      int sign = 1;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) sign = s_[pos_++] == '-' ? -1 : 1;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      const int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
      Word unit = sign > 0 ? base : inverse(base);
      base.clear();
      for (int i = 0; i < k; ++i) base.insert(base.end(), unit.begin(), unit.end());
    }
    return base;
  }

  bool has_letter(std::string_view name) const {
    const auto& g = p_.alphabet();
    return std::find(g.begin(), g.end(), name) != g.end();
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError,
                what + " at column " + std::to_string(pos_ + 1) + " in word \"" + std::string(s_) + "\"");
  }

  const Presentation& p_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Word inverse(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->inverse());
  return r;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Word free_reduce(const Word& w) {
  Word out;
  for (const Letter& l : w) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

std::string word_key(const Word& w) {
  std::string key;
  key.reserve(w.size() * 2);
  for (const Letter& l : w) {
    key.push_back(static_cast<char>(l.gen & 0xff));
    key.push_back(static_cast<char>(((l.gen >> 8) << 1) | (l.sign < 0 ? 1 : 0)));
  }
  return key;
}

Presentation Presentation::free_abelian(std::vector<std::string> names) {
  Presentation p;
  p.names_ = std::move(names);
  p.rank_ = p.names_.size();
  p.abelian_ = true;
  p.bounded_generation_ = 1;
  return p;
}

Presentation Presentation::with_rules(std::vector<std::string> generators, const std::vector<std::string>& rules,
                                      int bounded_generation,
                                      const std::vector<std::pair<std::string, std::string>>& definitions) {
  if (bounded_generation < 1) throw Error(ErrorCode::InvalidArgument, "bounded-generation constant must be >= 1");
  Presentation p;
  p.names_ = std::move(generators);
  p.rank_ = p.names_.size();
  for (const auto& [name, word] : definitions) {
    if (std::find(p.names_.begin(), p.names_.end(), name) != p.names_.end())
      throw Error(ErrorCode::InvalidArgument, "letter '" + name + "' defined twice");
    p.names_.push_back(name);
  }
  for (const auto& [name, word] : definitions) {
    Word w = p.parse_word(word);
    for (const Letter& l : w)
      if (static_cast<std::size_t>(l.gen) >= p.rank_)
        throw Error(ErrorCode::InvalidArgument, "definition of '" + name + "' must use generators only");
    p.definitions_.push_back(std::move(w));
  }
  p.abelian_ = false;
  p.bounded_generation_ = bounded_generation;
  for (const std::string& text : rules) {
    const auto arrow = text.find("->");
    if (arrow == std::string::npos) throw Error(ErrorCode::SyntaxError, "rule without '->': " + text);
    RewriteRule r{p.parse_word(std::string_view(text).substr(0, arrow)),
                  p.parse_word(std::string_view(text).substr(arrow + 2))};
    if (r.lhs.empty()) throw Error(ErrorCode::SyntaxError, "rule with empty left side: " + text);
    p.rules_.push_back(std::move(r));
  }
  p.check_confluence();
  return p;
}

int Presentation::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + std::string(name) + "'");
}

Word Presentation::definition(std::size_t i) const {
  if (i < rank_) return {Letter{static_cast<int>(i), 1}};
  return definitions_.at(i - rank_);
}

Word Presentation::normal_form(const Word& w) const {
  if (!abelian_) return rewrite(w);
  std::vector<long> exps(names_.size(), 0);
  for (const Letter& l : w) {
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= names_.size())
      throw Error(ErrorCode::UnknownGenerator, "letter outside the presentation");
    exps[static_cast<std::size_t>(l.gen)] += l.sign;
  }
  Word out;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const int sign = exps[i] < 0 ? -1 : 1;
    for (long k = 0; k < std::labs(exps[i]); ++k) out.push_back({static_cast<int>(i), sign});
  }
  return out;
}

// Leftmost rewriting with an irreducible output stack: after each pushed
// letter only a suffix can become reducible.
Word Presentation::rewrite(const Word& w) const {
  Word out;
  std::vector<Letter> in(w.rbegin(), w.rend());
  std::size_t steps = 0;
  while (!in.empty()) {
    const Letter l = in.back();
    in.pop_back();
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= names_.size())
      throw Error(ErrorCode::UnknownGenerator, "letter outside the presentation");
    if (!out.empty() && out.back() == l.inverse()) {
      out.pop_back();
      continue;
    }
    out.push_back(l);
    for (const RewriteRule& r : rules_) {
      if (!ends_with(out, r.lhs)) continue;
      out.resize(out.size() - r.lhs.size());
      in.insert(in.end(), r.rhs.rbegin(), r.rhs.rend());
      if (++steps > kRewriteStepCap) throw Error(ErrorCode::NonConfluent, "rewriting does not terminate");
      break;
    }
  }
  return out;
}

void Presentation::check_confluence() const {
  const int letters = static_cast<int>(2 * names_.size());
  if (letters == 0) return;
  auto letter_of = [](int code) { return Letter{code / 2, code % 2 == 0 ? 1 : -1}; };
  std::vector<int> digits;
  for (int len = 1; len <= 6; ++len) {
    digits.assign(static_cast<std::size_t>(len), 0);
    for (;;) {
      Word w;
      for (int d : digits) w.push_back(letter_of(d));
      const Word nf = rewrite(w);
      if (rewrite(nf) != nf) throw Error(ErrorCode::NonConfluent, "normal form is not idempotent on " + format(w));
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i + 1] == w[i].inverse()) {
          Word v(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
          v.insert(v.end(), w.begin() + static_cast<std::ptrdiff_t>(i + 2), w.end());
          if (rewrite(v) != nf) throw Error(ErrorCode::NonConfluent, "free reduction changes the normal form of " + format(w));
        }
        for (const RewriteRule& r : rules_) {
          if (i + r.lhs.size() > w.size() ||
              !std::equal(r.lhs.begin(), r.lhs.end(), w.begin() + static_cast<std::ptrdiff_t>(i)))
            continue;
          Word v(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
          v.insert(v.end(), r.rhs.begin(), r.rhs.end());
          v.insert(v.end(), w.begin() + static_cast<std::ptrdiff_t>(i + r.lhs.size()), w.end());
          if (rewrite(v) != nf)
            throw Error(ErrorCode::NonConfluent, "rules are not confluent on " + format(w));
        }
      }
      int pos = len - 1;
      while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == letters) digits[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
  }
}

Word Presentation::parse_word(std::string_view text) const { return WordParser(*this, text).parse(); }

std::string Presentation::format(const Word& w) const {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const long k = static_cast<long>(j - i) * w[i].sign;
    if (!s.empty()) s += ' ';
    s += names_.at(static_cast<std::size_t>(w[i].gen));
    if (k != 1) s += "^" + std::to_string(k);
    i = j;
  }
  return s;
}

std::vector<std::size_t> Ball::sphere_sizes() const {
  std::vector<std::size_t> s;
  for (int len : lengths) {
    if (static_cast<std::size_t>(len) >= s.size()) s.resize(static_cast<std::size_t>(len) + 1, 0);
    ++s[static_cast<std::size_t>(len)];
  }
  return s;
}

std::ptrdiff_t Ball::find(const Word& normal_form) const {
  const auto it = index.find(word_key(normal_form));
  return it == index.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<std::size_t> Ball::inverse_indices(const Presentation& p) const {
  std::vector<std::size_t> inv(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const std::ptrdiff_t j = find(p.normal_form(inverse(elements[i])));
    if (j < 0) throw Error(ErrorCode::InvalidArgument, "ball is not closed under inversion");
    inv[i] = static_cast<std::size_t>(j);
  }
  return inv;
}

Ball enumerate_positive_ball(int d, int n, std::size_t cap) {
  if (d < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "positive ball needs d >= 1 and n >= 1");
  if (std::pow(static_cast<double>(n), d) > static_cast<double>(cap))
    throw Error(ErrorCode::SizeOverflow, "positive ball of size " + std::to_string(n) + "^" + std::to_string(d) +
                                             " exceeds the cap");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * static_cast<std::size_t>(n);

  Ball ball;
  ball.radius = n;
  ball.kind = BallKind::Positive;
  ball.elements.reserve(total);
  ball.lengths.reserve(total);
  ball.parent.reserve(total);
  ball.letter.reserve(total);
  std::vector<int> exps(static_cast<std::size_t>(d), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Word w;
    int len = 0;
    int first = -1;
    for (int i = 0; i < d; ++i) {
      const int k = exps[static_cast<std::size_t>(i)];
      for (int j = 0; j < k; ++j) w.push_back({i, 1});
      len += k;
      if (first < 0 && k > 0) first = i;
    }
    ball.index.emplace(word_key(w), idx);
    ball.elements.push_back(std::move(w));
    ball.lengths.push_back(len);
    if (first < 0) {
      ball.parent.push_back(-1);
      ball.letter.push_back({0, 1});
    } else {
      ball.parent.push_back(static_cast<std::ptrdiff_t>(idx - stride[static_cast<std::size_t>(first)]));
      ball.letter.push_back({first, 1});
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++exps[static_cast<std::size_t>(i)] < n) break;
      exps[static_cast<std::size_t>(i)] = 0;
    }
  }
  return ball;
}

Ball enumerate_ball(const Presentation& p, int k, std::size_t cap) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "ball radius must be >= 0");
  Ball ball;
  ball.radius = k;
  ball.kind = BallKind::Full;
  ball.elements.push_back({});
  ball.lengths.push_back(0);
  ball.parent.push_back(-1);
  ball.letter.push_back({0, 1});
  ball.index.emplace(word_key({}), 0);
  std::size_t sphere_begin = 0;
  for (int r = 1; r <= k; ++r) {
    const std::size_t sphere_end = ball.size();
    for (std::size_t i = sphere_begin; i < sphere_end; ++i) {
      for (int g = 0; g < static_cast<int>(p.rank()); ++g) {
        for (int sign : {1, -1}) {
          const Letter l{g, sign};
          Word w = p.normal_form(concat({l}, ball.elements[i]));
          std::string key = word_key(w);
          if (ball.index.contains(key)) continue;
          if (ball.size() >= cap) throw Error(ErrorCode::SizeOverflow, "ball exceeds the size cap");
          ball.index.emplace(std::move(key), ball.size());
          ball.elements.push_back(std::move(w));
          ball.lengths.push_back(r);
          ball.parent.push_back(static_cast<std::ptrdiff_t>(i));
          ball.letter.push_back(l);
        }
      }
    }
    sphere_begin = sphere_end;
    if (sphere_begin == ball.size()) break;
  }
  return ball;
}

std::vector<std::size_t> ball_sizes(const Presentation& p, int k_max, std::size_t cap) {
  const Ball ball = enumerate_ball(p, k_max, cap);
  const auto spheres = ball.sphere_sizes();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k_max) + 1, 0);
  std::size_t acc = 0;
  for (int r = 0; r <= k_max; ++r) {
    if (static_cast<std::size_t>(r) < spheres.size()) acc += spheres[static_cast<std::size_t>(r)];
    sizes[static_cast<std::size_t>(r)] = acc;
  }
  return sizes;
}

std::uint64_t l1_ball_count(int d, int k) {
  // sum_i 2^i C(d,i) C(k,i)
  std::uint64_t total = 0;
  std::uint64_t cd = 1, ck = 1, pow2 = 1;
  for (int i = 0; i <= std::min(d, k); ++i) {
    total += pow2 * cd * ck;
    cd = cd * static_cast<std::uint64_t>(d - i) / static_cast<std::uint64_t>(i + 1);
    ck = ck * static_cast<std::uint64_t>(k - i) / static_cast<std::uint64_t>(i + 1);
    pow2 *= 2;
  }
  return total;
}

ShellSelection select_shell_radii(const Presentation& p, int k_max, double C) {
  if (k_max < 2) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 2");
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "shell constant must be positive");
  const auto sizes = ball_sizes(p, k_max + 1);
  ShellSelection sel;
  sel.measured_constant = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    const double shell = static_cast<double>(sizes[static_cast<std::size_t>(k) + 1] - sizes[static_cast<std::size_t>(k)]);
    const double ratio = shell / static_cast<double>(sizes[static_cast<std::size_t>(k)]);
    sel.measured_constant = std::min(sel.measured_constant, ratio * k);
    if (ratio <= C / k) sel.radii.push_back(k);
  }
  return sel;
}

}  // namespace conjtamer
