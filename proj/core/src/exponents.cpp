#include "kakeya/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kakeya {

std::string to_string(Attribution a) {
  switch (a) {
    case Attribution::Cordoba: return "Cordoba";
    case Attribution::Wolff: return "Wolff";
    case Attribution::GuthZahl: return "GuthZahl";
    case Attribution::KatzTao: return "KatzTao";
    case Attribution::ThisWork: return "ThisWork";
  }
  return "?";
}

static void require_nk(int n, int k) {
  if (n < 2) throw std::invalid_argument("exponents: need n >= 2");
  if (k < 2 || k > n) throw std::invalid_argument("exponents: need 2 <= k <= n");
}

Rational broad_exponent(int n, int k) {
  require_nk(n, k);
  const Rational ratio(n, n - 1);
  return Rational(1) + ratio.pow(n - k) / Rational(n - 1);
}

Rational bg_exponent(int n, int k) {
  require_nk(n, k);
  return Rational(n - k + 2, n - k + 1);
}

std::pair<Rational, int> p_n(int n) {
  if (n < 2) throw std::invalid_argument("p_n: need n >= 2");
  // Exhaustive scan over k. (n/(n-1))^{n-k} is maintained incrementally from
  // k = n downward so the n = 1000 column costs one big multiply per k.
  const Rational ratio(n, n - 1);
  Rational power(1);  // ratio^{n-k}, starting at k = n
  Rational best;
  int best_k = -1;
  for (int k = n; k >= 2; --k) {
    const Rational broad = Rational(1) + power / Rational(n - 1);
    const Rational bg = bg_exponent(n, k);
    const Rational value = std::max(broad, bg);
    // Smallest k wins ties, and we scan downward, so <= replaces.
    if (best_k < 0 || value <= best) {
      best = value;
      best_k = k;
    }
    power *= ratio;
  }
  return {best, best_k};
}

ExponentReport best_known(int n, Conjecture c) {
  if (n < 2) throw std::invalid_argument("best_known: need n >= 2");
  auto [p, k] = p_n(n);

  ExponentReport rep;
  rep.n = n;
  rep.k_star = k;
  rep.p_value = p;
  rep.broad_term = Rational(n, n - 1).pow(n - k) / Rational(n - 1);
  rep.bg_term = Rational(1, n - k + 1);

  // Candidates in tie-break order: earlier literature wins equal values.
  std::vector<std::pair<Rational, Attribution>> candidates;
  if (n == 2) candidates.emplace_back(Rational(2), Attribution::Cordoba);
  candidates.emplace_back(Rational(n + 2, n), Attribution::Wolff);
  if (n == 4) candidates.emplace_back(Rational(85, 57), Attribution::GuthZahl);
  if (c == Conjecture::Maximal)
    candidates.emplace_back(Rational(1) + Rational(7, 4) / Rational(n - 1), Attribution::KatzTao);
  candidates.emplace_back(p, Attribution::ThisWork);

  rep.best_known = candidates.front().first;
  rep.attribution = candidates.front().second;
  for (const auto& [value, who] : candidates) {
    if (value < rep.best_known) {
      rep.best_known = value;
      rep.attribution = who;
    }
  }
  return rep;
}

std::vector<int> improved_dimensions(int n_max) {
  if (n_max < 2) throw std::invalid_argument("improved_dimensions: need n_max >= 2");
  std::vector<int> out;
  for (int n = 2; n <= n_max; ++n) {
    const Rational wolff(n + 2, n);
    const Rational katz_tao = Rational(1) + Rational(7, 4) / Rational(n - 1);
    const Rational prior = std::min(wolff, katz_tao);
    if (p_n(n).first < prior) out.push_back(n);
  }
  return out;
}

Rational kakeya_dim_bound(int n) {
  const Rational p = p_n(n).first;
  return p / (p - Rational(1));  // conjugate exponent p' = p/(p-1)
}

double omega_inverse(double tol) {
  if (!(tol > 0)) throw std::invalid_argument("omega_inverse: need tol > 0");
  // f(w) = w e^w - 1 is strictly increasing with f(1/2) < 0 < f(1).
  double lo = 0.5, hi = 1.0;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = mid * std::exp(mid) - 1.0;
    if (std::abs(f) < tol) return 1.0 / mid;
    (f < 0 ? lo : hi) = mid;
  }
  if (std::abs(mid * std::exp(mid) - 1.0) < tol) return 1.0 / mid;
  throw std::runtime_error("omega_inverse: tolerance below double precision");
}

static void require_nm(int n, int m) {
  if (m < 2 || m > n) throw std::invalid_argument("gamma system: need 2 <= m <= n");
}

// p_i from the running sum M_i = (1 - 1/p_i)^{-1}: p = M/(M-1).
static Rational p_from_inverse_gap(const Rational& M) { return M / (M - Rational(1)); }

static std::vector<Rational> chain_from_gamma(int n, int m, const std::vector<Rational>& gamma) {
  std::vector<Rational> chain;
  Rational M(m);  // (1 - 1/p_m)^{-1} = m, i.e. p_m = m/(m-1)
  chain.push_back(p_from_inverse_gap(M));
  for (int i = m + 1; i <= n; ++i) {
    M += Rational(n - (i - 1)) * gamma[static_cast<size_t>(i - 1 - m)];
    chain.push_back(p_from_inverse_gap(M));
  }
  return chain;
}

GammaSolution gamma_closed_form(int n, int m) {
  require_nm(n, m);
  GammaSolution sol;
  sol.n = n;
  sol.m = m;
  const Rational base = Rational(1) - Rational(1, n);  // 1 - 1/n
  for (int j = m; j <= n - 1; ++j)
    sol.gamma.push_back(Rational(1, n) * base.pow(j - m));
  sol.gamma.push_back(base.pow(n - m));  // gamma_n soaks up the remainder
  sol.p_chain = chain_from_gamma(n, m, sol.gamma);
  return sol;
}

GammaSolution gamma_solve_system(int n, int m) {
  require_nm(n, m);
  const int size = n - m + 1;  // unknowns gamma_m .. gamma_n
  // Rows: for i = m+1..n, sum_{j=m}^{i-1} (n+i-j-1) gamma_j = i - m,
  // then the normalization sum_j gamma_j = 1. Exact Gaussian elimination.
  std::vector<std::vector<Rational>> aug(
      static_cast<size_t>(size), std::vector<Rational>(static_cast<size_t>(size) + 1, Rational(0)));
  int row = 0;
  for (int i = m + 1; i <= n; ++i, ++row) {
    for (int j = m; j <= i - 1; ++j)
      aug[row][static_cast<size_t>(j - m)] = Rational(n + i - j - 1);
    aug[row][static_cast<size_t>(size)] = Rational(i - m);
  }
  for (int j = 0; j < size; ++j) aug[row][static_cast<size_t>(j)] = Rational(1);
  aug[row][static_cast<size_t>(size)] = Rational(1);

  for (int col = 0; col < size; ++col) {
    int pivot = -1;
    for (int r = col; r < size; ++r)
      if (aug[r][static_cast<size_t>(col)].sign() != 0) { pivot = r; break; }
    if (pivot < 0) throw std::runtime_error("gamma_solve_system: singular system");
    std::swap(aug[static_cast<size_t>(col)], aug[static_cast<size_t>(pivot)]);
    const Rational inv = aug[col][static_cast<size_t>(col)].reciprocal();
    for (int c = col; c <= size; ++c) aug[col][static_cast<size_t>(c)] *= inv;
    for (int r = 0; r < size; ++r) {
      if (r == col) continue;
      const Rational factor = aug[r][static_cast<size_t>(col)];
      if (factor.sign() == 0) continue;
      for (int c = col; c <= size; ++c)
        aug[r][static_cast<size_t>(c)] -= factor * aug[col][static_cast<size_t>(c)];
    }
  }

  GammaSolution sol;
  sol.n = n;
  sol.m = m;
  for (int j = 0; j < size; ++j) sol.gamma.push_back(aug[j][static_cast<size_t>(size)]);
  sol.p_chain = chain_from_gamma(n, m, sol.gamma);
  return sol;
}

ScaleRecursionResult scale_recursion(const HistoryWord& w) {
  if (!(w.eps_circ > 0 && w.eps_circ < 0.5))
    throw std::invalid_argument("scale_recursion: need eps_circ in (0, 1/2)");
  if (!(w.r0 > 0 && w.r0 <= 1)) throw std::invalid_argument("scale_recursion: need r0 in (0, 1]");
  if (!(w.d > 1)) throw std::invalid_argument("scale_recursion: need d > 1");
  if (w.n < 2) throw std::invalid_argument("scale_recursion: need n >= 2");

  ScaleRecursionResult res;
  double r = w.r0;
  for (char ch : w.letters) {
    if (ch == 'c') {
      r *= 0.5;
      ++res.count_c;
    } else if (ch == 'a') {
      r = std::pow(r, 1.0 + w.eps_circ);
      ++res.count_a;
    } else {
      throw std::invalid_argument("scale_recursion: letters must be 'a' or 'c'");
    }
  }
  const long pow2 = 1L << res.count_a;
  if (res.count_a >= 62 || w.A % pow2 != 0)
    throw std::invalid_argument("scale_recursion: A not divisible by 2^{#a}");

  res.r = r;
  res.A = static_cast<int>(w.A / pow2);
  // Loss factor in log space to dodge overflow for long words.
  const double log_C =
      std::log(w.d) * (res.count_c * w.eps_circ + res.count_a * (w.n + w.eps_circ));
  res.C = std::exp(log_C);

  // Radius bounds at delta = r0^{1/eps} (so r0 = delta^eps exactly):
  //   log r_J <= (1+eps)^{#a} log r0   and   log r_J <= log r0 - #c log 2,
  // allowing only floating-point slack.
  const double log_r = std::log(r), log_r0 = std::log(w.r0);
  const double bound_a = std::pow(1.0 + w.eps_circ, res.count_a) * log_r0;
  const double bound_c = log_r0 - res.count_c * std::log(2.0);
  const double slack = 1e-9 * (1.0 + std::abs(log_r));
  res.radius_bounds_hold = (log_r <= bound_a + slack) && (log_r <= bound_c + slack);
  return res;
}

}  // namespace kakeya
