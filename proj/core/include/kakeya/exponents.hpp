#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kakeya/rational.hpp"

namespace kakeya {

// Closed-form exponent engine for the Kakeya maximal inequality
//
//   || sum_T chi_T ||_{L^p} <= C_eps delta^{-(n-1-n/p)-eps} (sum_T |T|)^{1/p}
//
// over direction-separated delta-tube families in R^n. Everything here is
// exact rational arithmetic; doubles appear only in omega_inverse (a real
// root) and scale_recursion (floating scales with certified slack).

// Attribution of the best known exponent in dimension n.
enum class Attribution { Cordoba, Wolff, GuthZahl, KatzTao, ThisWork };
std::string to_string(Attribution a);

// Which hypothesis the bound must hold under. Maximal: direction-separated
// families (all listed bounds apply). PWA: families obeying only the
// polynomial Wolff axioms; the sum-difference bound (KatzTao) relies on
// direction separation and is excluded there.
enum class Conjecture { Maximal, PWA };

// p-exponent of the k-broad -> linear induction branch:
//   1 + (1/(n-1)) * (n/(n-1))^{n-k},  2 <= k <= n.
Rational broad_exponent(int n, int k);

// p-exponent above which the broad/narrow decomposition closes:
//   (n-k+2)/(n-k+1).
Rational bg_exponent(int n, int k);

// The new exponent in dimension n:
//   p_n = 1 + min_{2<=k<=n} max{ (n/(n-1))^{n-k}, (n-1)/(n-k+1) } / (n-1),
// returned with the minimizing k (smallest k on ties).
std::pair<Rational, int> p_n(int n);

struct ExponentReport {
  int n = 0;
  int k_star = 0;
  Rational p_value;     // p_n = 1 + max(broad_term, bg_term)
  Rational broad_term;  // (1/(n-1)) * (n/(n-1))^{n-k*}
  Rational bg_term;     // 1/(n-k*+1)
  Rational best_known;  // minimum over applicable bounds
  Attribution attribution = Attribution::ThisWork;
};

// Best known exponent in dimension n under the given hypothesis, with
// attribution. Ties attribute to the earlier literature bound.
ExponentReport best_known(int n, Conjecture c);

// Dimensions 2 <= n <= n_max where p_n strictly beats both prior bounds
// min{ (n+2)/n, 1 + (7/4)/(n-1) } for the maximal inequality.
std::vector<int> improved_dimensions(int n_max);

// Hausdorff-dimension consequence: a Kakeya set in R^n has dimension at
// least the conjugate exponent p_n' = p_n/(p_n - 1) ... rearranged from the
// standard maximal-function -> dimension implication. Exact rational.
Rational kakeya_dim_bound(int n);

// The asymptotic constant: Omega in (1/2, 1) solves e^Omega = 1/Omega, and
// (p_n - 1)(n - 1) increases to Omega^{-1} = 1.763... Returns Omega^{-1}
// with |Omega e^Omega - 1| < tol, by bisection on [1/2, 1].
double omega_inverse(double tol);

// Exact solution of the induction-on-scales bookkeeping system on the chain
// m, m+1, ..., n (2 <= m <= n):
//
//   p_m = m/(m-1),
//   (1 - 1/p_i)^{-1} = m + sum_{j=m}^{i-1} (n-j) gamma_j,
//   sum_{j=m}^{i-1} (n+i-j-1) gamma_j = i - m          (m+1 <= i <= n),
//   sum_{j=m}^{n} gamma_j = 1,
//
// with closed form gamma_j = (1/n)(1 - 1/n)^{j-m} for m <= j <= n-1 and
// gamma_n = (1 - 1/n)^{n-m}. The chain endpoint satisfies
// (1 - 1/p_n)^{-1} = 1 + (n-1)(1 - 1/n)^{n-m}, i.e. p_n = broad_exponent(n, m).
struct GammaSolution {
  int n = 0, m = 0;
  std::vector<Rational> gamma;    // gamma_m .. gamma_n      (index j - m)
  std::vector<Rational> p_chain;  // p_m .. p_n              (index i - m)
};
GammaSolution gamma_closed_form(int n, int m);
// Same solution obtained by exact Gaussian elimination on the linear system.
GammaSolution gamma_solve_system(int n, int m);

// One run of the two-scale recursion: letter 'c' is the cellular step
// (r -> r/2, loss d^{eps}, A preserved), letter 'a' is the algebraic step
// (r -> r^{1+eps}, loss d^{n+eps}, A halved).
struct HistoryWord {
  std::string letters;   // word over {'a','c'}, applied left to right
  double eps_circ = 0;   // eps in (0, 1/2)
  double r0 = 0;         // starting scale in (0, 1]
  double d = 2;          // degree parameter, > 1
  int A = 1;             // broadness budget, divisible by 2^{#a}
  int n = 0;             // ambient dimension, >= 2 (enters the 'a' loss)
};

struct ScaleRecursionResult {
  double r = 0;    // final scale r_J
  double C = 0;    // accumulated loss C_J(d) = d^{#c * eps} * d^{#a * (n+eps)}
  int A = 0;       // final broadness A / 2^{#a}
  int count_a = 0;
  int count_c = 0;
  // Both closed-form radius bounds, read at delta := r0^{1/eps} so that
  // r0 = delta^{eps}:  r_J <= delta^{eps (1+eps)^{#a}}  and
  // r_J <= 2^{-#c} delta^{eps}. Verified with floating-point slack only.
  bool radius_bounds_hold = false;
};
ScaleRecursionResult scale_recursion(const HistoryWord& w);

}  // namespace kakeya
