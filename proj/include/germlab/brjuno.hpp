#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace germlab {

/// Continued-fraction convergents of alpha with the running sums of
/// log(q_{n+1}) / q_n (the series whose convergence characterizes Brjuno
/// numbers). Finite-depth output can only flag convergence heuristically:
/// `converged_heuristic` means the last tail increment fell below 1e-6,
/// never a verdict about alpha itself.
struct BrjunoReport {
  std::vector<double> coefficients;   // a_1, a_2, ... (a_0 = 0 for alpha in (0,1))
  std::vector<double> convergents_q;  // q_1, q_2, ... (q_0 = 1)
  std::vector<double> partial_sums;   // partial_sums[n-1] = sum_{k=1}^n log(q_{k+1})/q_k
  bool terminated = false;            // rational at machine precision
  int terminated_depth = 0;
  bool converged_heuristic = false;
  double last_increment = 0.0;
};

inline BrjunoReport brjuno_partial_sum(double alpha, int depth) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("brjuno_partial_sum: alpha must lie in (0,1)");
  if (depth < 1 || depth > 40)
    throw std::invalid_argument("brjuno_partial_sum: depth must be in 1..40");

  BrjunoReport rep;
  double x = alpha;
  double q_prev = 1.0;  // q_0
  double q_cur = 0.0;   // becomes q_1
  double sum = 0.0;
  const double tol = 1e-14;

  for (int n = 1; n <= depth + 1; ++n) {
    const double inv = 1.0 / x;
    const double a = std::floor(inv);
    x = inv - a;
    const double q_next = (n == 1) ? a : a * q_cur + q_prev;
    if (n == 1) {
      q_cur = q_next;
    } else {
      q_prev = q_cur;
      q_cur = q_next;
    }
    rep.coefficients.push_back(a);
    rep.convergents_q.push_back(q_cur);
    if (n >= 2) {
      // term log(q_n) / q_{n-1}, accumulated as partial_sums[n-2].
      const double inc = std::log(q_cur) / q_prev;
      sum += inc;
      rep.partial_sums.push_back(sum);
      rep.last_increment = inc;
    }
    if (x < tol) {
      rep.terminated = true;
      rep.terminated_depth = n;
      break;
    }
    if (static_cast<int>(rep.partial_sums.size()) >= depth) break;
  }
  rep.converged_heuristic = !rep.partial_sums.empty() && rep.last_increment < 1e-6 &&
                            !rep.terminated;
  return rep;
}

}  // namespace germlab
