#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace germlab {

/// Point on the circle carried as base + offset * theta (mod 1) with the
/// lattice offset kept exact. Positions and distances are reduced with an
/// FMA-compensated product, so translates of a point stay consistent to a
/// few ulp instead of drifting with the offset magnitude. The telescoping
/// identity checks below rely on this: the same lattice point always
/// evaluates to the same double.
struct CirclePoint {
  double base = 0.0;
  long long offset = 0;

  CirclePoint shifted(long long k) const { return {base, offset + k}; }
};

namespace circle_detail {

/// frac(base + k * theta) with the product split by FMA; absolute error a
/// few ulp of 1 independent of |k * theta|.
inline double reduced_position(double base, long long k, double theta) {
  const double kd = static_cast<double>(k);
  const double p = kd * theta;
  const double e = std::fma(kd, theta, -p);
  const double hi = base + p;
  // TwoSum error of base + p.
  const double bp = hi - p;
  const double err = (base - bp) + (p - (hi - bp));
  double y = hi - std::floor(hi);
  double total = y + (err + e);
  total -= std::floor(total);
  if (total >= 1.0) total -= 1.0;
  if (total < 0.0) total += 1.0;
  return total;
}

/// Signed circle distance of (a - b) reduced to [-1/2, 1/2).
inline double signed_circle_gap(const CirclePoint& a, const CirclePoint& b, double theta) {
  const double diff = reduced_position(a.base - b.base, a.offset - b.offset, theta);
  return diff >= 0.5 ? diff - 1.0 : diff;
}

}  // namespace circle_detail

/// The rotation-driven cocycle built from piecewise-linear tents: for each
/// level k <= K there are 2 a_k intervals of half-width eps_k centered on the
/// orbit points omega_j = (j-1) theta mod 1, with a_k = 2^k k. The tent f_k
/// is negative on the first a_k intervals and positive on the rest, and
/// phi_k telescopes it: f_k(x) = phi_k(x) - phi_k(Tx). The 1x1 cocycle
/// M_x = exp(f(x)) then satisfies M^n_x = exp(phi(x) - phi(T^n x)).
class RotationTentCocycle {
 public:
  RotationTentCocycle(int levels, double theta) : levels_(levels), theta_(theta) {
    if (levels < 1 || levels > 12)
      throw std::invalid_argument("rotation cocycle: levels must be in 1..12");
    if (!(theta > 0.0 && theta < 1.0))
      throw std::invalid_argument("rotation cocycle: theta must lie in (0,1)");
    eps_.resize(static_cast<std::size_t>(levels + 1), 0.0);
    sorted_omegas_.resize(static_cast<std::size_t>(levels + 1));
    for (int k = 1; k <= levels; ++k) build_level(k);
  }

  int levels() const { return levels_; }
  double theta() const { return theta_; }
  long long interval_count(int k) const { return 2 * points_per_side(k); }
  double epsilon(int k) const { return eps_[static_cast<std::size_t>(k)]; }

  static long long points_per_side(int k) {  // a_k = 2^k k
    return (1LL << k) * k;
  }

  CirclePoint omega(long long j) const {  // omega_j = (j-1) theta
    return CirclePoint{0.0, j - 1};
  }

  /// Tent value at a lattice point: nonzero only inside one interval I_{j,k}.
  double f_level(int k, const CirclePoint& x) const {
    const long long j = interval_index(k, x);
    if (j == 0) return 0.0;
    const double d = std::abs(circle_detail::signed_circle_gap(x, omega(j), theta_));
    const double a = static_cast<double>(points_per_side(k));
    const double height = std::ldexp(1.0, -k) * (1.0 - d / eps_[static_cast<std::size_t>(k)]);
    return j <= static_cast<long long>(a) ? -height : height;
  }

  /// phi_k(x) = - sum_{i=1..j-1} f_k(T^{-i} x) on I_{j,k} (j >= 2), else 0.
  double phi_level(int k, const CirclePoint& x) const {
    const long long j = interval_index(k, x);
    if (j < 2) return 0.0;
    // Kahan summation keeps the telescoping identity at roundoff even for
    // tens of thousands of terms.
    double sum = 0.0;
    double comp = 0.0;
    for (long long i = 1; i < j; ++i) {
      const double term = -f_level(k, x.shifted(-i));
      const double y = term - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum;
  }

  double f(const CirclePoint& x) const {
    double sum = 0.0;
    for (int k = 1; k <= levels_; ++k) sum += f_level(k, x);
    return sum;
  }

  double phi(const CirclePoint& x) const {
    double sum = 0.0;
    for (int k = 1; k <= levels_; ++k) sum += phi_level(k, x);
    return sum;
  }

  /// log M^n_x = sum_{i=0..n-1} f(T^i x); equals phi(x) - phi(T^n x) up to
  /// summation roundoff.
  double log_product(const CirclePoint& x, long n) const {
    double sum = 0.0;
    double comp = 0.0;
    for (long i = 0; i < n; ++i) {
      const double term = f(x.shifted(i));
      const double y = term - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum;
  }

  /// Exact integral of phi_k (the tents integrate in closed form); equals
  /// a_k^2 eps_k / 2^k <= 2^-k.
  double phi_level_integral_exact(int k) const {
    const double a = static_cast<double>(points_per_side(k));
    return a * a * eps_[static_cast<std::size_t>(k)] * std::ldexp(1.0, -k);
  }

  /// Trapezoid quadrature of phi_k with nodes at each tent's break points;
  /// exact for piecewise-linear integrands. Peak values are the running
  /// prefix sum of -f_k over the orbit points, the same terms phi_level
  /// would sum one interval at a time.
  double phi_level_integral_quadrature(int k) const {
    const long long count = interval_count(k);
    const double e = eps_[static_cast<std::size_t>(k)];
    double sum = 0.0;
    double peak = 0.0;  // phi_k(omega_j), starting from j = 1 where it is 0
    for (long long j = 2; j <= count; ++j) {
      peak -= f_level(k, omega(j - 1));
      // Tent over [omega_j - eps, omega_j + eps]: trapezoid with the peak node.
      sum += peak * e;
    }
    return sum;
  }

 private:
  long long interval_index(int k, const CirclePoint& x) const {
    const auto& sorted = sorted_omegas_[static_cast<std::size_t>(k)];
    const double eps = eps_[static_cast<std::size_t>(k)];
    const double pos = circle_detail::reduced_position(x.base, x.offset, theta_);
    // Nearest stored omega position by binary search (positions sorted).
    auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(pos, 0LL));
    long long cand[4];
    int ncand = 0;
    if (it != sorted.end()) cand[ncand++] = it->second;
    if (it != sorted.begin()) cand[ncand++] = std::prev(it)->second;
    cand[ncand++] = sorted.front().second;  // wraparound candidates
    cand[ncand++] = sorted.back().second;
    for (int c = 0; c < ncand; ++c) {
      const long long j = cand[c];
      const double d = std::abs(circle_detail::signed_circle_gap(x, omega(j), theta_));
      if (d <= eps) return j;
    }
    return 0;
  }

  void build_level(int k) {
    const long long count = interval_count(k);
    auto& sorted = sorted_omegas_[static_cast<std::size_t>(k)];
    sorted.clear();
    sorted.reserve(static_cast<std::size_t>(count));
    for (long long j = 1; j <= count; ++j) {
      sorted.emplace_back(circle_detail::reduced_position(0.0, j - 1, theta_), j);
    }
    std::sort(sorted.begin(), sorted.end());
    // Smallest circular gap between distinct orbit points.
    double min_gap = 1.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      min_gap = std::min(min_gap, sorted[i + 1].first - sorted[i].first);
    }
    if (sorted.size() > 1) {
      min_gap = std::min(min_gap, 1.0 - sorted.back().first + sorted.front().first);
    }
    const double a = static_cast<double>(points_per_side(k));
    double eps = 1.0 / (a * a);
    // Decrease geometrically until the 2 a_k intervals are pairwise disjoint.
    while (2.0 * eps >= min_gap) {
      eps *= 0.5;
      if (eps < 1e-300)
        throw std::runtime_error("rotation cocycle: interval separation underflow at level " +
                                 std::to_string(k));
    }
    eps_[static_cast<std::size_t>(k)] = eps;
  }

  int levels_;
  double theta_;
  std::vector<double> eps_;
  std::vector<std::vector<std::pair<double, long long>>> sorted_omegas_;
};

/// One evaluation record of the truncated rotation cocycle.
struct RotationCocycleEval {
  double f_partial = 0.0;    // sum_{k<=K} f_k(x)
  double phi_partial = 0.0;  // sum_{k<=K} phi_k(x)
  double log_product = 0.0;  // log M^n_x
};

inline RotationCocycleEval rotation_cocycle_eval(const RotationTentCocycle& cocycle,
                                                 const CirclePoint& x, long n) {
  RotationCocycleEval out;
  out.f_partial = cocycle.f(x);
  out.phi_partial = cocycle.phi(x);
  out.log_product = cocycle.log_product(x, n);
  return out;
}

}  // namespace germlab
