#pragma once

// Analytic 1-D Karhunen-Loeve eigenpairs of the exponential covariance
// sigma^2 exp(-|x1-x2|/L): transcendental roots per tan branch, bisected to
// 1e-13, eigenvalues lambda = 2 sigma^2 L / (1 + omega^2 L^2).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgkit {

struct CovarianceSpec {
  double sigma = 1.0;  // field standard deviation
  double L = 1.0;      // correlation length (1-norm separable exponential)
};

/// One eigenfunction: cos(omega (x - mid)) / norm for even modes,
/// sin(omega (x - mid)) / norm for odd, L2-normalized over [lo, hi].
struct Kl1dMode {
  double omega = 0.0;
  bool even = true;
  double inv_norm = 1.0;
  double mid = 0.0;

  double eval(double x) const {
    const double t = omega * (x - mid);
    return (even ? std::cos(t) : std::sin(t)) * inv_norm;
  }
};

struct Kl1dEigenpair {
  double lambda = 0.0;
  Kl1dMode mode;
};

namespace detail {

template <class F>
double bisect_root(F&& f, double lo, double hi, int branch) {
  double flo = f(lo);
  double fhi = f(hi);
  if (!(flo * fhi < 0.0))
    throw std::runtime_error("kl_eigenpairs_1d: failed to bracket root on branch " +
                             std::to_string(branch));
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// First n_terms eigenpairs on [lo, hi], eigenvalues sorted descending.
/// Even branches solve 1/L - omega tan(omega a) = 0, odd branches
/// omega + tan(omega a)/L = 0, on the centered half-width a.
inline std::vector<Kl1dEigenpair> kl_eigenpairs_1d(const CovarianceSpec& cov, double lo, double hi,
                                                   int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("kl_eigenpairs_1d: n_terms must be >= 1");
  if (cov.sigma <= 0 || cov.L <= 0) throw std::invalid_argument("kl_eigenpairs_1d: need sigma, L > 0");
  const double a = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const double c = 1.0 / cov.L;
  constexpr double kPi = 3.14159265358979323846;

  std::vector<Kl1dEigenpair> out;
  out.reserve(static_cast<std::size_t>(n_terms));
  for (int t = 0; t < n_terms; ++t) {
    const int branch = t / 2;
    const bool even = (t % 2 == 0);
    double omega;
    if (even) {
      auto f = [&](double w) { return c - w * std::tan(w * a); };
      const double wlo = (branch * kPi) / a + 1e-12;
      const double whi = (branch * kPi + 0.5 * kPi) / a - 1e-12;
      omega = detail::bisect_root(f, wlo, whi, t);
    } else {
      auto f = [&](double w) { return w + c * std::tan(w * a); };
      const double wlo = (branch * kPi + 0.5 * kPi) / a + 1e-12;
      const double whi = ((branch + 1) * kPi) / a - 1e-12;
      omega = detail::bisect_root(f, wlo, whi, t);
    }
    const double lambda = 2.0 * cov.sigma * cov.sigma * cov.L / (1.0 + omega * omega * cov.L * cov.L);
    const double s = std::sin(2.0 * omega * a) / (2.0 * omega);
    const double norm = std::sqrt(even ? a + s : a - s);
    out.push_back({lambda, Kl1dMode{omega, even, 1.0 / norm, mid}});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Kl1dEigenpair& x, const Kl1dEigenpair& y) { return x.lambda > y.lambda; });
  return out;
}

}  // namespace sgkit
