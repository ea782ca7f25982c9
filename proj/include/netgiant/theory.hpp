#ifndef NETGIANT_THEORY_HPP
#define NETGIANT_THEORY_HPP

// Rate-matrix machinery for the three-component error system
// [consensus error, tracking error, sqrt(N) * optimality gap].

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <stdexcept>

#include <Eigen/Dense>

namespace netgiant::theory {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
struct RateParams {
  Scalar eta{};
  Scalar sigma{};
  Scalar lip_L{};
  Scalar mu{};
};

/// A 3x3 nonnegative bound matrix and the parameters it was built from.
template <typename Scalar>
struct RateMatrix {
  Matrix3<Scalar> m;
  RateParams<Scalar> params;
};

namespace detail {

template <typename Scalar>
void check_domain(Scalar eta, Scalar sigma, Scalar lip_L, Scalar mu) {
  using std::isfinite;
  if (!(eta >= Scalar(0)) || !isfinite(eta)) throw std::domain_error("eta must be >= 0");
  if (!(sigma >= Scalar(0) && sigma < Scalar(1))) {
    throw std::domain_error("sigma must lie in [0, 1)");
  }
  if (!(mu > Scalar(0))) throw std::domain_error("mu must be positive");
  if (!(lip_L >= mu)) throw std::domain_error("L must be >= mu");
}

}  // namespace detail

/// Network-GIANT bound matrix G(eta).
template <typename Scalar>
RateMatrix<Scalar> rate_matrix_G(Scalar eta, Scalar sigma, Scalar lip_L, Scalar mu) {
  detail::check_domain(eta, sigma, lip_L, mu);
  const Scalar k = lip_L / mu;
  Matrix3<Scalar> g;
  g << sigma + eta * k, eta / mu, eta * k,
       2 * lip_L + eta * lip_L * k, sigma + eta * k, eta * lip_L * k,
       eta * k, eta / mu, 1 - eta / k;
  return {g, {eta, sigma, lip_L, mu}};
}

/// Gradient-tracking bound matrix G-bar(eta).
template <typename Scalar>
RateMatrix<Scalar> rate_matrix_Gbar(Scalar eta, Scalar sigma, Scalar lip_L, Scalar mu) {
  detail::check_domain(eta, sigma, lip_L, mu);
  Matrix3<Scalar> g;
  g << sigma, eta, 0,
       2 * lip_L + eta * lip_L * lip_L, sigma + eta * lip_L, eta * lip_L * lip_L,
       eta * lip_L, 0, 1 - eta * mu;
  return {g, {eta, sigma, lip_L, mu}};
}

/// Largest step size for which rho(G(eta)) < 1 is guaranteed:
/// (1 - sigma)^2 / (2 (2 - sigma) (kappa + kappa^3)).
template <typename Scalar>
Scalar eta_bar(Scalar sigma, Scalar kappa) {
  if (!(sigma >= Scalar(0) && sigma < Scalar(1))) throw std::domain_error("sigma must lie in [0, 1)");
  if (!(kappa >= Scalar(1))) throw std::domain_error("kappa must be >= 1");
  const Scalar gap = 1 - sigma;
  return gap * gap / (2 * (2 - sigma) * (kappa + kappa * kappa * kappa));
}

/// Step-size bound for the gradient-tracking matrix G-bar.
template <typename Scalar>
Scalar eta_tilde(Scalar sigma, Scalar kappa, Scalar lip_L) {
  using std::sqrt;
  if (!(sigma >= Scalar(0) && sigma < Scalar(1))) throw std::domain_error("sigma must lie in [0, 1)");
  if (!(kappa >= Scalar(1))) throw std::domain_error("kappa must be >= 1");
  if (!(lip_L > Scalar(0))) throw std::domain_error("L must be positive");
  const Scalar a = 3 - sigma;
  const Scalar gap = 1 - sigma;
  return (-a + sqrt(a * a + 4 * gap * gap * (1 + kappa))) / (2 * lip_L * (1 + kappa));
}

namespace detail {

template <typename Scalar>
using Complex = std::complex<Scalar>;

// det(lambda I - M) and its derivative, expanded directly on the shifted
// matrix so that roots close to a diagonal entry keep their accuracy.
template <typename Scalar>
std::pair<Complex<Scalar>, Complex<Scalar>> char_poly(const Matrix3<Scalar>& m,
                                                      Complex<Scalar> lambda) {
  using C = Complex<Scalar>;
  const C a00 = lambda - m(0, 0), a11 = lambda - m(1, 1), a22 = lambda - m(2, 2);
  const C a01 = -m(0, 1), a02 = -m(0, 2), a10 = -m(1, 0);
  const C a12 = -m(1, 2), a20 = -m(2, 0), a21 = -m(2, 1);
  const C det = a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
                a02 * (a10 * a21 - a11 * a20);
  const C deriv = (a11 * a22 - a12 * a21) + (a00 * a22 - a02 * a20) + (a00 * a11 - a01 * a10);
  return {det, deriv};
}

template <typename Scalar>
Complex<Scalar> polish(const Matrix3<Scalar>& m, Complex<Scalar> root) {
  using std::abs;
  auto [p, dp] = char_poly(m, root);
  for (int it = 0; it < 50 && abs(p) > Scalar(0); ++it) {
    if (abs(dp) == Scalar(0)) break;
    const Complex<Scalar> next = root - p / dp;
    const auto [pn, dpn] = char_poly(m, next);
    if (!(abs(pn) < abs(p))) break;
    root = next;
    p = pn;
    dp = dpn;
  }
  return root;
}

template <typename Scalar>
std::array<Complex<Scalar>, 2> eig2(Scalar a, Scalar b, Scalar c, Scalar d) {
  using C = Complex<Scalar>;
  const C half_tr = C((a + d) / 2);
  const C disc = std::sqrt(C((a - d) * (a - d) / 4 + b * c));
  return {half_tr + disc, half_tr - disc};
}

// Roots of lambda^3 + a lambda^2 + b lambda + c by Cardano's formula.
template <typename Scalar>
std::array<Complex<Scalar>, 3> cubic_roots(Scalar a, Scalar b, Scalar c) {
  using C = Complex<Scalar>;
  using std::abs;
  const Scalar shift = a / 3;
  const Scalar p = b - a * a / 3;
  const Scalar q = 2 * a * a * a / 27 - a * b / 3 + c;
  const C disc = std::sqrt(C(q * q / 4 + p * p * p / 27));
  C u = std::pow(C(-q / 2) + disc, Scalar(1) / 3);
  if (abs(u) == Scalar(0)) u = std::pow(C(-q / 2) - disc, Scalar(1) / 3);
  const C omega(Scalar(-0.5), std::sqrt(Scalar(3)) / 2);
  std::array<C, 3> roots;
  C uk = u;
  for (int k = 0; k < 3; ++k) {
    const C t = abs(uk) == Scalar(0) ? C(0) : uk - C(p) / (Scalar(3) * uk);
    roots[k] = t - C(shift);
    uk *= omega;
  }
  return roots;
}

}  // namespace detail

/// All three eigenvalues of a real 3x3 matrix.
///
/// Matrices whose off-diagonal pattern is acyclic are permuted-triangular and
/// return their diagonal exactly; a row or column that decouples one index
/// reduces the problem to a 2x2 block. Everything else goes through the
/// characteristic cubic, with each root Newton-polished on det(lambda I - M).
template <typename Scalar>
std::array<std::complex<Scalar>, 3> eigenvalues3(const Matrix3<Scalar>& m) {
  using C = std::complex<Scalar>;
  auto nz = [&](int i, int j) { return m(i, j) != Scalar(0); };
  const bool two_cycle = (nz(0, 1) && nz(1, 0)) || (nz(0, 2) && nz(2, 0)) || (nz(1, 2) && nz(2, 1));
  const bool three_cycle = (nz(0, 1) && nz(1, 2) && nz(2, 0)) || (nz(0, 2) && nz(2, 1) && nz(1, 0));
  if (!two_cycle && !three_cycle) return {C(m(0, 0)), C(m(1, 1)), C(m(2, 2))};

  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const bool row_free = !nz(i, j) && !nz(i, k);
    const bool col_free = !nz(j, i) && !nz(k, i);
    if (row_free || col_free) {
      const auto pair = detail::eig2(m(j, j), m(j, k), m(k, j), m(k, k));
      return {C(m(i, i)), pair[0], pair[1]};
    }
  }

  const Scalar trace = m.trace();
  const Scalar minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                        m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const Scalar det = m.determinant();
  auto roots = detail::cubic_roots<Scalar>(-trace, minors, -det);
  for (auto& r : roots) {
    r = detail::polish(m, r);
    // Roots of a real cubic that come out with rounding-level imaginary parts.
    if (std::abs(r.imag()) <= Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (1 + std::abs(r.real()))) {
      r = detail::polish(m, C(r.real()));
      r = C(r.real());
    }
  }
  return roots;
}

/// Largest eigenvalue modulus of a 3x3 matrix via the closed-form cubic.
template <typename Scalar>
Scalar spectral_radius3(const Matrix3<Scalar>& m) {
  const auto ev = eigenvalues3(m);
  Scalar rho = 0;
  for (const auto& e : ev) rho = std::max(rho, std::abs(e));
  return rho;
}

/// Perron root of a nonnegative matrix by power iteration on M + I, stopped
/// by the Collatz-Wielandt bracket min (Mv)_i / v_i <= rho <= max (Mv)_i / v_i.
template <typename Scalar>
Scalar spectral_radius_power(const Matrix3<Scalar>& m, Scalar tol = Scalar(1e-14),
                             int max_iters = 1000000) {
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  const Matrix3<Scalar> shifted = m + Matrix3<Scalar>::Identity();
  Vec v = Vec::Ones();
  Scalar estimate = 0;
  for (int it = 0; it < max_iters; ++it) {
    const Vec w = shifted * v;
    if ((v.array() > Scalar(0)).all()) {
      const Scalar lo = (w.array() / v.array()).minCoeff();
      const Scalar hi = (w.array() / v.array()).maxCoeff();
      estimate = (lo + hi) / 2;
      if (hi - lo <= tol * hi) break;
    } else {
      estimate = w.template lpNorm<1>() / v.template lpNorm<1>();
    }
    v = w / w.template lpNorm<1>();
  }
  return estimate - 1;
}

/// rho(M) < 1 for a nonnegative M, decided without computing rho: it holds
/// iff every leading principal minor of I - M is positive.
template <typename Scalar>
bool spectral_radius_below_one(const Matrix3<Scalar>& m) {
  const Matrix3<Scalar> a = Matrix3<Scalar>::Identity() - m;
  const Scalar d1 = a(0, 0);
  const Scalar d2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const Scalar d3 = a.determinant();
  return d1 > 0 && d2 > 0 && d3 > 0;
}

template <typename Scalar>
struct RhoMinimum {
  Scalar eta_opt{};
  Scalar rho_min{};
};

template <typename Scalar>
using MatrixBuilder = std::function<RateMatrix<Scalar>(Scalar, Scalar, Scalar, Scalar)>;

/// Grid minimum of rho over eta_j = eta_max * j / grid_size, j = 1..grid_size.
template <typename Scalar>
RhoMinimum<Scalar> min_rho_over_eta(const MatrixBuilder<Scalar>& builder, Scalar sigma,
                                    Scalar lip_L, Scalar mu, Scalar eta_max, int grid_size) {
  if (grid_size < 100) throw std::invalid_argument("grid_size must be at least 100");
  if (!(eta_max > Scalar(0))) throw std::invalid_argument("eta_max must be positive");
  RhoMinimum<Scalar> best{Scalar(0), std::numeric_limits<Scalar>::infinity()};
  for (int j = 1; j <= grid_size; ++j) {
    const Scalar eta = eta_max * Scalar(j) / Scalar(grid_size);
    const Scalar rho = spectral_radius3(builder(eta, sigma, lip_L, mu).m);
    if (rho < best.rho_min) best = {eta, rho};
  }
  return best;
}

}  // namespace netgiant::theory

#endif  // NETGIANT_THEORY_HPP
