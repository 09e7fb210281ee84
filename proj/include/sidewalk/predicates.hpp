#pragma once

// Orientation and in-circle tests with a floating-point filter and an exact
// fallback (fixed-width integers, rationals for extreme exponent spreads).

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace sidewalk::predicates {

namespace detail {

using Rational = boost::multiprecision::cpp_rational;
using Wide = boost::multiprecision::int1024_t;

// Error-bound constants for the static filters (eps = 2^-53).
inline constexpr double kEps = 1.1102230246251565e-16;
inline constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

// Largest exponent spread for which every intermediate of the fixed-width
// evaluation fits in 1024 bits.
inline constexpr int kMaxSpread = 190;

/// Writes each value as an integer multiple of a common power of two.
/// Returns false when the exponent spread is too wide for `Wide`.
template <std::size_t N>
bool to_common_integers(const std::array<double, N>& in, std::array<Wide, N>& out) {
  std::array<std::int64_t, N> mant{};
  std::array<int, N> expo{};
  int emin = std::numeric_limits<int>::max();
  int emax = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < N; ++i) {
    if (in[i] == 0.0) continue;
    int e = 0;
    const double m = std::frexp(in[i], &e);
    mant[i] = static_cast<std::int64_t>(std::ldexp(m, 53));
    expo[i] = e - 53;
    emin = std::min(emin, expo[i]);
    emax = std::max(emax, expo[i]);
  }
  if (emin == std::numeric_limits<int>::max()) emin = emax = 0;
  if (emax - emin > kMaxSpread) return false;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = mant[i];
    if (mant[i] != 0) out[i] <<= (expo[i] - emin);
  }
  return true;
}

template <typename T>
int orient_det_sign(const T& ax, const T& ay, const T& bx, const T& by, const T& cx, const T& cy) {
  const T det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
  return det.sign();
}

template <typename T>
int incircle_det_sign(const T& ax, const T& ay, const T& bx, const T& by, const T& cx, const T& cy,
                      const T& dx, const T& dy) {
  const T adx = ax - dx, ady = ay - dy;
  const T bdx = bx - dx, bdy = by - dy;
  const T cdx = cx - dx, cdy = cy - dy;
  const T alift = adx * adx + ady * ady;
  const T blift = bdx * bdx + bdy * bdy;
  const T clift = cdx * cdx + cdy * cdy;
  const T det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                clift * (adx * bdy - bdx * ady);
  return det.sign();
}

inline int orient_exact(double ax, double ay, double bx, double by, double cx, double cy) {
  std::array<Wide, 6> w;
  if (to_common_integers<6>({ax, ay, bx, by, cx, cy}, w)) {
    return orient_det_sign(w[0], w[1], w[2], w[3], w[4], w[5]);
  }
  return orient_det_sign(Rational(ax), Rational(ay), Rational(bx), Rational(by), Rational(cx), Rational(cy));
}

inline int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                          double dx, double dy) {
  std::array<Wide, 8> w;
  if (to_common_integers<8>({ax, ay, bx, by, cx, cy, dx, dy}, w)) {
    return incircle_det_sign(w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7]);
  }
  return incircle_det_sign(Rational(ax), Rational(ay), Rational(bx), Rational(by), Rational(cx),
                           Rational(cy), Rational(dx), Rational(dy));
}

}  // namespace detail

/// +1 if (a, b, c) turn counterclockwise, -1 clockwise, 0 collinear.
template <typename P>
int orient(const P& a, const P& b, const P& c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double bound = detail::kOrientBound * (std::abs(detleft) + std::abs(detright));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient_exact(a.x, a.y, b.x, b.y, c.x, c.y);
}

/// +1 if d lies strictly inside the circle through counterclockwise a, b, c;
/// -1 if strictly outside; 0 if cocircular.
template <typename P>
int incircle(const P& a, const P& b, const P& c, const P& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det =
      alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = detail::kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::incircle_exact(a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y);
}

}  // namespace sidewalk::predicates
