#pragma once

// Power-series oracle for J_nu, Y_0 and Y_1 in 260-digit decimal arithmetic.
// The series cancel catastrophically for large x (terms reach e^x), so the
// working precision is chosen to leave > 20 correct digits up to x = 500.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <complex>

namespace oracle
{

using big = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<260>>;

inline big j_series(const big& nu, const big& x)
{
  const big h = x / 2;
  const big q = -h * h;
  big term = pow(h, nu) / boost::math::tgamma(nu + 1);
  big sum = term;
  const big eps("1e-250");
  for (int m = 1; m < 5000; ++m)
  {
    term *= q / (m * (m + nu));
    sum += term;
    if (m > h && abs(term) < eps)
      break;
  }
  return sum;
}

inline double bessel_j(double nu, double x)
{
  return static_cast<double>(j_series(big(nu), big(x)));
}

// Y_n = 2/pi ln(x/2) J_n - 1/pi sum_m (-1)^m (psi(m+1) + psi(m+n+1))
//       (x/2)^{2m+n} / (m! (m+n)!) - (n = 1: 2/(pi x))
inline double bessel_y(int n, double xd)
{
  using boost::math::constants::euler;
  using boost::math::constants::pi;
  const big x(xd);
  const big h = x / 2;
  const big q = -h * h;
  // psi(m+1) = H_m - gamma
  big hm = 0;
  big hmn = 0;
  for (int j = 1; j <= n; ++j)
    hmn += big(1) / j;
  big term = n == 0 ? big(1) : h;
  big sum = term * (hm + hmn - 2 * euler<big>());
  const big eps("1e-250");
  for (int m = 1; m < 5000; ++m)
  {
    term *= q / (m * big(m + n));
    hm += big(1) / m;
    hmn += big(1) / (m + n);
    const big add = term * (hm + hmn - 2 * euler<big>());
    sum += add;
    if (m > h && abs(add) < eps)
      break;
  }
  big y = 2 / pi<big>() * log(h) * j_series(big(n), x) - sum / pi<big>();
  if (n == 1)
    y -= 2 / (pi<big>() * x);
  return static_cast<double>(y);
}

inline std::complex<double> hankel1(int n, double x)
{
  return {bessel_j(n, x), bessel_y(n, x)};
}

} // namespace oracle
