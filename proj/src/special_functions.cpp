#include "hpdg/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hpdg
{

namespace
{

using real = long double;

constexpr double series_limit = 17.0;
constexpr real euler_gamma = 0.577215664901532860606512090082402431L;
constexpr real pi = 3.141592653589793238462643383279502884L;

bool is_integer(double nu)
{
  return nu == std::floor(nu);
}

real j_series(double nu, real x)
{
  const real h = x / 2;
  const real h2 = -h * h;
  real term = std::pow(h, static_cast<real>(nu)) / std::tgamma(static_cast<real>(nu) + 1);
  real sum = term;
  for (int m = 1; m < 400; ++m)
  {
    term *= h2 / (m * (m + static_cast<real>(nu)));
    sum += term;
    if (m > h && std::fabs(term) < 1e-22L * std::fabs(sum))
      break;
  }
  return sum;
}

real y0_series(real x)
{
  const real h = x / 2;
  const real q = h * h;
  real term = 1;
  real harmonic = 0;
  real sum = 0;
  for (int m = 1; m < 400; ++m)
  {
    term *= -q / (static_cast<real>(m) * m);
    harmonic += static_cast<real>(1) / m;
    const real add = -term * harmonic;
    sum += add;
    if (m > h && std::fabs(add) < 1e-22L * std::fabs(sum))
      break;
  }
  return 2 / pi * ((std::log(h) + euler_gamma) * j_series(0.0, x) + sum);
}

real y1_series(real x)
{
  const real h = x / 2;
  const real q = -h * h;
  // k = 0 term: psi(1) + psi(2) = 1 - 2 gamma
  real term = h;
  real harmonic = 0;
  real sum = term * (1 - 2 * euler_gamma);
  for (int k = 1; k < 400; ++k)
  {
    term *= q / (static_cast<real>(k) * (k + 1));
    const real hk = harmonic + static_cast<real>(1) / k;
    const real hk1 = hk + static_cast<real>(1) / (k + 1);
    harmonic = hk;
    const real add = term * (hk + hk1 - 2 * euler_gamma);
    sum += add;
    if (k > h && std::fabs(add) < 1e-22L * std::fabs(sum))
      break;
  }
  return -2 / (pi * x) + 2 / pi * std::log(h) * j_series(1.0, x) - sum / pi;
}

// Hankel expansion: returns (J_nu, Y_nu)
std::pair<real, real> asymptotic(double nu, real x)
{
  const real mu = 4 * static_cast<real>(nu) * nu;
  real p = 1, qsum = 0;
  real a = 1;
  real last = 1;
  for (int k = 1; k < 200; ++k)
  {
    a *= (mu - static_cast<real>(2 * k - 1) * (2 * k - 1)) / (8 * k * x);
    const real mag = std::fabs(a);
    // stop at the smallest term of the divergent series
    if (mag > last)
      break;
    last = mag;
    // a_k / x^k with sign (-1)^{floor(k/2)}
    const real s = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0)
      p += s * a;
    else
      qsum += s * a;
    if (mag < 1e-21L)
      break;
  }
  const real chi = x - (static_cast<real>(nu) / 2 + static_cast<real>(0.25)) * pi;
  const real amp = std::sqrt(2 / (pi * x));
  return {amp * (p * std::cos(chi) - qsum * std::sin(chi)),
          amp * (p * std::sin(chi) + qsum * std::cos(chi))};
}

} // namespace

double bessel_j(double nu, double x)
{
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("bessel_j: argument must be finite and >= 0");
  if (nu < -1.0 || (nu < 0.0 && is_integer(nu)))
    throw std::domain_error("bessel_j: unsupported order");
  if (x == 0.0)
  {
    if (nu == 0.0)
      return 1.0;
    if (nu > 0.0)
      return 0.0;
    throw std::domain_error("bessel_j: negative order is singular at 0");
  }
  if (x <= series_limit)
    return static_cast<double>(j_series(nu, x));
  return static_cast<double>(asymptotic(nu, x).first);
}

double bessel_y(int n, double x)
{
  if (n != 0 && n != 1)
    throw std::domain_error("bessel_y: only orders 0 and 1 are supported");
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("bessel_y: argument must be positive");
  if (x <= series_limit)
    return static_cast<double>(n == 0 ? y0_series(x) : y1_series(x));
  return static_cast<double>(asymptotic(n, x).second);
}

std::complex<double> hankel1(int n, double x)
{
  if (!(x > 0.0))
    throw std::domain_error("hankel1: argument must be positive");
  if (x <= series_limit)
    return {bessel_j(n, x), bessel_y(n, x)};
  const auto [j, y] = asymptotic(n, x);
  return {static_cast<double>(j), static_cast<double>(y)};
}

} // namespace hpdg
