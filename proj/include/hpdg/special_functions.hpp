#pragma once

#include <complex>

namespace hpdg
{

/// First positive root of J_1.
inline constexpr double bessel_j1_first_root = 3.83170597020751;

/// Bessel function of the first kind J_nu(x) for real order nu >= -1
/// (integer and fractional orders) and x >= 0. Negative non-integer
/// orders are singular at 0 and require x > 0.
double bessel_j(double nu, double x);

/// Bessel function of the second kind Y_n(x), n = 0 or 1, x > 0.
double bessel_y(int n, double x);

/// Hankel function of the first kind H_n(x) = J_n(x) + i Y_n(x),
/// n = 0 or 1, x > 0.
std::complex<double> hankel1(int n, double x);

} // namespace hpdg
