#include "hpdg/h1_basis.hpp"

namespace hpdg
{

void H1Basis::evaluate(const std::array<int, 3>& gv, const Point& xi,
                       Eigen::VectorXd& values, Eigen::VectorXd& dxi,
                       Eigen::VectorXd& deta) const
{
  const int n = dim();
  values.resize(n);
  dxi.resize(n);
  deta.resize(n);
  const double lam[3] = {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
  const Point grad[3] = {Point(-1.0, -1.0), Point(1.0, 0.0), Point(0.0, 1.0)};

  for (int i = 0; i < 3; ++i)
  {
    values(i) = lam[i];
    dxi(i) = grad[i].x();
    deta(i) = grad[i].y();
  }

  if (P >= 2)
  {
    Eigen::VectorXd leg(P - 1), dleg(P - 1);
    for (int e = 0; e < 3; ++e)
    {
      int a = (e + 1) % 3, b = (e + 2) % 3;
      if (gv[a] > gv[b])
        std::swap(a, b);
      jacobi(P - 2, 0.0, 0.0, lam[b] - lam[a], leg, &dleg);
      const double prod = lam[a] * lam[b];
      const Point dprod = lam[b] * grad[a] + lam[a] * grad[b];
      const Point ddiff = grad[b] - grad[a];
      for (int k = 0; k <= P - 2; ++k)
      {
        const int idx = edge_offset(e) + k;
        values(idx) = prod * leg(k);
        const Point g = dprod * leg(k) + prod * dleg(k) * ddiff;
        dxi(idx) = g.x();
        deta(idx) = g.y();
      }
    }
  }

  if (P >= 3)
  {
    const int nb = scalar_dim(P - 3);
    Eigen::VectorXd v(nb), dx, dy;
    dubiner(P - 3, xi, v, &dx, &dy);
    const double bubble = lam[0] * lam[1] * lam[2];
    const Point dbubble = lam[1] * lam[2] * grad[0] + lam[0] * lam[2] * grad[1]
                          + lam[0] * lam[1] * grad[2];
    for (int m = 0; m < nb; ++m)
    {
      const int idx = bubble_offset() + m;
      values(idx) = bubble * v(m);
      dxi(idx) = dbubble.x() * v(m) + bubble * dx(m);
      deta(idx) = dbubble.y() * v(m) + bubble * dy(m);
    }
  }
}

} // namespace hpdg
