#include "hpdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace hpdg
{

namespace
{

std::uint64_t edge_key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Point& a, const Point& b, const Point& c)
{
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles))
{
  const int nn = num_nodes();
  const int nt = num_triangles();

  for (auto& tri : triangles_)
  {
    for (int v : tri)
      if (v < 0 || v >= nn)
        throw std::invalid_argument("triangle references node "
                                    + std::to_string(v) + " out of range");
    if (signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]) < 0.0)
      std::swap(tri[0], tri[1]);
  }

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(3 * static_cast<std::size_t>(nt));
  triangle_edges_.resize(nt);
  for (int t = 0; t < nt; ++t)
  {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i)
    {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
      if (inserted)
      {
        Edge e;
        e.nodes = {std::min(a, b), std::max(a, b)};
        e.triangles[0] = t;
        e.local[0] = i;
        edges_.push_back(e);
      }
      else
      {
        Edge& e = edges_[it->second];
        if (e.triangles[1] >= 0)
          throw std::invalid_argument("edge shared by more than two triangles");
        e.triangles[1] = t;
        e.local[1] = i;
      }
      triangle_edges_[t][i] = it->second;
    }
  }

  node_boundary_.assign(nn, 0);
  edge_length_.resize(edges_.size());
  for (int e = 0; e < num_edges(); ++e)
  {
    const Edge& edge = edges_[e];
    edge_length_[e] = (nodes_[edge.nodes[1]] - nodes_[edge.nodes[0]]).norm();
    if (edge.on_boundary())
    {
      boundary_edges_.push_back(e);
      node_boundary_[edge.nodes[0]] = 1;
      node_boundary_[edge.nodes[1]] = 1;
    }
  }

  node_tri_offset_.assign(nn + 1, 0);
  for (const auto& tri : triangles_)
    for (int v : tri)
      ++node_tri_offset_[v + 1];
  for (int n = 0; n < nn; ++n)
    node_tri_offset_[n + 1] += node_tri_offset_[n];
  node_tri_list_.resize(node_tri_offset_[nn]);
  {
    std::vector<int> fill(node_tri_offset_.begin(), node_tri_offset_.end() - 1);
    for (int t = 0; t < nt; ++t)
      for (int v : triangles_[t])
        node_tri_list_[fill[v]++] = t;
  }

  geometry_.resize(nt);
  for (int t = 0; t < nt; ++t)
  {
    const auto& tri = triangles_[t];
    const Point& p0 = nodes_[tri[0]];
    const Point& p1 = nodes_[tri[1]];
    const Point& p2 = nodes_[tri[2]];
    ElementGeometry& g = geometry_[t];
    g.jacobian.col(0) = p1 - p0;
    g.jacobian.col(1) = p2 - p0;
    g.det = g.jacobian.determinant();
    if (!(g.det > 0.0))
      throw std::invalid_argument("degenerate triangle " + std::to_string(t));
    g.inverse_transpose = g.jacobian.inverse().transpose();
    g.area = 0.5 * g.det;
    g.diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
  }
}

std::span<const int> Mesh::node_triangles(int n) const
{
  return {node_tri_list_.data() + node_tri_offset_[n],
          static_cast<std::size_t>(node_tri_offset_[n + 1] - node_tri_offset_[n])};
}

Point Mesh::outward_normal(int t, int local) const
{
  const auto& tri = triangles_[t];
  const Point tangent = nodes_[tri[(local + 2) % 3]] - nodes_[tri[(local + 1) % 3]];
  return Point(tangent.y(), -tangent.x()) / tangent.norm();
}

Point Mesh::centroid(int t) const
{
  const auto& tri = triangles_[t];
  return (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]) / 3.0;
}

double Mesh::area() const
{
  double a = 0.0;
  for (const auto& g : geometry_)
    a += g.area;
  return a;
}

Patch Mesh::patch(int node) const
{
  Patch p;
  p.node = node;
  p.boundary_node = node_on_boundary(node);
  const auto tris = node_triangles(node);
  p.triangles.assign(tris.begin(), tris.end());
  const Point& z = nodes_[node];
  std::vector<std::pair<double, int>> by_angle;
  for (int t : p.triangles)
  {
    const Point d = centroid(t) - z;
    by_angle.emplace_back(std::atan2(d.y(), d.x()), t);
  }
  std::sort(by_angle.begin(), by_angle.end());
  for (std::size_t i = 0; i < by_angle.size(); ++i)
    p.triangles[i] = by_angle[i].second;

  for (int t : p.triangles)
  {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i)
    {
      const int e = triangle_edges_[t][i];
      if (tri[i] == node)
        p.opposite_edges.push_back(e);
      else
        p.edges.push_back(e);
    }
  }
  std::sort(p.edges.begin(), p.edges.end());
  p.edges.erase(std::unique(p.edges.begin(), p.edges.end()), p.edges.end());
  for (int e : p.edges)
    if (edges_[e].on_boundary())
      p.boundary_edges.push_back(e);
  return p;
}

Mesh build_structured_mesh(const DomainShape& domain, double target_h)
{
  if (!(target_h > 0.0))
    throw std::invalid_argument("target_h must be positive");

  double x0, y0, x1, y1;
  bool lshape = std::holds_alternative<LShape>(domain);
  if (lshape)
  {
    x0 = y0 = -1.0;
    x1 = y1 = 1.0;
  }
  else
  {
    const auto& r = std::get<Rectangle>(domain);
    x0 = r.x0, y0 = r.y0, x1 = r.x1, y1 = r.y1;
    if (!(x1 > x0 && y1 > y0))
      throw std::invalid_argument("empty rectangle");
  }

  auto cells = [&](double lo, double hi) {
    int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / target_h - 1e-12)));
    if (lshape || (lo < 0.0 && hi > 0.0 && std::abs(lo + hi) < 1e-14))
      n += n % 2;
    return n;
  };
  const int nx = cells(x0, x1);
  const int ny = cells(y0, y1);
  const double hx = (x1 - x0) / nx;
  const double hy = (y1 - y0) / ny;

  std::vector<Point> nodes;
  std::vector<int> id((nx + 1) * (ny + 1), -1);
  auto inside_cell = [&](int i, int j) {
    if (!lshape)
      return true;
    // drop the quadrant (0,1) x (-1,0)
    return !(i >= nx / 2 && j < ny / 2);
  };
  auto node_id = [&](int i, int j) {
    int& v = id[j * (nx + 1) + i];
    if (v < 0)
    {
      v = static_cast<int>(nodes.size());
      nodes.emplace_back(x0 + i * hx, y0 + j * hy);
    }
    return v;
  };

  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      if (!inside_cell(i, j))
        continue;
      const int a = node_id(i, j);
      const int b = node_id(i + 1, j);
      const int c = node_id(i + 1, j + 1);
      const int d = node_id(i, j + 1);
      // hypotenuse a-c is the refinement edge, right-angle vertex newest
      tris.push_back({a, c, b});
      tris.push_back({c, a, d});
    }
  return Mesh(std::move(nodes), std::move(tris));
}

EdgeTraces compute_edge_traces(const Mesh& mesh, std::span<const int> degrees)
{
  EdgeTraces tr;
  tr.h.resize(mesh.num_edges());
  tr.p.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const Edge& edge = mesh.edge(e);
    const int tp = edge.triangles[0];
    tr.h[e] = mesh.geometry(tp).diameter;
    tr.p[e] = degrees[tp];
    if (!edge.on_boundary())
    {
      const int tm = edge.triangles[1];
      tr.h[e] = std::min(tr.h[e], mesh.geometry(tm).diameter);
      tr.p[e] = std::max(tr.p[e], degrees[tm]);
    }
  }
  return tr;
}

bool is_conforming(const Mesh& mesh)
{
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (!(mesh.geometry(t).det > 0.0))
      return false;
  if (mesh.num_edges() == 0)
    return true;

  // Bucket nodes on a uniform grid, then look for nodes strictly inside any
  // edge. With two incident triangles per edge guaranteed by construction,
  // this is the only remaining way two triangles can meet improperly.
  double min_len = mesh.edge_length(0);
  Point lo = mesh.node(0), hi = mesh.node(0);
  for (int e = 0; e < mesh.num_edges(); ++e)
    min_len = std::min(min_len, mesh.edge_length(e));
  for (const Point& p : mesh.nodes())
  {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double cell = std::max(min_len, 1e-300);
  const int gx = std::min(4096, static_cast<int>((hi.x() - lo.x()) / cell) + 1);
  const int gy = std::min(4096, static_cast<int>((hi.y() - lo.y()) / cell) + 1);
  const double cx = (hi.x() - lo.x()) / gx + 1e-300;
  const double cy = (hi.y() - lo.y()) / gy + 1e-300;
  auto bucket = [&](const Point& p) {
    const int i = std::clamp(static_cast<int>((p.x() - lo.x()) / cx), 0, gx - 1);
    const int j = std::clamp(static_cast<int>((p.y() - lo.y()) / cy), 0, gy - 1);
    return std::pair{i, j};
  };
  std::unordered_map<std::int64_t, std::vector<int>> grid;
  for (int n = 0; n < mesh.num_nodes(); ++n)
  {
    auto [i, j] = bucket(mesh.node(n));
    grid[static_cast<std::int64_t>(j) * gx + i].push_back(n);
  }

  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const Edge& edge = mesh.edge(e);
    const Point& a = mesh.node(edge.nodes[0]);
    const Point& b = mesh.node(edge.nodes[1]);
    const double len = mesh.edge_length(e);
    auto [i0, j0] = bucket(a.cwiseMin(b));
    auto [i1, j1] = bucket(a.cwiseMax(b));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
      {
        auto it = grid.find(static_cast<std::int64_t>(j) * gx + i);
        if (it == grid.end())
          continue;
        for (int n : it->second)
        {
          if (n == edge.nodes[0] || n == edge.nodes[1])
            continue;
          const Point& p = mesh.node(n);
          const double s = (p - a).dot(b - a) / (len * len);
          if (s <= 1e-12 || s >= 1.0 - 1e-12)
            continue;
          const double dist = std::abs(2.0 * signed_area(a, b, p)) / len;
          if (dist <= 1e-12 * len)
            return false;
        }
      }
  }
  return true;
}

double max_shape_ratio(const Mesh& mesh)
{
  double r = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto& g = mesh.geometry(t);
    r = std::max(r, g.diameter * g.diameter / g.area);
  }
  return r;
}

} // namespace hpdg
