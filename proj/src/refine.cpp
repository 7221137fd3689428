#include "hpdg/mesh.hpp"

#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace hpdg
{

namespace
{

std::uint64_t key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Bisector
{
  std::vector<Point>& nodes;
  // marked edge -> midpoint node (-1 until created)
  std::unordered_map<std::uint64_t, int>& marked;
  std::vector<std::array<int, 3>>& out;

  int midpoint(int a, int b)
  {
    int& m = marked.at(key(a, b));
    if (m < 0)
    {
      m = static_cast<int>(nodes.size());
      nodes.push_back(0.5 * (nodes[a] + nodes[b]));
    }
    return m;
  }

  bool is_marked(int a, int b) const { return marked.count(key(a, b)) != 0; }

  // Newest vertex bisection of (v0, v1, v2) across v0-v1, recursing into
  // the children as long as their refinement edges are marked.
  void split(const std::array<int, 3>& tri)
  {
    if (!is_marked(tri[0], tri[1]))
    {
      out.push_back(tri);
      return;
    }
    const int m = midpoint(tri[0], tri[1]);
    split({tri[2], tri[0], m});
    split({tri[1], tri[2], m});
  }
};

} // namespace

RefinementResult refine(const Mesh& mesh, std::span<const int> marked,
                        RefinementStrategy strategy)
{
  const int nt = mesh.num_triangles();
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  for (int t : marked)
  {
    if (t < 0 || t >= nt)
      throw std::out_of_range("marked triangle out of range");
    const auto& te = mesh.triangle_edges(t);
    if (strategy == RefinementStrategy::rgb)
      edge_marked[te[0]] = edge_marked[te[1]] = edge_marked[te[2]] = 1;
    else
      edge_marked[te[2]] = 1;
  }

  // closure: a triangle with any marked edge must have its refinement edge
  // marked
  std::vector<int> work;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (edge_marked[e])
      work.push_back(e);
  while (!work.empty())
  {
    const int e = work.back();
    work.pop_back();
    for (int t : mesh.edge(e).triangles)
    {
      if (t < 0)
        continue;
      const int r = mesh.triangle_edges(t)[2];
      if (!edge_marked[r])
      {
        edge_marked[r] = 1;
        work.push_back(r);
      }
    }
  }

  std::vector<Point> nodes = mesh.nodes();
  std::unordered_map<std::uint64_t, int> marks;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (edge_marked[e])
      marks.emplace(key(mesh.edge(e).nodes[0], mesh.edge(e).nodes[1]), -1);

  RefinementResult result;
  std::vector<std::array<int, 3>> tris;
  result.children.resize(nt);
  Bisector bis{nodes, marks, tris};
  for (int t = 0; t < nt; ++t)
  {
    const std::size_t first = tris.size();
    bis.split(mesh.triangle(t));
    for (std::size_t c = first; c < tris.size(); ++c)
    {
      result.children[t].push_back(static_cast<int>(c));
      result.parent.push_back(t);
    }
  }
  result.mesh = Mesh(std::move(nodes), std::move(tris));
  return result;
}

std::vector<int> transfer_degrees(const RefinementResult& refinement,
                                  std::span<const int> degrees)
{
  std::vector<int> out(refinement.parent.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = degrees[refinement.parent[t]];
  return out;
}

} // namespace hpdg
