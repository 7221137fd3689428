#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace hpdg
{

using Point = Eigen::Vector2d;

/// Mesh edge. Nodes are stored in ascending global order, which also
/// fixes the global orientation used for shared normal-trace unknowns.
struct Edge
{
  std::array<int, 2> nodes{-1, -1};
  std::array<int, 2> triangles{-1, -1};
  /// Local edge index (opposite-vertex convention) inside each triangle
  std::array<int, 2> local{-1, -1};

  bool on_boundary() const { return triangles[1] < 0; }
};

/// Affine map x = v0 + B xi from the reference triangle
/// (0,0), (1,0), (0,1).
struct ElementGeometry
{
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_transpose;
  double det = 0.0;
  double area = 0.0;
  double diameter = 0.0;
};

/// Node patch omega_z.
struct Patch
{
  int node = -1;
  bool boundary_node = false;
  /// Triangles sharing the node, sorted by angle around it
  std::vector<int> triangles;
  /// Edges sharing the node
  std::vector<int> edges;
  /// Edges sharing the node that lie on the domain boundary
  std::vector<int> boundary_edges;
  /// Edges of the patch opposite the node (they form the patch boundary
  /// together with boundary_edges)
  std::vector<int> opposite_edges;
};

/// Conforming triangulation.
///
/// Triangles are stored counter-clockwise with the newest vertex last, so
/// the refinement edge of triangle (v0, v1, v2) is (v0, v1). Local edge i
/// is the edge opposite vertex i and runs from v_{i+1} to v_{i+2}.
class Mesh
{
public:
  Mesh() = default;

  /// Build connectivity. Clockwise triangles are reoriented by swapping
  /// v0 and v1, which keeps the newest vertex in place.
  Mesh(std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Point& node(int n) const { return nodes_[n]; }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const
  {
    return triangles_;
  }
  const std::array<int, 3>& triangle_edges(int t) const
  {
    return triangle_edges_[t];
  }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool node_on_boundary(int n) const { return node_boundary_[n] != 0; }
  std::span<const int> node_triangles(int n) const;

  const ElementGeometry& geometry(int t) const { return geometry_[t]; }
  double edge_length(int e) const { return edge_length_[e]; }

  /// Outward unit normal of local edge i of triangle t.
  Point outward_normal(int t, int local) const;

  /// Physical point of reference coordinates xi in triangle t.
  Point map(int t, const Point& xi) const
  {
    return nodes_[triangles_[t][0]] + geometry_[t].jacobian * xi;
  }

  Point centroid(int t) const;

  /// Total area of the triangulation.
  double area() const;

  Patch patch(int node) const;

  /// Boundary edge indices in ascending order.
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }

private:
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Edge> edges_;
  std::vector<double> edge_length_;
  std::vector<char> node_boundary_;
  std::vector<int> node_tri_offset_;
  std::vector<int> node_tri_list_;
  std::vector<ElementGeometry> geometry_;
  std::vector<int> boundary_edges_;
};

struct Rectangle
{
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// (-1,1)^2 without (0,1)x(-1,0)
struct LShape
{
};

using DomainShape = std::variant<Rectangle, LShape>;

/// Structured mesh of right isosceles triangles (two per square cell) with
/// the right-angle vertex as newest vertex. Cell side is the largest
/// value <= target_h that divides the domain evenly, so h_T <= sqrt(2)
/// target_h. An even cell count is enforced so that the lines x = 0 and
/// y = 0 of symmetric domains are resolved.
Mesh build_structured_mesh(const DomainShape& domain, double target_h);

/// Per-edge trace of the mesh-size and degree functions:
/// h_E = min(h_T+, h_T-), p_E = max(p_T+, p_T-), or the values of the
/// single adjacent element on boundary edges.
struct EdgeTraces
{
  std::vector<double> h;
  std::vector<int> p;
};

EdgeTraces compute_edge_traces(const Mesh& mesh, std::span<const int> degrees);

enum class RefinementStrategy
{
  nvb,
  rgb
};

struct RefinementResult
{
  Mesh mesh;
  /// children[t] lists the new triangles covering old triangle t (a single
  /// entry when t was not refined)
  std::vector<std::vector<int>> children;
  /// parent[t'] is the old triangle containing new triangle t'
  std::vector<int> parent;
};

/// Refine the marked triangles and close the result to a conforming mesh.
/// NVB bisects each marked triangle once; RGB splits each marked triangle
/// into four (all three edges bisected). Closure bisects refinement edges
/// until no hanging node remains.
RefinementResult refine(const Mesh& mesh, std::span<const int> marked,
                        RefinementStrategy strategy);

/// Degree map of the refined mesh: children inherit their parent's degree.
std::vector<int> transfer_degrees(const RefinementResult& refinement,
                                  std::span<const int> degrees);

/// No node lies in the relative interior of an edge, every edge has one or
/// two incident triangles, and all areas are positive.
bool is_conforming(const Mesh& mesh);

/// max_T h_T^2 / |T|
double max_shape_ratio(const Mesh& mesh);

/// Plain-text snapshot: node count, coordinates, triangle count, then
/// "v0 v1 v2 degree" per triangle.
void write_mesh(std::ostream& out, const Mesh& mesh,
                std::span<const int> degrees);

struct MeshSnapshot
{
  Mesh mesh;
  std::vector<int> degrees;
};

MeshSnapshot read_mesh(std::istream& in);

} // namespace hpdg
