#include "hpdg/mesh.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hpdg
{

void write_mesh(std::ostream& out, const Mesh& mesh, std::span<const int> degrees)
{
  if (static_cast<int>(degrees.size()) != mesh.num_triangles())
    throw std::invalid_argument("degree map does not match mesh");
  out << mesh.num_nodes() << '\n' << std::setprecision(17);
  for (const Point& p : mesh.nodes())
    out << p.x() << ' ' << p.y() << '\n';
  out << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto& tri = mesh.triangle(t);
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << degrees[t] << '\n';
  }
}

namespace
{

struct LineReader
{
  std::istream& in;
  int line = 0;

  std::istringstream next(const char* what)
  {
    std::string s;
    while (std::getline(in, s))
    {
      ++line;
      if (s.find_first_not_of(" \t\r") != std::string::npos)
        return std::istringstream(s);
    }
    throw std::runtime_error("mesh snapshot: unexpected end of input, expected "
                             + std::string(what));
  }

  [[noreturn]] void fail(const char* what) const
  {
    throw std::runtime_error("mesh snapshot line " + std::to_string(line)
                             + ": malformed " + what);
  }
};

} // namespace

MeshSnapshot read_mesh(std::istream& in)
{
  LineReader r{in};
  int nn = 0;
  if (!(r.next("node count") >> nn) || nn < 0)
    r.fail("node count");
  std::vector<Point> nodes(nn);
  for (auto& p : nodes)
  {
    auto ls = r.next("coordinates");
    if (!(ls >> p.x() >> p.y()))
      r.fail("coordinates");
  }
  int nt = 0;
  if (!(r.next("triangle count") >> nt) || nt < 0)
    r.fail("triangle count");
  std::vector<std::array<int, 3>> tris(nt);
  std::vector<int> degrees(nt);
  for (int t = 0; t < nt; ++t)
  {
    auto ls = r.next("triangle");
    if (!(ls >> tris[t][0] >> tris[t][1] >> tris[t][2] >> degrees[t]))
      r.fail("triangle");
  }
  return {Mesh(std::move(nodes), std::move(tris)), std::move(degrees)};
}

} // namespace hpdg
