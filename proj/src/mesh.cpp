#include "psfem/mesh.hpp"

#include "psfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace psfem {

namespace {

double cross(const Point &u, const Point &v) { return u.x() * v.y() - u.y() * v.x(); }

std::string element_label(long element) {
  return element >= 0 ? "element " + std::to_string(element) : "quad";
}

double diameter(const QuadVertices &v) {
  double h = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) h = std::max(h, (v[i] - v[j]).norm());
  return h;
}

} // namespace

ElementGeometry bilinear_coeffs(const QuadVertices &v, long element) {
  const double h = diameter(v);
  if (!(h > 0.0)) throw GeometryError(element_label(element) + ": degenerate quad (zero diameter)");

  // Strict convexity with counter-clockwise orientation.
  for (int i = 0; i < 4; ++i) {
    const Point e0 = v[(i + 1) % 4] - v[i];
    const Point e1 = v[(i + 2) % 4] - v[(i + 1) % 4];
    if (cross(e0, e1) <= 1e-14 * h * h)
      throw GeometryError(element_label(element) +
                          ": quad is not strictly convex and counter-clockwise at vertex " +
                          std::to_string((i + 1) % 4));
  }

  ElementGeometry g;
  const auto coeffs = [&](int c, std::array<double, 4> &out) {
    const double z1 = v[0][c], z2 = v[1][c], z3 = v[2][c], z4 = v[3][c];
    out[0] = 0.25 * (z1 + z2 + z3 + z4);
    out[1] = 0.25 * (-z1 + z2 + z3 - z4);
    out[2] = 0.25 * (-z1 - z2 + z3 + z4);
    out[3] = 0.25 * (z1 - z2 + z3 - z4);
  };
  coeffs(0, g.a);
  coeffs(1, g.b);
  g.J[0] = g.a1() * g.b2() - g.a2() * g.b1();
  g.J[1] = g.a1() * g.b12() - g.a12() * g.b1();
  g.J[2] = g.a12() * g.b2() - g.a2() * g.b12();
  g.d_K = 0.5 * std::hypot(g.a12(), g.b12());
  g.h_K = h;

  if (g.J[0] - std::abs(g.J[1]) - std::abs(g.J[2]) <= 0.0)
    throw GeometryError(element_label(element) + ": Jacobian not positive on the element");
  return g;
}

Point map_ref_to_phys(const ElementGeometry &g, double xi, double eta) {
  return {g.a0() + g.a1() * xi + g.a2() * eta + g.a12() * xi * eta,
          g.b0() + g.b1() * xi + g.b2() * eta + g.b12() * xi * eta};
}

Mat2 jacobian_matrix(const ElementGeometry &g, double xi, double eta) {
  Mat2 m;
  m << g.a1() + g.a12() * eta, g.a2() + g.a12() * xi, g.b1() + g.b12() * eta,
      g.b2() + g.b12() * xi;
  return m;
}

Mat2 inverse_jacobian(const ElementGeometry &g, double xi, double eta) {
  const double det = g.jacobian(xi, eta);
  if (!(det > 0.0))
    throw GeometryError("degenerate element: J_K = " + std::to_string(det) + " at (" +
                        std::to_string(xi) + ", " + std::to_string(eta) + ")");
  Mat2 m;
  m << g.b2() + g.b12() * xi, -g.a2() - g.a12() * xi, -g.b1() - g.b12() * eta,
      g.a1() + g.a12() * eta;
  return m / det;
}

Point map_phys_to_ref(const ElementGeometry &g, const Point &p, double tol, int max_iter) {
  Point r(0.0, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    const Point res = map_ref_to_phys(g, r.x(), r.y()) - p;
    const Point step = inverse_jacobian(g, r.x(), r.y()) * res;
    r -= step;
    if (step.norm() < tol) return r;
  }
  throw NumericError("map_phys_to_ref: Newton iteration did not converge");
}

QuadMesh::QuadMesh(std::vector<Point> vertices, std::vector<std::array<int, 4>> quads)
    : vertices_(std::move(vertices)), quads_(std::move(quads)) {
  const int nv = static_cast<int>(vertices_.size());
  geometry_.reserve(quads_.size());
  patches_.assign(vertices_.size(), {});
  for (std::size_t k = 0; k < quads_.size(); ++k) {
    for (int idx : quads_[k])
      if (idx < 0 || idx >= nv)
        throw InputError("element " + std::to_string(k) + " references vertex " +
                         std::to_string(idx) + " out of range");
    geometry_.push_back(bilinear_coeffs(element_vertices(k), static_cast<long>(k)));
    for (int idx : quads_[k]) patches_[idx].push_back(static_cast<int>(k));
  }

  boundary_.assign(vertices_.size(), false);
  const auto ee = edge_elements();
  const auto es = edges();
  for (std::size_t e = 0; e < es.size(); ++e) {
    if (ee[e][1] < 0) {
      boundary_[es[e][0]] = true;
      boundary_[es[e][1]] = true;
    }
  }
}

std::size_t QuadMesh::num_interior_vertices() const {
  return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), false));
}

QuadVertices QuadMesh::element_vertices(std::size_t k) const {
  const auto &q = quads_[k];
  return {vertices_[q[0]], vertices_[q[1]], vertices_[q[2]], vertices_[q[3]]};
}

std::vector<std::array<int, 2>> QuadMesh::edges() const {
  std::vector<std::array<int, 2>> out;
  std::map<std::array<int, 2>, int> seen;
  for (const auto &q : quads_) {
    for (int i = 0; i < 4; ++i) {
      std::array<int, 2> e{q[i], q[(i + 1) % 4]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      if (seen.emplace(e, static_cast<int>(out.size())).second) out.push_back(e);
    }
  }
  return out;
}

std::vector<std::array<int, 2>> QuadMesh::edge_elements() const {
  std::map<std::array<int, 2>, int> index;
  std::vector<std::array<int, 2>> out;
  for (std::size_t k = 0; k < quads_.size(); ++k) {
    const auto &q = quads_[k];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 2> e{q[i], q[(i + 1) % 4]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      auto [it, inserted] = index.emplace(e, static_cast<int>(out.size()));
      if (inserted) {
        out.push_back({static_cast<int>(k), -1});
      } else {
        auto &slot = out[it->second];
        if (slot[1] >= 0)
          throw InputError("edge (" + std::to_string(e[0]) + ", " + std::to_string(e[1]) +
                           ") is shared by more than two elements");
        slot[1] = static_cast<int>(k);
      }
    }
  }
  return out;
}

double QuadMesh::h_max() const {
  double h = 0.0;
  for (const auto &g : geometry_) h = std::max(h, g.h_K);
  return h;
}

QuadMesh refine_bisection(const QuadMesh &mesh) {
  std::vector<Point> verts = mesh.vertices();
  const auto es = mesh.edges();
  std::map<std::array<int, 2>, int> midpoint;
  for (const auto &e : es) {
    midpoint.emplace(e, static_cast<int>(verts.size()));
    verts.push_back(0.5 * (mesh.vertices()[e[0]] + mesh.vertices()[e[1]]));
  }
  const auto mid = [&](int i, int j) {
    std::array<int, 2> e{std::min(i, j), std::max(i, j)};
    return midpoint.at(e);
  };

  std::vector<std::array<int, 4>> quads;
  quads.reserve(4 * mesh.num_elements());
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const auto &q = mesh.quads()[k];
    const int c = static_cast<int>(verts.size());
    verts.push_back(mesh.element(k).center());
    const int m12 = mid(q[0], q[1]), m23 = mid(q[1], q[2]), m34 = mid(q[2], q[3]),
              m41 = mid(q[3], q[0]);
    quads.push_back({q[0], m12, c, m41});
    quads.push_back({m12, q[1], m23, c});
    quads.push_back({c, m23, q[2], m34});
    quads.push_back({m41, c, m34, q[3]});
  }
  return QuadMesh(std::move(verts), std::move(quads));
}

QuadMesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1) throw InputError("rectangle_mesh: need nx, ny >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
  std::vector<std::array<int, 4>> quads;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v = j * (nx + 1) + i;
      quads.push_back({v, v + 1, v + nx + 2, v + nx + 1});
    }
  return QuadMesh(std::move(verts), std::move(quads));
}

double inscribed_circle_diameter(const QuadVertices &v) {
  // Chebyshev center: maximize r subject to n_i.(c - p_i) >= r for the four
  // inward edge normals. Enumerate the LP vertices (three active constraints).
  std::array<Point, 4> n;
  std::array<double, 4> rhs;
  for (int i = 0; i < 4; ++i) {
    const Point d = (v[(i + 1) % 4] - v[i]).normalized();
    n[i] = Point(-d.y(), d.x());
    rhs[i] = n[i].dot(v[i]);
  }
  double best = 0.0;
  for (int skip = 0; skip < 4; ++skip) {
    Eigen::Matrix3d m;
    Eigen::Vector3d b;
    int row = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == skip) continue;
      m.row(row) << n[i].x(), n[i].y(), -1.0;
      b[row] = rhs[i];
      ++row;
    }
    const auto lu = m.fullPivLu();
    if (!lu.isInvertible()) continue;
    const Eigen::Vector3d s = lu.solve(b);
    const Point c(s[0], s[1]);
    const double r = s[2];
    if (r <= 0.0) continue;
    bool feasible = true;
    for (int i = 0; i < 4; ++i)
      if (n[i].dot(c) - rhs[i] < r * (1.0 - 1e-12)) feasible = false;
    if (feasible) best = std::max(best, r);
  }
  return 2.0 * best;
}

MeshQualityReport quality_report(const QuadMesh &mesh, double alpha) {
  MeshQualityReport rep;
  const std::size_t ne = mesh.num_elements();
  rep.rho_K.resize(ne);
  rep.h_K.resize(ne);
  rep.d_K.resize(ne);
  rep.min_jacobian_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ne; ++k) {
    const auto v = mesh.element_vertices(k);
    const auto &g = mesh.element(k);
    double rho = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      const Point &p = v[(i + 3) % 4], &q = v[i], &r = v[(i + 1) % 4];
      const double area = 0.5 * std::abs(cross(q - p, r - p));
      const double perimeter = (q - p).norm() + (r - q).norm() + (p - r).norm();
      rho = std::min(rho, 4.0 * area / perimeter);
    }
    rep.rho_K[k] = rho;
    rep.h_K[k] = g.h_K;
    rep.d_K[k] = g.d_K;
    rep.varrho = std::max(rep.varrho, g.h_K / rho);
    rep.jamet_ratio = std::max(rep.jamet_ratio, g.h_K / inscribed_circle_diameter(v));
    rep.min_jacobian_margin =
        std::min(rep.min_jacobian_margin, (g.J[0] - std::abs(g.J[1]) - std::abs(g.J[2])) / g.J[0]);
  }
  rep.varrho_above_two = rep.varrho > 2.0;

  const auto rel = [](double x, double y, double scale) {
    const double m = std::max(std::abs(x), std::abs(y));
    return m > 1e-12 * scale ? std::abs(x - y) / m : 0.0;
  };
  const auto ee = mesh.edge_elements();
  for (const auto &pair : ee) {
    if (pair[1] < 0) continue;
    const auto &g1 = mesh.element(pair[0]);
    const auto &g2 = mesh.element(pair[1]);
    const double h = std::max(g1.h_K, g2.h_K);
    const double norm = std::pow(h, alpha);
    for (int j = 1; j <= 2; ++j) {
      rep.mc2_max_deviation = std::max(rep.mc2_max_deviation, rel(g1.a[j], g2.a[j], h) / norm);
      rep.mc2_max_deviation = std::max(rep.mc2_max_deviation, rel(g1.b[j], g2.b[j], h) / norm);
    }
  }
  return rep;
}

double fit_distortion_exponent(std::span<const QuadMesh> ladder) {
  if (ladder.size() < 2) throw InputError("fit_distortion_exponent: need at least two levels");
  std::vector<double> lx, ly;
  for (const auto &m : ladder) {
    double h = 0.0, d = 0.0;
    for (const auto &g : m.geometry()) {
      h = std::max(h, g.h_K);
      d = std::max(d, g.d_K);
    }
    if (d > 1e-14 * h) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(d));
    }
  }
  if (lx.empty()) return std::numeric_limits<double>::infinity();
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return slope - 1.0;
}

void write_mesh(std::ostream &os, const QuadMesh &mesh) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "quadmesh 1\n";
  buf << "V " << mesh.num_vertices() << '\n';
  for (const auto &p : mesh.vertices()) buf << p.x() << ' ' << p.y() << '\n';
  buf << "Q " << mesh.num_elements() << '\n';
  for (const auto &q : mesh.quads())
    buf << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
  os << buf.str();
}

QuadMesh read_mesh(std::istream &is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "quadmesh" || version != 1)
    throw InputError("mesh file: expected header 'quadmesh 1'");
  std::size_t nv = 0, nq = 0;
  if (!(is >> tag >> nv) || tag != "V") throw InputError("mesh file: expected 'V <count>'");
  std::vector<Point> verts(nv);
  for (auto &p : verts)
    if (!(is >> p.x() >> p.y())) throw InputError("mesh file: truncated vertex list");
  if (!(is >> tag >> nq) || tag != "Q") throw InputError("mesh file: expected 'Q <count>'");
  std::vector<std::array<int, 4>> quads(nq);
  for (auto &q : quads)
    if (!(is >> q[0] >> q[1] >> q[2] >> q[3])) throw InputError("mesh file: truncated quad list");
  return QuadMesh(std::move(verts), std::move(quads));
}

QuadMesh read_mesh_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

} // namespace psfem
