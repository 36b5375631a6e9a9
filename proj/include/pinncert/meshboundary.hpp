#pragma once

// Boundary operators on linear triangular meshes: Dirichlet point evaluation,
// Neumann directional derivatives of the piecewise-linear interpolant, the stacked
// boundary operator D_n with its right inverse, and operator-norm sweeps.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pinncert/bounds.hpp"
#include "pinncert/csv.hpp"
#include "pinncert/error.hpp"
#include "pinncert/linalg.hpp"

namespace pinncert::mesh {

enum class VertexTag { interior, dirichlet, neumann };

using Point = std::array<double, 2>;
using Triangle = std::array<std::size_t, 3>;

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double twice_area(const Point& a, const Point& b, const Point& c) {
  return a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]);
}

struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<VertexTag> tags;
  std::vector<Point> normals;  // read only at neumann vertices

  std::size_t num_vertices() const noexcept { return vertices.size(); }

  /// Edges used by exactly one triangle, as sorted vertex pairs.
  std::vector<std::pair<std::size_t, std::size_t>> boundary_edges() const {
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const auto& t : triangles)
      for (int e = 0; e < 3; ++e) {
        auto a = t[e], b = t[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        ++count[{a, b}];
      }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [edge, c] : count)
      if (c == 1) out.push_back(edge);
    return out;
  }

  void validate() const {
    const std::size_t n = vertices.size();
    if (tags.size() != n || normals.size() != n) throw Error(Errc::ShapeMismatch, "per-vertex arrays differ in length");
    for (const auto& t : triangles) {
      for (auto v : t)
        if (v >= n) throw Error(Errc::BadSize, "triangle references vertex " + std::to_string(v) + " out of range");
      if (!(twice_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0))
        throw Error(Errc::DegenerateTriangle, "triangle (" + std::to_string(t[0]) + ", " + std::to_string(t[1]) + ", " +
                                                  std::to_string(t[2]) + ") is not counter-clockwise with positive area");
    }
    std::vector<bool> on_boundary(n, false);
    for (const auto& [a, b] : boundary_edges()) on_boundary[a] = on_boundary[b] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (tags[v] != VertexTag::interior && !on_boundary[v])
        throw Error(Errc::AmbiguousTag, "vertex " + std::to_string(v) + " is tagged but not on a boundary edge");
      if (tags[v] == VertexTag::neumann && std::hypot(normals[v][0], normals[v][1]) == 0.0)
        throw Error(Errc::AmbiguousTag, "neumann vertex " + std::to_string(v) + " has a zero normal");
    }
  }
};

// ---------------------------------------------------------------------------
// Text format: "V T", V lines "x y tag [nx ny]", T lines "i j k" (0-based); '#' lines skipped.

inline TriMesh read_mesh(std::istream& in, const std::string& source = "<mesh>") {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) { return Error(Errc::Parse, source + ":" + std::to_string(lineno) + ": " + msg); };
  auto number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw fail("not a number: '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) throw fail("not a finite number: '" + tok + "'");
    return v;
  };
  auto tokens = [](const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
  };

  if (!next_line(line)) throw fail("missing 'V T' header");
  std::size_t nv = 0, nt = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> nv >> nt) || (hs >> extra)) throw fail("expected 'V T'");
  }
  TriMesh m;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_line(line)) throw fail("expected " + std::to_string(nv) + " vertex lines, got " + std::to_string(i));
    const auto tok = tokens(line);
    if (tok.size() < 3) throw fail("vertex line needs 'x y tag'");
    m.vertices.push_back({number(tok[0]), number(tok[1])});
    Point nrm{0.0, 0.0};
    if (tok[2] == "i" || tok[2] == "d") {
      if (tok.size() != 3) throw fail("normal given for a non-neumann vertex");
      m.tags.push_back(tok[2] == "i" ? VertexTag::interior : VertexTag::dirichlet);
    } else if (tok[2] == "n") {
      if (tok.size() != 5) throw fail("neumann vertex needs 'nx ny'");
      m.tags.push_back(VertexTag::neumann);
      nrm = {number(tok[3]), number(tok[4])};
      if (nrm[0] == 0.0 && nrm[1] == 0.0) throw fail("zero normal");
    } else {
      throw fail("unknown tag '" + tok[2] + "' (expected i, d or n)");
    }
    m.normals.push_back(nrm);
  }
  for (std::size_t i = 0; i < nt; ++i) {
    if (!next_line(line)) throw fail("expected " + std::to_string(nt) + " triangle lines, got " + std::to_string(i));
    const auto tok = tokens(line);
    if (tok.size() != 3) throw fail("triangle line needs three vertex indices");
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok[k], &used);
      } catch (const std::exception&) {
        throw fail("bad vertex index '" + tok[k] + "'");
      }
      if (used != tok[k].size() || tok[k][0] == '-') throw fail("bad vertex index '" + tok[k] + "'");
      if (v >= nv) throw fail("vertex index " + tok[k] + " out of range");
      t[k] = static_cast<std::size_t>(v);
    }
    m.triangles.push_back(t);
  }
  if (next_line(line)) throw fail("trailing data after triangles");
  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.message());
  }
  return m;
}

inline TriMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return read_mesh(in, path);
}

inline void write_mesh(std::ostream& out, const TriMesh& m) {
  out << m.vertices.size() << ' ' << m.triangles.size() << '\n';
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    out << csv::real(m.vertices[v][0]) << ' ' << csv::real(m.vertices[v][1]) << ' ';
    switch (m.tags[v]) {
      case VertexTag::interior: out << 'i'; break;
      case VertexTag::dirichlet: out << 'd'; break;
      case VertexTag::neumann: out << "n " << csv::real(m.normals[v][0]) << ' ' << csv::real(m.normals[v][1]); break;
    }
    out << '\n';
  }
  for (const auto& t : m.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

// ---------------------------------------------------------------------------
// Boundary index maps

struct NormalTriangle {
  std::size_t alpha = 0;  // the neumann vertex
  std::size_t beta = 0;   // next vertex counter-clockwise
  std::size_t zeta = 0;
};

struct BoundaryMaps {
  std::vector<std::size_t> iota_D;
  std::vector<std::size_t> iota_N;
  std::vector<NormalTriangle> gamma_N;
  std::vector<Point> unit_normals;  // per neumann index
};

/// Collects Dirichlet and Neumann vertices in index order and, for every Neumann
/// vertex, the incident triangle containing the point alpha + eps n.
inline BoundaryMaps classify_and_map(const TriMesh& m) {
  m.validate();
  std::vector<std::vector<std::size_t>> incident(m.num_vertices());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (auto v : m.triangles[t]) incident[v].push_back(t);

  BoundaryMaps maps;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (m.tags[v] == VertexTag::dirichlet) maps.iota_D.push_back(v);
    if (m.tags[v] != VertexTag::neumann) continue;
    maps.iota_N.push_back(v);
    const Point& a = m.vertices[v];
    const double len = std::hypot(m.normals[v][0], m.normals[v][1]);
    const Point n{m.normals[v][0] / len, m.normals[v][1] / len};
    maps.unit_normals.push_back(n);

    double edge = 0.0;
    std::size_t edges = 0;
    for (auto t : incident[v])
      for (auto w : m.triangles[t])
        if (w != v) {
          edge += std::hypot(m.vertices[w][0] - a[0], m.vertices[w][1] - a[1]);
          ++edges;
        }
    const double eps = 1e-6 * edge / static_cast<double>(std::max<std::size_t>(edges, 1));
    const Point p{a[0] + eps * n[0], a[1] + eps * n[1]};

    // barycentric containment; prefer the largest minimal coordinate, then the lowest triangle index
    // (an offset point on a shared edge is contained in both neighbours)
    std::optional<NormalTriangle> best;
    double best_margin = -1e-9;
    for (auto t : incident[v]) {
      const auto& tri = m.triangles[t];
      const std::size_t k = static_cast<std::size_t>(std::find(tri.begin(), tri.end(), v) - tri.begin());
      const NormalTriangle cand{v, tri[(k + 1) % 3], tri[(k + 2) % 3]};
      const Point &pa = m.vertices[cand.alpha], &pb = m.vertices[cand.beta], &pz = m.vertices[cand.zeta];
      const double full = twice_area(pa, pb, pz);
      const double la = twice_area(p, pb, pz) / full, lb = twice_area(pa, p, pz) / full, lz = twice_area(pa, pb, p) / full;
      const double margin = std::min({la, lb, lz});
      if (margin > best_margin + 1e-12) {
        best_margin = margin;
        best = cand;
      }
    }
    if (!best)
      throw Error(Errc::NoNormalTriangle,
                  "no triangle at vertex " + std::to_string(v) + " contains the normal offset point");
    maps.gamma_N.push_back(*best);
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Boundary operator matrices

inline DenseMatrix assemble_dirichlet(const TriMesh& m, const BoundaryMaps& maps) {
  DenseMatrix d(maps.iota_D.size(), m.num_vertices());
  for (std::size_t i = 0; i < maps.iota_D.size(); ++i) d(i, maps.iota_D[i]) = 1.0;
  return d;
}

/// Gradient coefficients of the linear interpolant on (alpha, beta, zeta):
/// grad u = sum_k (gx[k], gy[k]) u_k.
struct PlaneGradient {
  std::array<double, 3> gx{}, gy{};
};

inline PlaneGradient plane_gradient(const Point& a, const Point& b, const Point& z) {
  const double det = twice_area(a, b, z);
  if (!(std::abs(det) / 2.0 >= 1e-14)) throw Error(Errc::DegenerateTriangle, "triangle area below 1e-14");
  PlaneGradient g;
  g.gx = {(b[1] - z[1]) / det, (z[1] - a[1]) / det, (a[1] - b[1]) / det};
  g.gy = {(z[0] - b[0]) / det, (a[0] - z[0]) / det, (b[0] - a[0]) / det};
  return g;
}

/// Rows n . grad of the linear interpolant on gamma_N(i). With printed_formula the x-derivative
/// row is built from the coefficients as printed in the source derivation, whose middle entry
/// (-y_a + 2 y_b - y_z) / det is not the plane gradient; kept only for comparison.
inline DenseMatrix assemble_neumann(const TriMesh& m, const BoundaryMaps& maps, bool printed_formula = false) {
  DenseMatrix d(maps.iota_N.size(), m.num_vertices());
  for (std::size_t i = 0; i < maps.gamma_N.size(); ++i) {
    const auto& g = maps.gamma_N[i];
    const Point &a = m.vertices[g.alpha], &b = m.vertices[g.beta], &z = m.vertices[g.zeta];
    const std::array<std::size_t, 3> cols{g.alpha, g.beta, g.zeta};
    const PlaneGradient pg = plane_gradient(a, b, z);
    if (printed_formula) {
      const double det = twice_area(a, b, z);
      d(i, g.alpha) += (b[1] - z[1]) / det;
      d(i, g.beta) += (-a[1] + 2.0 * b[1] - z[1]) / det;
      d(i, g.zeta) += (a[1] - b[1]) / det;
      continue;
    }
    const Point& n = maps.unit_normals[i];
    for (int k = 0; k < 3; ++k) d(i, cols[k]) += n[0] * pg.gx[k] + n[1] * pg.gy[k];
  }
  return d;
}

struct StackedOperator {
  DenseMatrix D;   // boundary operator D_n
  DenseMatrix D0;  // right inverse D_{n,0}
};

inline StackedOperator stack_and_invert(const DenseMatrix& dirichlet, const DenseMatrix& neumann) {
  if (dirichlet.rows() && neumann.rows() && dirichlet.cols() != neumann.cols())
    throw Error(Errc::ShapeMismatch, "Dirichlet and Neumann blocks have different column counts");
  DenseMatrix d = vstack(dirichlet, neumann);
  DenseMatrix d0 = pinv_right(d);
  return {std::move(d), std::move(d0)};
}

/// Convenience: maps, both blocks, stack and right inverse for one mesh.
inline StackedOperator boundary_operator(const TriMesh& m, bool printed_formula = false) {
  const auto maps = classify_and_map(m);
  return stack_and_invert(assemble_dirichlet(m, maps), assemble_neumann(m, maps, printed_formula));
}

// ---------------------------------------------------------------------------
// Norm sweeps

struct NormSweepRow {
  std::size_t n = 0;  // state dimension
  double norm_D0 = 0.0;
  std::optional<double> norm_AD0;
};

struct NormSweep {
  std::vector<NormSweepRow> rows;
  // absent with fewer than two refinements
  std::optional<bounds::LimitEstimate> limit_D0;
  std::optional<bounds::LimitEstimate> limit_AD0;
};

/// ||D_{n,0}|| and, when A_n is given, ||A_n D_{n,0}|| along a refinement sequence.
/// An A_n of size (c n) x (c n) acts on c field components; D_{n,0} is then repeated block-diagonally.
/// Errors raised for mesh k are prefixed with names[k] when given.
inline NormSweep norm_sweep(const std::vector<TriMesh>& meshes, const std::vector<DenseMatrix>& A, double mu_e,
                            std::size_t tail, double tol, bool printed_formula = false,
                            const std::vector<std::string>& names = {}) {
  if (!A.empty() && A.size() != meshes.size())
    throw Error(Errc::ShapeMismatch, "need one A_n per mesh (" + std::to_string(meshes.size()) + "), got " +
                                         std::to_string(A.size()));
  std::vector<DenseMatrix> d0s, ad0s;
  NormSweep out;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    try {
      DenseMatrix d0 = boundary_operator(meshes[k], printed_formula).D0;
      const std::size_t nv = meshes[k].num_vertices();
      if (!A.empty()) {
        const auto& a = A[k];
        if (a.rows() != a.cols() || a.rows() == 0 || a.rows() % nv != 0)
          throw Error(Errc::ShapeMismatch, "A_n is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                               ", expected a square multiple of " + std::to_string(nv));
        d0 = block_repeat(d0, a.rows() / nv);
        ad0s.push_back(a * d0);
      }
      out.rows.push_back({d0.rows(), 0.0, std::nullopt});
      d0s.push_back(std::move(d0));
    } catch (const Error& e) {
      if (k >= names.size()) throw;
      throw Error(e.code(), names[k] + ": " + e.message());
    }
  }
  // U_n grows with the boundary, so the sequences are compared as scalars
  auto norm = [mu_e](const DenseMatrix& x) { return x.empty() ? 0.0 : mu_e * spectral_norm(x); };
  std::vector<double> nd0, nad0;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    nd0.push_back(norm(d0s[k]));
    out.rows[k].norm_D0 = nd0.back();
    if (!A.empty()) {
      nad0.push_back(norm(ad0s[k]));
      out.rows[k].norm_AD0 = nad0.back();
    }
  }
  if (meshes.size() >= 2) {
    tail = std::clamp<std::size_t>(tail, 2, meshes.size());
    out.limit_D0 = bounds::scalar_limit(nd0, tail, tol);
    if (!A.empty()) out.limit_AD0 = bounds::scalar_limit(nad0, tail, tol);
  }
  return out;
}

/// CSV "n,norm_D0,norm_AD0" with '#' trailer lines for the limits and Cauchy defects.
/// The reported bound is the limit plus its defect in strict mode.
inline void write_norm_sweep_csv(std::ostream& out, const NormSweep& s, bool strict = false) {
  csv::write_header(out, "n,norm_D0,norm_AD0");
  for (const auto& r : s.rows) csv::write_row(out, {std::to_string(r.n), csv::real(r.norm_D0), csv::real(r.norm_AD0)});
  auto trailer = [&out, strict](const char* name, const std::optional<bounds::LimitEstimate>& l) {
    if (!l) return;
    out << "# limit " << name << ' ' << csv::real(l->value) << " defect " << csv::real(l->cauchy_defect) << " bound "
        << csv::real(l->bound(strict)) << " converged " << (l->converged ? "true" : "false") << '\n';
  };
  trailer("norm_D0", s.limit_D0);
  trailer("norm_AD0", s.limit_AD0);
}

}  // namespace pinncert::mesh
