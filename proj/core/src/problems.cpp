#include "emoc/problems.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "emoc/errors.hpp"

namespace emoc {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Angle around the z-axis measured from the reentrant half-plane
// {x = 0, y < 0}, increasing into the domain: the wedge occupied by the
// L-shape corresponds to theta in (0, 3 pi / 2).
double wedge_angle(double x, double y) {
  const double a = std::atan2(y, x); // (-pi, pi]
  // Shift branch cut onto the positive x-axis: angle in [pi/2, 2 pi).
  const double full = (y > 0.0 || (y == 0.0 && x < 0.0)) ? a : a + 2.0 * kPi;
  return full - 0.5 * kPi;
}

// grad(r^(2/3) sin(2 theta / 3)) in the plane, zero z-component.
Vec3 singular_gradient(const Vec3& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0)
    throw GeometryError("singular_gradient: evaluation on the axis r = 0");
  const double r = std::sqrt(r2);
  const double theta = wedge_angle(x[0], x[1]);
  const double s = std::pow(r, -1.0 / 3.0) * (2.0 / 3.0);
  const double dr = s * std::sin(2.0 * theta / 3.0);
  const double dt = s * std::cos(2.0 * theta / 3.0);
  const double c = x[0] / r, sn = x[1] / r;
  return Vec3(dr * c - dt * sn, dr * sn + dt * c, 0.0);
}

} // namespace

std::vector<int> quad_degrees(const ProblemSpec& problem, const TetMesh& mesh) {
  std::vector<int> deg(mesh.n_tets(), problem.quad_degree);
  if (problem.needs_high_degree)
    for (int t = 0; t < mesh.n_tets(); ++t)
      if (problem.needs_high_degree(mesh, t))
        deg[t] = problem.quad_degree_singular;
  return deg;
}

TetMesh build_problem_mesh(const ProblemSpec& problem, int subdivisions) {
  if (subdivisions <= 0)
    subdivisions = problem.default_subdivisions;
  TetMesh mesh = problem.build_mesh(subdivisions);
  if (problem.classify)
    mesh = relabel(mesh, problem.classify);
  return mesh;
}

std::function<Vec3(const Vec3&)> bind_geometric(const ProblemSpec& problem,
                                                const BranchField& field) {
  auto classify = problem.classify;
  return [classify, field](const Vec3& x) {
    return field(x, classify ? classify(x) : 1);
  };
}

namespace {

double ball_fraction_rec(const Vec3& c, double R,
                         const std::array<Vec3, 4>& t, int depth) {
  int inside = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& v : t) {
    const double d = (v - c).norm();
    if (d <= R)
      ++inside;
    dmin = std::min(dmin, d);
  }
  if (inside == 4)
    return 1.0; // convexity: the hull of the vertices lies in the ball
  double h = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      h = std::max(h, (t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)]).norm());
  if (dmin - h >= R)
    return 0.0; // every point is at least dmin - h from the center
  if (depth == 0) {
    const Vec3 ctr = 0.25 * (t[0] + t[1] + t[2] + t[3]);
    return (ctr - c).norm() < R ? 1.0 : 0.0;
  }
  const Vec3 m01 = 0.5 * (t[0] + t[1]), m02 = 0.5 * (t[0] + t[2]),
             m03 = 0.5 * (t[0] + t[3]), m12 = 0.5 * (t[1] + t[2]),
             m13 = 0.5 * (t[1] + t[3]), m23 = 0.5 * (t[2] + t[3]);
  const std::array<std::array<Vec3, 4>, 8> children = {{
      {t[0], m01, m02, m03},
      {m01, t[1], m12, m13},
      {m02, m12, t[2], m23},
      {m03, m13, m23, t[3]},
      {m01, m02, m03, m13},
      {m01, m02, m12, m13},
      {m02, m03, m13, m23},
      {m02, m12, m13, m23},
  }};
  double acc = 0.0;
  for (const auto& child : children)
    acc += ball_fraction_rec(c, R, child, depth - 1);
  return acc / 8.0;
}

} // namespace

double ball_volume_fraction(const BallInterface& ball,
                            const std::array<Vec3, 4>& corners, int depth) {
  return ball_fraction_rec(ball.center, ball.radius, corners, depth);
}

ProblemSpec benchmark_lshape() {
  ProblemSpec p;
  p.name = "lshape";
  p.build_mesh = [](int n) { return build_lshape_mesh(n); };
  p.default_subdivisions = 2;
  p.mu_inv_by_label = {1.0};
  p.sigma_by_label = {1.0};
  p.classify = [](const Vec3&) { return 1; };

  p.f = [](const Vec3& x, int) { return singular_gradient(x); };
  p.div_f = [](const Vec3&, int) { return 0.0; };
  p.u_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };
  p.y_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };
  p.curl_y_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };
  p.alpha = 0.1;

  // The exact field is singular only on the axis x = y = 0, which lies on
  // the boundary; edge quadrature nodes never coincide with it, but guard
  // against roundoff placing a node exactly there.
  p.lifting_g = [](const Vec3& x) {
    if (x[0] * x[0] + x[1] * x[1] <= 1e-26)
      return Vec3::Zero().eval();
    return singular_gradient(x);
  };

  p.has_exact = true;
  p.y_star = [](const Vec3& x) { return singular_gradient(x); };
  p.curl_y_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.p_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.curl_p_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.u_star = [](const Vec3&, int) { return Vec3::Zero().eval(); };

  p.needs_high_degree = [](const TetMesh& mesh, int t) {
    const auto c = mesh.tet_corners(t);
    for (const auto& v : c)
      if (v[0] * v[0] + v[1] * v[1] <= 1e-24)
        return true;
    return false;
  };
  p.quad_degree = 4;
  p.quad_degree_singular = 5;
  return p;
}

ProblemSpec benchmark_inclusion() {
  ProblemSpec p;
  p.name = "inclusion";
  p.build_mesh = [](int n) { return build_cube_mesh(n); };
  p.default_subdivisions = 4;
  p.mu_inv_by_label = {1.0, 0.1};
  p.sigma_by_label = {1.0, 10.0};

  const Vec3 center = Vec3::Zero();
  const double radius = 0.6;
  p.classify = [center, radius](const Vec3& x) {
    return (x - center).norm() < radius ? 2 : 1;
  };

  auto grad_phi = [](const Vec3& x) {
    const double sx = std::sin(2.0 * kPi * x[0]), cx = std::cos(2.0 * kPi * x[0]);
    const double sy = std::sin(2.0 * kPi * x[1]), cy = std::cos(2.0 * kPi * x[1]);
    const double sz = std::sin(2.0 * kPi * x[2]), cz = std::cos(2.0 * kPi * x[2]);
    return Vec3(cx * sy * sz, sx * cy * sz, sx * sy * cz);
  };
  auto phi = [](const Vec3& x) {
    return std::sin(2.0 * kPi * x[0]) * std::sin(2.0 * kPi * x[1]) *
           std::sin(2.0 * kPi * x[2]) / (2.0 * kPi);
  };
  const Vec3 jump(10.0, 0.0, 0.0);

  p.u_d = [jump](const Vec3&, int label) {
    return label == 2 ? jump : Vec3::Zero().eval();
  };
  p.y_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };
  p.curl_y_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };

  std::vector<double> sigma = p.sigma_by_label;
  p.f = [grad_phi, sigma, jump](const Vec3& x, int label) {
    Vec3 v = sigma[static_cast<size_t>(label - 1)] * grad_phi(x);
    if (label == 2)
      v -= jump;
    return v;
  };
  p.div_f = [phi, sigma](const Vec3& x, int label) {
    return sigma[static_cast<size_t>(label - 1)] * (-12.0 * kPi * kPi) * phi(x);
  };
  p.alpha = 0.1;

  p.has_exact = true;
  p.y_star = grad_phi;
  p.curl_y_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.p_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.curl_p_star = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.u_star = [jump](const Vec3&, int label) {
    return label == 2 ? jump : Vec3::Zero().eval();
  };

  p.interface_ball = BallInterface{center, radius};
  p.quad_degree = 4;
  p.quad_degree_singular = 5;
  return p;
}

} // namespace emoc
