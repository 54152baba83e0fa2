#include "reeb/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "reeb/errors.hpp"
#include "reeb/parallel.hpp"
#include "reeb/words.hpp"

namespace reeb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 poly_at(const std::vector<Vec2>& pts, double s) {
  const int n = int(pts.size()) - 1;
  const double u = s * n;
  const int i = std::clamp(int(std::floor(u)), 0, n - 1);
  const double f = u - i;  // may leave [0,1] at the ends: linear extrapolation
  return pts[i] + f * (pts[i + 1] - pts[i]);
}

Vec2 poly_deriv(const std::vector<Vec2>& pts, double s) {
  const int n = int(pts.size()) - 1;
  const int i = std::clamp(int(std::floor(s * n)), 0, n - 1);
  return (pts[i + 1] - pts[i]) * double(n);
}

std::vector<Vec2> sample_curve(const std::function<Vec2(double)>& c, int n) {
  std::vector<Vec2> out;
  for (int i = 0; i <= n; ++i) out.push_back(c(double(i) / n));
  return out;
}

// Image of a box under a map that swaps the roles of x and z: the image
// patch runs s' along the image of z and t' along the image of x.
Rect swapped_image(const Rect& dom, const std::function<Vec2(const Vec2&)>& f, FiberKind fiber) {
  double x0, x1, z0, z1;
  dom.bounds(x0, x1, z0, z1);
  const int n = 32;
  Rect r;
  r.bottom = sample_curve([&](double s) { return f(Vec2(x0, z0 + s * (z1 - z0))); }, n);
  r.top = sample_curve([&](double s) { return f(Vec2(x1, z0 + s * (z1 - z0))); }, n);
  r.left = sample_curve([&](double t) { return f(Vec2(x0 + t * (x1 - x0), z0)); }, n);
  r.right = sample_curve([&](double t) { return f(Vec2(x0 + t * (x1 - x0), z1)); }, n);
  r.fiber = fiber;
  return r;
}

// Cell-centre samples of a rect.
template <class Fn>
void for_samples(const Rect& r, int n, Fn&& fn) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = (i + 0.5) / n, t = (j + 0.5) / n;
      fn(r.at(s, t), s, t);
    }
}

double r_margin(const Vec2& p, double lambda, double z_max) {
  double best = -kInf;
  for (int k = -1; k <= 4; ++k) {
    const double lo = k * kPi / 2 + lambda, hi = (k + 1) * kPi / 2 - lambda;
    best = std::max(best, std::min(p.x() - lo, hi - p.x()));
  }
  return std::min(best, z_max - std::abs(p.y()));
}

double q_margin(const Vec2& p, double lambda, double z_max) {
  double best = -kInf;
  for (int k = 0; k <= 2; ++k) best = std::max(best, lambda / 2 - std::abs(p.x() - k * kPi));
  return std::min(best, z_max - std::abs(p.y()));
}

// Signed slack of membership in X (x in [0, pi]); Y is X shifted by pi.
double x_margin(const Vec2& p, double z_max) {
  const double x = p.x(), z = p.y();
  const double inside_x = std::min(x, kPi - x);
  double m;
  if (x <= kPi / 4)
    m = std::min(-z, z + z_max);
  else if (x <= 3 * kPi / 4)
    m = z_max - std::abs(z);
  else
    m = std::min(z, z_max - z);
  return std::min(inside_x, m);
}

double fibre_reversal_margin(const Branch& b, const Vec2& p, double s, double t) {
  const Vec2 e = b.dom.fiber_tangent(s, t);
  const Vec2 w = b.differential(p) * e;
  const auto loc = b.im.locate(b.eval(p));
  if (!loc) return -1.0;
  const Vec2 f = b.im.fiber_tangent((*loc)(0), (*loc)(1));
  const double n = w.norm();
  if (n == 0.0) return -1.0;
  return (std::abs(cross(w, f)) - std::abs(w.dot(f))) / n;
}

double param_margin(const Rect& r, const Vec2& q) {
  const auto loc = r.locate(q);
  if (!loc) return -1.0;
  const double s = (*loc)(0), t = (*loc)(1);
  return std::min({s, 1 - s, t, 1 - t});
}

void drift_conditions(const SectionMapModel& m, double lambda, int n, const std::string& tag,
                      HyperbolicCertificate& cert) {
  double dom_q = kInf, x_conf = kInf, mono = kInf;
  for (const auto& b : m.branches) {
    if (b.kind != BranchKind::drift) continue;
    const int k = b.strip;
    const int sign = (k % 2 != 0) ? -1 : 1;  // z decreases on odd strips
    for_samples(b.dom, n, [&](const Vec2& p, double, double) {
      const Vec2 q = b.eval(p);
      dom_q = std::min({dom_q, q_margin(p, lambda, m.z_max), q_margin(q, lambda, m.z_max)});
      x_conf = std::min(x_conf, lambda / 2 - std::abs(q.x() - k * kPi));
      if (q_lambda_strip(p.x(), lambda) != k) x_conf = std::min(x_conf, -1.0);
      mono = std::min(mono, sign * (q.y() - p.y()));
    });
  }
  cert.add("(1) " + tag + "0 domain and image in Q_lambda", dom_q);
  cert.add("(2) " + tag + "0 x-confinement", x_conf);
  cert.add("(2) " + tag + "0 z-drift by strip parity", mono);
}

double g_fn(double u, double kappa) { return u + kappa * std::sin(kPi * u) / kPi; }
double g_der(double u, double kappa) { return 1 + kappa * std::cos(kPi * u); }
double g_inv(double v, double kappa) {
  double u = v;
  for (int it = 0; it < 60; ++it) {
    const double du = (g_fn(u, kappa) - v) / g_der(u, kappa);
    u -= du;
    if (std::abs(du) < 1e-16) break;
  }
  return u;
}

Vec2 newton_inverse(const Branch& b, const Vec2& q, Vec2 p) {
  for (int it = 0; it < 60; ++it) {
    const Vec2 r = b.eval(p) - q;
    if (r.norm() < 1e-15) break;
    p -= b.differential(p).fullPivLu().solve(r);
  }
  return p;
}

Vec2 apply_inverse(const Branch& b, const Vec2& q) {
  if (b.inverse) return b.inverse(q);
  double x0, x1, z0, z1;
  b.dom.bounds(x0, x1, z0, z1);
  return newton_inverse(b, q, Vec2((x0 + x1) / 2, (z0 + z1) / 2));
}

Vec2 rect_center(const Rect& r) { return r.at(0.5, 0.5); }

}  // namespace

// ---------------------------------------------------------------- Rect

Rect Rect::box(double x0, double x1, double z0, double z1, FiberKind fiber) {
  Rect r;
  r.bottom = {Vec2(x0, z0), Vec2(x1, z0)};
  r.top = {Vec2(x0, z1), Vec2(x1, z1)};
  r.left = {Vec2(x0, z0), Vec2(x0, z1)};
  r.right = {Vec2(x1, z0), Vec2(x1, z1)};
  r.fiber = fiber;
  return r;
}

void Rect::validate() const {
  for (const auto* c : {&bottom, &top, &left, &right})
    if (c->size() < 2) throw PreconditionError("rectangle boundary polyline needs at least 2 points");
  auto near = [](const Vec2& a, const Vec2& b) { return (a - b).norm() < 1e-12; };
  if (!near(bottom.front(), left.front()) || !near(bottom.back(), right.front()) ||
      !near(top.front(), left.back()) || !near(top.back(), right.back()))
    throw PreconditionError("rectangle corners do not match");
  if (std::abs(jacobian(0.5, 0.5).determinant()) < 1e-300) throw PreconditionError("degenerate rectangle");
}

bool Rect::is_box() const {
  return bottom.size() == 2 && top.size() == 2 && left.size() == 2 && right.size() == 2 &&
         bottom[0].y() == bottom[1].y() && top[0].y() == top[1].y() && left[0].x() == left[1].x() &&
         right[0].x() == right[1].x() && bottom[0] == left[0] && top[1] == right[1];
}

Vec2 Rect::at(double s, double t) const {
  const Vec2 P00 = bottom.front(), P10 = bottom.back(), P01 = top.front(), P11 = top.back();
  return (1 - t) * poly_at(bottom, s) + t * poly_at(top, s) + (1 - s) * poly_at(left, t) + s * poly_at(right, t) -
         ((1 - s) * (1 - t) * P00 + s * (1 - t) * P10 + (1 - s) * t * P01 + s * t * P11);
}

Mat2d Rect::jacobian(double s, double t) const {
  const Vec2 P00 = bottom.front(), P10 = bottom.back(), P01 = top.front(), P11 = top.back();
  const Vec2 ds = (1 - t) * poly_deriv(bottom, s) + t * poly_deriv(top, s) - poly_at(left, t) + poly_at(right, t) -
                  (-(1 - t) * P00 + (1 - t) * P10 - t * P01 + t * P11);
  const Vec2 dt = -poly_at(bottom, s) + poly_at(top, s) + (1 - s) * poly_deriv(left, t) + s * poly_deriv(right, t) -
                  (-(1 - s) * P00 - s * P10 + (1 - s) * P01 + s * P11);
  Mat2d J;
  J.col(0) = ds;
  J.col(1) = dt;
  return J;
}

std::optional<Vec2> Rect::locate(const Vec2& p) const {
  if (is_box()) {
    const double x0 = bottom[0].x(), x1 = bottom[1].x(), z0 = bottom[0].y(), z1 = top[0].y();
    return Vec2((p.x() - x0) / (x1 - x0), (p.y() - z0) / (z1 - z0));
  }
  Vec2 st(0.5, 0.5);
  for (int it = 0; it < 60; ++it) {
    const Vec2 r = at(st(0), st(1)) - p;
    const Mat2d J = jacobian(st(0), st(1));
    const Vec2 d = J.fullPivLu().solve(r);
    st -= d;
    if (!std::isfinite(st(0)) || !std::isfinite(st(1))) return std::nullopt;
    if (d.norm() < 1e-14) return st;
  }
  if ((at(st(0), st(1)) - p).norm() < 1e-10) return st;
  return std::nullopt;
}

bool Rect::contains(const Vec2& p, double tol) const {
  const auto st = locate(p);
  if (!st) return false;
  const double e = 1e-12 + tol;
  return (*st)(0) >= -e && (*st)(0) <= 1 + e && (*st)(1) >= -e && (*st)(1) <= 1 + e;
}

Vec2 Rect::fiber_tangent(double s, double t) const {
  const Mat2d J = jacobian(s, t);
  const Vec2 v = fiber == FiberKind::vertical ? Vec2(J.col(1)) : Vec2(J.col(0));
  return v.normalized();
}

void Rect::bounds(double& x0, double& x1, double& z0, double& z1) const {
  x0 = z0 = kInf;
  x1 = z1 = -kInf;
  for (const auto* c : {&bottom, &top, &left, &right})
    for (const auto& p : *c) {
      x0 = std::min(x0, p.x());
      x1 = std::max(x1, p.x());
      z0 = std::min(z0, p.y());
      z1 = std::max(z1, p.y());
    }
}

// ---------------------------------------------------------------- cones

ConeSpec ConeSpec::vertical(double w) { return {kPi / 2, w}; }

Vec2 ConeSpec::axis() const { return Vec2(std::cos(angle), std::sin(angle)); }

Vec2 ConeSpec::edge(int side) const {
  const Vec2 u = axis(), v(-u.y(), u.x());
  return u + side * width * v;
}

double ConeSpec::slack(const Vec2& w) const {
  const double n = w.norm();
  if (n == 0.0) return -kInf;
  const Vec2 u = axis(), v(-u.y(), u.x());
  return (width * std::abs(w.dot(u)) - std::abs(w.dot(v))) / n;
}

double cone_image_margin(const Mat2d& L, const ConeSpec& c, const ConeSpec& target) {
  const Vec2 a = L * c.edge(1), b = L * c.edge(-1);
  const Vec2 u = target.axis();
  // An image sector crossing the orthogonal line cannot sit in the double cone.
  if (a.dot(u) * b.dot(u) <= 0.0) return -1.0;
  return std::min(target.slack(a), target.slack(b));
}

double cone_min_stretch(const Mat2d& L, const ConeSpec& c, int samples) {
  const Vec2 u = c.axis(), v(-u.y(), u.x());
  const double th = std::atan(c.width);
  double best = kInf;
  for (int i = 0; i < samples; ++i) {
    const double a = -th + 2 * th * i / (samples - 1);
    const Vec2 w = std::cos(a) * u + std::sin(a) * v;
    best = std::min(best, (L * w).norm());
  }
  return best;
}

// ---------------------------------------------------------------- models

Mat2d Branch::differential(const Vec2& p) const {
  if (diff) return diff(p);
  const double h = 1e-6;
  Mat2d J;
  for (int c = 0; c < 2; ++c) {
    Vec2 e = Vec2::Zero();
    e(c) = h;
    J.col(c) = (eval(p + e) - eval(p - e)) / (2 * h);
  }
  return J;
}

int SectionMapModel::branch_at(const Vec2& p) const {
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (branches[i].dom.contains(p)) return int(i);
  return -1;
}

std::vector<int> SectionMapModel::rectangle_branches() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (branches[i].kind == BranchKind::rectangle) out.push_back(int(i));
  return out;
}

void SectionMapModel::validate(int n) const {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& b = branches[i];
    if (!b.eval) throw PreconditionError("branch " + b.label + " has no evaluator");
    b.dom.validate();
    b.im.validate();
    std::vector<Vec2> imgs;
    for_samples(b.dom, n, [&](const Vec2& p, double, double) {
      for (std::size_t j = 0; j < branches.size(); ++j)
        if (j != i && branches[j].dom.contains(p))
          throw PreconditionError("domains of " + b.label + " and " + branches[j].label + " overlap");
      imgs.push_back(b.eval(p));
    });
    for (std::size_t a = 0; a < imgs.size(); ++a)
      for (std::size_t c = a + 1; c < imgs.size(); ++c)
        if ((imgs[a] - imgs[c]).norm() < 1e-14) throw PreconditionError("branch " + b.label + " is not injective");
  }
}

int r_lambda_component(double x, double lambda) {
  for (int k = -1; k <= 4; ++k)
    if (x >= k * kPi / 2 + lambda && x <= (k + 1) * kPi / 2 - lambda) return k;
  return -99;
}

int q_lambda_strip(double x, double lambda) {
  for (int k = 0; k <= 2; ++k)
    if (std::abs(x - k * kPi) <= lambda / 2) return k;
  return -99;
}

bool in_r_lambda(const Vec2& p, double lambda, double z_max) {
  return r_lambda_component(p.x(), lambda) != -99 && std::abs(p.y()) <= z_max;
}

bool in_q_lambda(const Vec2& p, double lambda, double z_max) {
  return q_lambda_strip(p.x(), lambda) != -99 && std::abs(p.y()) <= z_max;
}

bool in_x_region(const Vec2& p, double z_max) {
  const double x = p.x(), z = p.y();
  if (x < 0 || x > kPi || std::abs(z) > z_max) return false;
  if (x < kPi / 4) return z < 0;
  if (x <= 3 * kPi / 4) return true;
  return z > 0;
}

bool in_y_region(const Vec2& p, double z_max) { return in_x_region(Vec2(p.x() - kPi, p.y()), z_max); }

// ---------------------------------------------------------------- certificates

bool HyperbolicCertificate::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.pass; });
}

const Condition* HyperbolicCertificate::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

void HyperbolicCertificate::add(const std::string& name, double margin) {
  for (auto& c : conditions)
    if (c.name == name) {
      c.margin = std::min(c.margin, margin);
      c.pass = c.margin > 0.0;
      return;
    }
  conditions.push_back({name, margin > 0.0, margin});
}

nlohmann::json certificate_json(const HyperbolicCertificate& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : c.conditions) {
    nlohmann::json e = {{"pass", k.pass}};
    if (std::isfinite(k.margin))
      e["margin"] = k.margin;
    else
      e["margin"] = nullptr;  // vacuous: no samples
    j[k.name] = e;
  }
  j["passed"] = c.passed();
  return j;
}

HyperbolicCertificate verify_k_hyperbolic(const SectionMapModel& psi, double lambda, int n) {
  if (!(lambda > 0 && lambda < kPi / 8)) throw PreconditionError("lambda must lie in (0, pi/8)");
  HyperbolicCertificate cert;
  drift_conditions(psi, lambda, n, "psi", cert);
  double in_r = kInf, fib = kInf, rev = kInf, maps = kInf;
  for (const auto& b : psi.branches) {
    if (b.kind != BranchKind::rectangle) continue;
    try {
      fib = std::min(fib, (b.dom.fiber == FiberKind::horizontal && b.im.fiber == FiberKind::horizontal) ? 1.0 : -1.0);
      for_samples(b.dom, n, [&](const Vec2& p, double s, double t) {
        const Vec2 q = b.eval(p);
        in_r = std::min({in_r, r_margin(p, lambda, psi.z_max), r_margin(q, lambda, psi.z_max)});
        maps = std::min(maps, param_margin(b.im, q));
        rev = std::min(rev, fibre_reversal_margin(b, p, s, t));
      });
      for_samples(b.im, n, [&](const Vec2& q, double, double) { in_r = std::min(in_r, r_margin(q, lambda, psi.z_max)); });
    } catch (const Error& e) {
      throw Error("branch " + b.label + ": " + e.what());
    }
  }
  cert.add("(3) rectangles in R_lambda", in_r);
  cert.add("(3) horizontal fibres", fib);
  cert.add("(3) branch maps dom into im", maps);
  cert.add("(3) fibre reversal", rev);
  return cert;
}

HyperbolicCertificate verify_dominated(const SectionMapModel& psi, double mu, double nu, double tau, int n) {
  if (!(mu > 0 && nu > 0 && tau > 0)) throw PreconditionError("mu, nu and tau must be positive");
  HyperbolicCertificate cert;
  double fib = kInf, fwd = kInf, bwd = kInf, time = kInf;
  for (const auto& b : psi.branches) {
    if (b.kind != BranchKind::rectangle) continue;
    if (!b.d_dom_angle || !b.d_im_angle) throw PreconditionError("branch " + b.label + " lacks its D segments");
    if (!b.return_time) throw PreconditionError("branch " + b.label + " lacks a return time");
    const ConeSpec d1{*b.d_dom_angle, nu}, d2{*b.d_im_angle, nu};
    const ConeSpec d1mu{*b.d_dom_angle, mu}, d2mu{*b.d_im_angle, mu};
    const ConeSpec h = ConeSpec::horizontal(nu);
    for_samples(b.dom, n, [&](const Vec2& p, double s, double t) {
      fib = std::min(fib, d1.slack(b.dom.jacobian(s, t).col(1)));
      const Mat2d L = b.differential(p);
      fwd = std::min(fwd, cone_image_margin(L, h, d2mu));
      bwd = std::min(bwd, cone_image_margin(L.inverse(), h, d1mu));
      time = std::min(time, tau - std::abs(b.return_time(p) - b.nominal_time));
    });
    for_samples(b.im, n, [&](const Vec2&, double s, double t) { fib = std::min(fib, d2.slack(b.im.jacobian(s, t).col(1))); });
  }
  cert.add("(1) vertical fibres in C(D,nu)", fib);
  cert.add("(2) psi_* C(H,nu) in C(D2,mu)", fwd);
  cert.add("(2) psi^-1_* C(H,nu) in C(D1,mu)", bwd);
  cert.add("(3) return time within tau of T(a_j)", time);
  return cert;
}

HyperbolicCertificate verify_hyperbolic_bypass(const SectionMapModel& phi, double lambda, int n) {
  if (!(lambda > 0 && lambda < kPi / 8)) throw PreconditionError("lambda must lie in (0, pi/8)");
  HyperbolicCertificate cert;
  drift_conditions(phi, lambda, n, "phi", cert);
  double in_x = kInf, in_y = kInf, in_r = kInf, fib = kInf, rev = kInf, wide = kInf, maps = kInf;
  for (const auto& b : phi.branches) {
    if (b.kind != BranchKind::rectangle) continue;
    fib = std::min(fib, (b.dom.fiber == FiberKind::vertical && b.im.fiber == FiberKind::vertical) ? 1.0 : -1.0);
    for (const Rect* r : {&b.dom, &b.im}) {
      double x0, x1, z0, z1;
      r->bounds(x0, x1, z0, z1);
      const int k = r_lambda_component(0.5 * (x0 + x1), lambda);
      if (k == -99) {
        wide = std::min(wide, -1.0);
        continue;
      }
      const double lo = k * kPi / 2 + lambda, hi = (k + 1) * kPi / 2 - lambda;
      wide = std::min(wide, 1e-9 - std::max(std::abs(x0 - lo), std::abs(x1 - hi)));
    }
    for_samples(b.dom, n, [&](const Vec2& p, double s, double t) {
      const Vec2 q = b.eval(p);
      in_x = std::min(in_x, x_margin(p, phi.z_max));
      in_y = std::min(in_y, x_margin(Vec2(q.x() - kPi, q.y()), phi.z_max));
      in_r = std::min({in_r, r_margin(p, lambda, phi.z_max), r_margin(q, lambda, phi.z_max)});
      maps = std::min(maps, param_margin(b.im, q));
      rev = std::min(rev, fibre_reversal_margin(b, p, s, t));
    });
  }
  cert.add("phi1 domain in X", in_x);
  cert.add("phi1 image in Y", in_y);
  cert.add("(3) rectangles in R_lambda", in_r);
  cert.add("(3) vertical fibres", fib);
  cert.add("(3) as wide as R_lambda", wide);
  cert.add("(3) branch maps dom into im", maps);
  cert.add("(3) fibre reversal", rev);
  return cert;
}

HyperbolicCertificate verify_bypass_dominated(const SectionMapModel& phi, double nu, double tau, double A, double eta,
                                              int n) {
  if (!(nu > 0 && tau > 0 && A > 0 && eta > 0)) throw PreconditionError("nu, tau, A and eta must be positive");
  HyperbolicCertificate cert;
  const ConeSpec v = ConeSpec::vertical(A), h = ConeSpec::horizontal(nu);
  double fwd = kInf, bwd = kInf, sf = kInf, sb = kInf, time = kInf;
  for (const auto& b : phi.branches) {
    if (b.kind != BranchKind::rectangle) continue;
    if (!b.return_time) throw PreconditionError("branch " + b.label + " lacks a return time");
    for_samples(b.dom, n, [&](const Vec2& p, double, double) {
      const Mat2d L = b.differential(p), Li = L.inverse();
      fwd = std::min(fwd, cone_image_margin(L, v, h));
      bwd = std::min(bwd, cone_image_margin(Li, v, h));
      sf = std::min(sf, cone_min_stretch(L, v) * eta - 1.0);
      sb = std::min(sb, cone_min_stretch(Li, v) * eta - 1.0);
      time = std::min(time, 8 * tau - b.return_time(p));
    });
  }
  cert.add("(1) phi_* C(V,A) in C(H,nu)", fwd);
  cert.add("(1) phi^-1_* C(V,A) in C(H,nu)", bwd);
  cert.add("(2) stretch of dphi on C(V,A) > 1/eta", sf);
  cert.add("(3) stretch of dphi^-1 on C(V,A) > 1/eta", sb);
  cert.add("(4) return time <= 8 tau", time);
  return cert;
}

// ---------------------------------------------------------------- synthetic model

namespace {

constexpr double kKappa = 0.15;   // nonlinearity of the stretched coordinate
constexpr double kChi = 0.1;      // coupling of z into the contracted coordinate
constexpr double kBeta = 0.02;    // coupling of x into the contracted coordinate of psi

double component_left(int k, double lambda) { return k * kPi / 2 + lambda; }

Branch drift_branch(const std::string& tag, int k, double lambda, double z_max, double delta, double time) {
  const int sign = (k % 2 != 0) ? -1 : 1;
  const double c = k * kPi, hw = lambda / 2;
  Branch b;
  b.label = tag + "0[" + std::to_string(k) + "]";
  b.kind = BranchKind::drift;
  b.strip = k;
  const double dz0 = sign > 0 ? -z_max : -z_max + delta, dz1 = sign > 0 ? z_max - delta : z_max;
  b.dom = Rect::box(c - hw, c + hw, dz0, dz1, FiberKind::horizontal);
  b.im = Rect::box(c - 0.9 * hw, c + 0.9 * hw, dz0 + sign * delta, dz1 + sign * delta, FiberKind::horizontal);
  b.eval = [=](const Vec2& p) { return Vec2(c + 0.9 * (p.x() - c), p.y() + sign * delta); };
  b.diff = [](const Vec2&) { return Mat2d{{0.9, 0.0}, {0.0, 1.0}}; };
  b.inverse = [=](const Vec2& q) { return Vec2(c + (q.x() - c) / 0.9, q.y() - sign * delta); };
  b.return_time = [=](const Vec2&) { return time; };
  return b;
}

}  // namespace

void SyntheticParams::validate() const {
  if (!(lambda > 0 && lambda < kPi / 8)) throw ParameterError("lambda must lie in (0, pi/8)");
  if (!(nu > 0 && tau > 0 && A > 0 && eta > 0 && z_max > 0 && mu > 0))
    throw ParameterError("nu, tau, A, eta, z_max and mu must be positive");
  if (eta >= 1) throw ParameterError("eta must be < 1 so that the expansion 1/eta exceeds 1");
  if (A <= nu) throw ParameterError("A must exceed nu: C(V,A) and C(H,nu) would overlap");
  if (periods.size() != 2) throw ParameterError("the synthetic model has exactly two manifold branches");
  for (double T : periods)
    if (!(T > 0)) throw ParameterError("periods must be positive");
  const double W = kPi / 2 - 2 * lambda;
  if (!(psi_width > 0 && psi_width < W)) throw ParameterError("psi_width must lie in (0, pi/2 - 2 lambda)");
}

double SyntheticParams::sigma() const {
  const double a = 1.5 * std::sqrt(1 + A * A) / (eta * (1 - kKappa));
  const double b = 2 * (A + kChi) / (nu * (1 - kKappa)) + 1;
  return std::max({20.0, a, b});
}

SectionMapModel synthetic_bypass_map(const SyntheticParams& prm) {
  prm.validate();
  const double lam = prm.lambda, zm = prm.z_max, W = kPi / 2 - 2 * lam, sig = prm.sigma(), h = W / sig;
  const double tau = prm.tau;
  SectionMapModel m;
  m.name = "synthetic bypass";
  m.lambda = lam;
  m.z_max = zm;
  for (int k = 0; k <= 2; ++k) m.branches.push_back(drift_branch("phi", k, lam, zm, 0.04 * zm, 0.3 * tau));
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j) {
      const double a = component_left(i, lam), mid = a + W / 2, bj = component_left(2 + j, lam);
      const double zc = (i == 0 ? -1 : 1) * (0.3 + 0.4 * j) * zm;   // X needs z < 0 on C_0, z > 0 on C_1
      const double zc2 = (j == 0 ? -1 : 1) * (0.3 + 0.4 * i) * zm;  // Y likewise on C_2, C_3
      const double zlo = zc - h / 2;
      Branch b;
      b.label = "phi" + std::to_string(i) + std::to_string(j);
      b.kind = BranchKind::rectangle;
      b.dom = Rect::box(a, a + W, zlo, zlo + h, FiberKind::vertical);
      b.eval = [=](const Vec2& p) {
        const double zeta = (p.y() - zlo) / h;
        return Vec2(bj + W * g_fn(zeta, kKappa), zc2 + (p.x() - mid) / sig + kChi * h * (zeta - 0.5));
      };
      b.diff = [=](const Vec2& p) {
        const double zeta = (p.y() - zlo) / h;
        return Mat2d{{0.0, sig * g_der(zeta, kKappa)}, {1.0 / sig, kChi}};
      };
      b.inverse = [=](const Vec2& q) {
        const double zeta = g_inv((q.x() - bj) / W, kKappa);
        return Vec2(mid + sig * (q.y() - zc2 - kChi * h * (zeta - 0.5)), zlo + h * zeta);
      };
      b.return_time = [=](const Vec2& p) { return 0.5 * tau * (1 + 0.1 * std::cos(kPi * (p.y() - zlo) / h)); };
      b.im = swapped_image(b.dom, b.eval, FiberKind::vertical);
      m.branches.push_back(std::move(b));
    }
  return m;
}

SectionMapModel synthetic_manifold_map(const SyntheticParams& prm) {
  prm.validate();
  const double lam = prm.lambda, zm = prm.z_max, W = kPi / 2 - 2 * lam, w = prm.psi_width;
  const double rho = (w / 2) / zm, tau = prm.tau;
  SectionMapModel m;
  m.name = "synthetic manifold";
  m.lambda = lam;
  m.z_max = zm;
  for (int k = 0; k <= 2; ++k) m.branches.push_back(drift_branch("psi", k, lam, zm, 0.03 * zm, 0.4 * tau));
  for (int j = 0; j <= 1; ++j) {
    const double c = component_left(2 + j, lam) + W / 2, c2 = component_left(j, lam) + W / 2;
    const double T = prm.periods[std::size_t(j)];
    Branch b;
    b.label = "psi" + std::to_string(j + 1);
    b.kind = BranchKind::rectangle;
    b.nominal_time = T;
    b.d_dom_angle = kPi / 2;
    b.d_im_angle = kPi / 2;
    b.dom = Rect::box(c - w / 2, c + w / 2, -zm, zm, FiberKind::horizontal);
    b.eval = [=](const Vec2& p) {
      const double u = (p.x() - c) / (w / 2);
      return Vec2(c2 + rho * p.y() + kBeta * rho * zm * std::sin(kPi * u), zm * g_fn(u, kKappa));
    };
    b.diff = [=](const Vec2& p) {
      const double u = (p.x() - c) / (w / 2);
      return Mat2d{{kBeta * kPi * std::cos(kPi * u), rho}, {zm * g_der(u, kKappa) / (w / 2), 0.0}};
    };
    b.inverse = [=](const Vec2& q) {
      const double u = g_inv(q.y() / zm, kKappa);
      return Vec2(c + u * w / 2, (q.x() - c2 - kBeta * rho * zm * std::sin(kPi * u)) / rho);
    };
    b.return_time = [=](const Vec2& p) { return T + 0.05 * tau * std::sin(kPi * (p.x() - c) / (w / 2)); };
    b.im = swapped_image(b.dom, b.eval, FiberKind::horizontal);
    m.branches.push_back(std::move(b));
  }
  return m;
}

// ---------------------------------------------------------------- composites

CompositeMap::CompositeMap(const SectionMapModel& phi, const SectionMapModel& psi, std::vector<int> word)
    : phi_(&phi), psi_(&psi), word_(std::move(word)) {
  const auto rect = psi.rectangle_branches();
  for (int l : word_)
    if (l < 1 || l > int(rect.size())) throw PreconditionError("letter " + std::to_string(l) + " indexes no psi branch");
  const double lam = phi.lambda;
  auto comp = [&](const Rect& r) { return r_lambda_component(rect_center(r).x(), lam); };
  for (std::size_t m = 0; m < word_.size(); ++m) {
    const int prev = word_[(m + word_.size() - 1) % word_.size()];
    const int from = comp(psi.branches[std::size_t(rect[std::size_t(prev - 1)])].im);
    const int psi_b = rect[std::size_t(word_[m] - 1)];
    const int to = comp(psi.branches[std::size_t(psi_b)].dom);
    Step st;
    st.psi_branch = psi_b;
    for (int b : phi.rectangle_branches())
      if (comp(phi.branches[std::size_t(b)].dom) == from && comp(phi.branches[std::size_t(b)].im) == to) {
        st.phi_branch = b;
        break;
      }
    if (st.phi_branch < 0) ok_ = false;
    steps_.push_back(st);
  }
}

std::optional<std::vector<Vec2>> CompositeMap::orbit(const Vec2& p0) const {
  std::vector<Vec2> pts{p0};
  if (!in_r_lambda(p0, phi_->lambda, phi_->z_max)) return std::nullopt;
  const auto rect = psi_->rectangle_branches();
  Vec2 p = p0;
  for (int l : word_) {
    const int b = phi_->branch_at(p);
    if (b < 0 || phi_->branches[std::size_t(b)].kind != BranchKind::rectangle) return std::nullopt;
    const Vec2 q = phi_->branches[std::size_t(b)].eval(p);
    const Branch& ps = psi_->branches[std::size_t(rect[std::size_t(l - 1)])];
    if (!ps.dom.contains(q)) return std::nullopt;
    p = ps.eval(q);
    pts.push_back(p);
  }
  return pts;
}

std::optional<Vec2> CompositeMap::operator()(const Vec2& p) const {
  const auto o = orbit(p);
  if (!o) return std::nullopt;
  return o->back();
}

std::optional<Mat2d> CompositeMap::differential(const Vec2& p0) const {
  const auto o = orbit(p0);
  if (!o) return std::nullopt;
  const auto rect = psi_->rectangle_branches();
  Mat2d J = Mat2d::Identity();
  for (std::size_t m = 0; m < word_.size(); ++m) {
    const Vec2& p = (*o)[m];
    const Branch& ph = phi_->branches[std::size_t(phi_->branch_at(p))];
    const Vec2 q = ph.eval(p);
    const Branch& ps = psi_->branches[std::size_t(rect[std::size_t(word_[m] - 1)])];
    J = ps.differential(q) * ph.differential(p) * J;
  }
  return J;
}

std::optional<double> CompositeMap::return_time(const Vec2& p0) const {
  const auto o = orbit(p0);
  if (!o) return std::nullopt;
  const auto rect = psi_->rectangle_branches();
  double t = 0.0;
  for (std::size_t m = 0; m < word_.size(); ++m) {
    const Vec2& p = (*o)[m];
    const Branch& ph = phi_->branches[std::size_t(phi_->branch_at(p))];
    const Vec2 q = ph.eval(p);
    const Branch& ps = psi_->branches[std::size_t(rect[std::size_t(word_[m] - 1)])];
    t += ph.return_time(p) + ps.return_time(q);
  }
  return t;
}

namespace {

// One letter along a fixed itinerary, using the branch formulas.
struct LetterMap {
  const Branch* ph;
  const Branch* ps;
  Vec2 operator()(const Vec2& p) const { return ps->eval(ph->eval(p)); }
  Mat2d diff(const Vec2& p) const { return ps->differential(ph->eval(p)) * ph->differential(p); }
  double time(const Vec2& p) const { return ph->return_time(p) + ps->return_time(ph->eval(p)); }
};

std::vector<LetterMap> letters_of(const CompositeMap& F) {
  std::vector<LetterMap> out;
  for (const auto& s : F.steps())
    out.push_back({&F.phi().branches[std::size_t(s.phi_branch)], &F.psi().branches[std::size_t(s.psi_branch)]});
  return out;
}

// z with G(x, z).z == target inside the z-range of the letter's phi domain,
// by bisection. The stretched coordinate is monotone along vertical fibres.
std::optional<double> solve_z(const LetterMap& G, double x, double target) {
  double x0, x1, lo, hi;
  G.ph->dom.bounds(x0, x1, lo, hi);
  auto f = [&](double z) { return G(Vec2(x, z)).y() - target; };
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Sweep: contracted x forward, stretched z backward. Cyclic closes the
// chain; otherwise x_0 and z_k are pinned.
std::optional<std::vector<Vec2>> sweep(const std::vector<LetterMap>& G, std::vector<Vec2> p, bool cyclic, double z_end,
                                       int max_sweeps = 400) {
  const std::size_t k = G.size();
  for (int it = 0; it < max_sweeps; ++it) {
    double change = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t nx = cyclic ? (m + 1) % k : m + 1;
      const double x = G[m](p[m]).x();
      change = std::max(change, std::abs(x - p[nx].x()));
      p[nx].x() = x;
    }
    for (std::size_t m = k; m-- > 0;) {
      const double target = cyclic ? p[(m + 1) % k].y() : (m + 1 == k ? z_end : p[m + 1].y());
      const auto z = solve_z(G[m], p[m].x(), target);
      if (!z) return std::nullopt;
      change = std::max(change, std::abs(*z - p[m].y()));
      p[m].y() = *z;
    }
    if (change < 1e-15) break;
  }
  return p;
}

}  // namespace

std::optional<Vec2> CompositeMap::domain_point(double s, double u) const {
  if (word_.empty()) {  // identity on R_lambda: any point of component 0
    const double lo = component_left(0, phi_->lambda), hi = kPi / 2 - phi_->lambda;
    return Vec2(lo + s * (hi - lo), 0.0);
  }
  if (!ok_) return std::nullopt;
  const auto G = letters_of(*this);
  std::vector<Vec2> p;
  for (const auto& g : G) p.push_back(rect_center(g.ph->dom));
  double x0, x1, z0, z1;
  G[0].ph->dom.bounds(x0, x1, z0, z1);
  p[0].x() = x0 + s * (x1 - x0);
  G.back().ps->im.bounds(x0, x1, z0, z1);
  const double z_end = z0 + (0.05 + 0.9 * u) * (z1 - z0);
  p.push_back(Vec2(0.5 * (x0 + x1), z_end));
  const auto r = sweep(G, p, false, z_end);
  if (!r) return std::nullopt;
  if (!(*this)((*r)[0])) return std::nullopt;
  return (*r)[0];
}

CompositeMap compose_word_map(const SectionMapModel& phi, const SectionMapModel& psi, const std::vector<int>& word) {
  return CompositeMap(phi, psi, word);
}

// ---------------------------------------------------------------- fixed points

Vec2 unique_fixed_point_plain(const std::function<Vec2(const Vec2&)>& F, const std::function<Mat2d(const Vec2&)>& dF,
                              const Vec2& seed, double tol) {
  Vec2 p = seed;
  for (int it = 0; it < 100; ++it) {
    const Vec2 r = F(p) - p;
    if (r.norm() < tol) return p;
    p -= (dF(p) - Mat2d::Identity()).fullPivLu().solve(r);
    if (!p.allFinite()) break;
  }
  if ((F(p) - p).norm() < tol) return p;
  throw NumericalError("Newton did not converge to a fixed point");
}

FixedPoint unique_fixed_point(const CompositeMap& F, const FixedPointOptions& opt) {
  if (F.word().empty()) throw PreconditionError("the empty word gives the identity, which has no unique fixed point");
  if (!F.itinerary_ok()) throw HypothesisError("some letter has no bypass branch linking its components");
  const auto G = letters_of(F);
  const std::size_t k = G.size();
  FixedPoint out;

  // Hypotheses, letter by letter on the sampled letter domains. Cones are
  // invariant under each letter, so stretches multiply along the word.
  const ConeSpec V = ConeSpec::vertical(opt.A), H = ConeSpec::horizontal(opt.nu);
  double a = 1.0, margin = kInf;
  for (const auto& g : G) {
    double stretch = kInf;
    int used = 0;
    for_samples(g.ph->dom, opt.grid, [&](const Vec2& p, double, double) {
      if (!g.ps->dom.contains(g.ph->eval(p))) return;
      ++used;
      const Mat2d L = g.diff(p), Li = L.inverse();
      margin = std::min({margin, cone_image_margin(L, V, V), cone_image_margin(Li, H, H)});
      stretch = std::min({stretch, cone_min_stretch(L, V), cone_min_stretch(Li, H)});
    });
    if (used == 0) throw HypothesisError("no sample of the grid falls in the domain of letter " + g.ps->label);
    a *= stretch;
  }
  out.stretch = a;
  out.cone_margin = margin;
  if (!(margin > 0)) throw HypothesisError("cone invariance fails (margin " + std::to_string(margin) + ")");
  if (!(a > 2)) throw HypothesisError("stretch " + std::to_string(a) + " does not exceed 2");

  // Multiple-shooting Newton on p_{m+1} = G_m(p_m), indices mod k.
  std::vector<Vec2> p(k);
  if (opt.seed) {
    p[0] = *opt.seed;
    for (std::size_t m = 0; m + 1 < k; ++m) p[m + 1] = G[m](p[m]);
  } else {
    for (std::size_t m = 0; m < k; ++m) p[m] = rect_center(G[m].ph->dom);
  }
  auto residual = [&](const std::vector<Vec2>& q) {
    Eigen::VectorXd r(2 * k);
    for (std::size_t m = 0; m < k; ++m) r.segment<2>(2 * m) = G[m](q[m]) - q[(m + 1) % k];
    return r;
  };
  bool converged = false;
  Eigen::VectorXd r = residual(p);
  for (int it = 0; it < opt.max_newton && r.allFinite(); ++it) {
    if (r.lpNorm<Eigen::Infinity>() < opt.tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    for (std::size_t m = 0; m < k; ++m) {
      J.block<2, 2>(2 * m, 2 * m) += G[m].diff(p[m]);
      J.block<2, 2>(2 * m, 2 * ((m + 1) % k)) -= Mat2d::Identity();
    }
    const Eigen::VectorXd d = J.fullPivLu().solve(r);
    double step = 1.0;
    std::vector<Vec2> trial(k);
    Eigen::VectorXd rt;
    for (int half = 0; half < 30; ++half, step *= 0.5) {
      for (std::size_t m = 0; m < k; ++m) trial[m] = p[m] - step * d.segment<2>(2 * m);
      rt = residual(trial);
      if (rt.allFinite() && rt.norm() < r.norm()) break;
    }
    p = trial;
    r = rt;
  }
  if (r.allFinite() && r.lpNorm<Eigen::Infinity>() < opt.tol) converged = true;
  if (!converged || !F(p[0])) {
    std::vector<Vec2> init(k);
    for (std::size_t m = 0; m < k; ++m) init[m] = rect_center(G[m].ph->dom);
    const auto s = sweep(G, init, true, 0.0, 2000);
    if (!s) throw NumericalError("fixed point sweep left the letter domains");
    p = *s;
    out.used_fallback = true;
  }
  // |F(p) - p| amplifies rounding by the stretch of F; the per-letter
  // shooting residual is the well-conditioned measure.
  if (!F(p[0])) throw NumericalError("fixed point candidate is outside the composite domain");
  out.residual = residual(p).lpNorm<Eigen::Infinity>();
  if (!(out.residual < 1e-10)) throw NumericalError("fixed point shooting residual " + std::to_string(out.residual));
  out.p = p[0];
  out.orbit = p;
  // Summed along the shooting points, not a forward orbit, for the same
  // reason as the residual.
  out.period = 0.0;
  for (std::size_t m = 0; m < k; ++m) out.period += G[m].time(p[m]);
  return out;
}

double multi_seed_spread(const CompositeMap& F, const FixedPoint& fp, int seeds, unsigned long rng_seed,
                         const FixedPointOptions& opt) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double spread = 0.0;
  for (int i = 0; i < seeds; ++i) {
    const auto p = F.domain_point(unif(rng), unif(rng));
    if (!p) throw NumericalError("no domain point found for a seed");
    FixedPointOptions o = opt;
    o.seed = *p;
    spread = std::max(spread, (unique_fixed_point(F, o).p - fp.p).norm());
  }
  return spread;
}

// ---------------------------------------------------------------- Q_lambda escape

EscapeReport q_lambda_escape(const SectionMapModel& phi, const SectionMapModel& psi, const Vec2& p0, int max_iter) {
  const double lam = phi.lambda, zm = phi.z_max;
  if (!in_q_lambda(p0, lam, zm)) throw PreconditionError("start point is not in Q_lambda");
  EscapeReport rep;
  rep.strip = q_lambda_strip(p0.x(), lam);
  const bool odd = rep.strip % 2 != 0;
  rep.backward = (odd && p0.y() >= 0) || (!odd && p0.y() <= 0);
  rep.direction = odd == rep.backward ? 1 : -1;
  rep.z.push_back(p0.y());

  // The drift branch of m acting on p (forward), or whose image holds p (backward).
  auto step = [&](const SectionMapModel& m, const Vec2& p) -> std::optional<Vec2> {
    for (const auto& b : m.branches) {
      if (b.kind != BranchKind::drift) continue;
      if (rep.backward) {
        if (!b.im.contains(p)) continue;
        const Vec2 q = apply_inverse(b, p);
        if (b.dom.contains(q)) return q;
      } else if (b.dom.contains(p)) {
        return b.eval(p);
      }
    }
    return std::nullopt;
  };

  Vec2 p = p0;
  for (int it = 0; it < max_iter; ++it) {
    const SectionMapModel& m = (it % 2 == 0) == rep.backward ? psi : phi;
    const auto q = step(m, p);
    if (!q) {
      rep.exit_iteration = it;
      break;
    }
    if (q_lambda_strip(q->x(), lam) != rep.strip || rep.direction * (q->y() - p.y()) <= 0) {
      rep.monotone = false;
      rep.violation = it;
      rep.z.push_back(q->y());
      break;
    }
    p = *q;
    rep.z.push_back(p.y());
  }
  return rep;
}

// ---------------------------------------------------------------- orbit tables

std::vector<HorseshoeOrbit> horseshoe_orbits(const SectionMapModel& phi, const SectionMapModel& psi, double K,
                                             double tau, const FixedPointOptions& opt) {
  const auto rect = psi.rectangle_branches();
  std::vector<ChordDatum> letters;
  for (std::size_t j = 0; j < rect.size(); ++j)
    letters.push_back({"a" + std::to_string(j + 1), psi.branches[std::size_t(rect[j])].nominal_time, 1, 1});
  // Strict action < K: a word sitting on K is excluded rather than an error.
  const auto records = enumerate_orbits(letters, K - 1e-6, tau);
  auto to_ints = [](const std::vector<std::string>& w) {
    std::vector<int> out;
    for (const auto& s : w) out.push_back(std::stoi(s.substr(1)));
    return out;
  };
  std::vector<HorseshoeOrbit> out(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    HorseshoeOrbit& o = out[i];
    o.word = to_ints(records[i].word.letters);
    o.root = to_ints(records[i].word.root);
    o.action = records[i].action;
    o.window_lo = records[i].window_lo;
    o.window_hi = records[i].window_hi;
    o.cz = records[i].cz;
    try {
      o.fp = unique_fixed_point(CompositeMap(phi, psi, o.word), opt);
      o.in_window = o.fp->period >= o.window_lo && o.fp->period <= o.window_hi;
    } catch (const Error& e) {
      o.error = e.what();
    }
  });
  return out;
}

std::string fixed_points_csv(const std::vector<HorseshoeOrbit>& orbits) {
  std::ostringstream os;
  os.precision(17);
  os << "word,x,z,period,cz_index\n";
  for (const auto& o : orbits) {
    for (std::size_t i = 0; i < o.word.size(); ++i) os << (i ? " " : "") << "a" << o.word[i];
    if (o.fp)
      os << ',' << o.fp->p.x() << ',' << o.fp->p.y() << ',' << o.fp->period << ',' << o.cz << '\n';
    else
      os << ",,,," << o.cz << '\n';
  }
  return os.str();
}

}  // namespace reeb
