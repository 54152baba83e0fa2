#include "reeb/cz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 rot(double a) {
  Mat2 R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

// exp(r N) with N = [[cos p, sin p], [sin p, -cos p]], N^2 = I.
Mat2 stretch(double r, double p) {
  Mat2 N;
  N << std::cos(p), std::sin(p), std::sin(p), -std::cos(p);
  return std::cosh(r) * Mat2::Identity() + std::sinh(r) * N;
}

double raw_angle(const Mat2& M, AngleVariant v) {
  return v == AngleVariant::polar ? polar_angle(M) : std::atan2(M(1, 0), M(0, 0));
}

double unwrap_next(double prev, double raw) {
  double a = raw + 2.0 * kPi * std::round((prev - raw) / (2.0 * kPi));
  if (std::fabs(a - prev) > 0.5 * kPi)
    throw ResolutionError("rotation angle jumps by more than pi/2 between samples; sample the path more densely");
  return a;
}

}  // namespace

void SymplecticPath::validate() const {
  if (t.empty() || t.size() != M.size()) throw PreconditionError("symplectic path is empty or ragged");
  if (t.front() != 0.0) throw PreconditionError("symplectic path must start at t = 0");
  if ((M.front() - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw PreconditionError("symplectic path must start at the identity");
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (std::fabs(M[i].determinant() - 1.0) >= 1e-6)
      throw PreconditionError("symplectic path sample has determinant off 1");
    if (i > 0 && !(t[i] > t[i - 1])) throw PreconditionError("symplectic path times must increase");
  }
}

std::string SymplecticPath::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,m11,m12,m21,m22\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << t[i] << ',' << M[i](0, 0) << ',' << M[i](0, 1) << ',' << M[i](1, 0) << ',' << M[i](1, 1) << '\n';
  return os.str();
}

SymplecticPath SymplecticPath::from_csv(const std::string& text) {
  SymplecticPath p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 't') continue;
    std::istringstream ls(line);
    double v[5];
    char comma;
    ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4];
    if (!ls) throw PreconditionError("malformed symplectic path row: " + line);
    Mat2 m;
    m << v[1], v[2], v[3], v[4];
    p.t.push_back(v[0]);
    p.M.push_back(m);
  }
  return p;
}

double polar_angle(const Mat2& M) {
  return std::atan2(M(1, 0) - M(0, 1), M(0, 0) + M(1, 1));
}

std::vector<double> rotation_angle(const SymplecticPath& path, AngleVariant v) {
  path.validate();
  std::vector<double> th(path.size());
  th[0] = raw_angle(path.M[0], v);
  for (std::size_t i = 1; i < path.size(); ++i) th[i] = unwrap_next(th[i - 1], raw_angle(path.M[i], v));
  return th;
}

CzResult conley_zehnder_detail(const SymplecticPath& path) {
  const std::vector<double> th = rotation_angle(path, AngleVariant::polar);
  const Mat2& E = path.end();
  const double tr = E.trace();
  if (std::fabs(2.0 - tr) <= 1e-8) throw DegeneracyError("endpoint has eigenvalue 1");

  CzResult out;
  out.theta_end = th.back();

  // Polar factors of the endpoint: E = S O(theta).
  const double theta = th.back();
  const Mat2 S = E * rot(theta).transpose();
  const double trS = S.trace();
  const double r0 = std::acosh(std::max(1.0, 0.5 * trS));
  double p0 = 0.0;
  if (r0 > 1e-14) {
    const Mat2 N = (S - std::cosh(r0) * Mat2::Identity()) / std::sinh(r0);
    p0 = std::atan2(N(0, 1), N(0, 0));
  }

  // Target angle. tr(S O(phi)) = cos(phi) tr(S), so moving phi toward the
  // target keeps the trace on the same side of 2 for the whole extension.
  double target;
  if (tr > 2.0) {
    target = 2.0 * kPi * std::round(theta / (2.0 * kPi));
  } else {
    target = 2.0 * kPi * std::floor(theta / (2.0 * kPi)) + kPi;
  }

  constexpr int kSteps = 256;
  double prev = theta;
  for (int i = 1; i <= kSteps; ++i) {
    const double s = double(i) / kSteps;
    const Mat2 Mi = stretch(r0, p0) * rot(theta + s * (target - theta));
    prev = unwrap_next(prev, polar_angle(Mi));
  }
  const double r1 = tr > 2.0 ? std::log(2.0) : 0.0;
  double p1 = 0.0;
  double dp = tr > 2.0 ? std::remainder(p1 - p0, 2.0 * kPi) : 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double s = double(i) / kSteps;
    const Mat2 Mi = stretch(r0 + s * (r1 - r0), p0 + s * dp) * rot(target);
    prev = unwrap_next(prev, polar_angle(Mi));
  }
  out.theta_extended = prev;
  const double q = prev / kPi;
  out.mu = int(std::lround(q));
  out.residual = std::fabs(q - out.mu);
  if (out.residual >= 0.01) throw NumericalError("extension did not end on a multiple of pi");
  return out;
}

int conley_zehnder(const SymplecticPath& path) { return conley_zehnder_detail(path).mu; }

MuTilde mu_tilde(const SymplecticPath& path, double duration) {
  const std::vector<double> th = rotation_angle(path, AngleVariant::image_e1);
  if (duration > path.t.back() + 1e-12 || duration < 0.0)
    throw PreconditionError("path does not cover the requested duration");
  std::size_t i = 0;
  while (i + 1 < path.size() && path.t[i + 1] < duration) ++i;
  double theta = th[i];
  if (i + 1 < path.size()) {
    const double w = (duration - path.t[i]) / (path.t[i + 1] - path.t[i]);
    const Mat2 Mi = (1.0 - w) * path.M[i] + w * path.M[i + 1];
    theta = unwrap_next(th[i], std::atan2(Mi(1, 0), Mi(0, 0)));
  }
  MuTilde r;
  r.theta = theta;
  r.value = int(std::ceil(theta / kPi)) - 1;
  const double k = std::round(theta / kPi);
  r.boundary_warning = std::fabs(theta - k * kPi) < 1e-9;
  if (r.boundary_warning) r.value = int(k) - 1;
  return r;
}

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }
std::string to_string(OrbitType t) { return t == OrbitType::hyperbolic ? "hyperbolic" : "elliptic"; }

OrbitParity classify(const Mat2& M) {
  if (std::fabs(M.determinant() - 1.0) >= 1e-6) throw PreconditionError("matrix is not in Sp(2)");
  const double tr = M.trace();
  if (std::fabs(std::fabs(tr) - 2.0) <= 1e-9) throw DegeneracyError("trace is +-2");
  OrbitParity o;
  if (std::fabs(tr) > 2.0) {
    o.type = OrbitType::hyperbolic;
    o.parity = tr > 0.0 ? Parity::even : Parity::odd;
    const double disc = std::sqrt(tr * tr - 4.0);
    o.lambda1 = 0.5 * (tr + (tr > 0 ? disc : -disc));
    o.lambda2 = 1.0 / o.lambda1;
  } else {
    o.type = OrbitType::elliptic;
    o.parity = Parity::odd;
    o.rho = 1.0;
    o.arg = std::acos(0.5 * tr);
  }
  return o;
}

bool is_good(const OrbitParity& primitive, int m) {
  if (m < 1) throw PreconditionError("cover multiplicity must be >= 1");
  return !(primitive.negative_hyperbolic() && m % 2 == 0);
}

int word_index(const std::vector<std::string>& word, const std::map<std::string, int>& mu_tildes) {
  int s = 0;
  for (const auto& a : word) {
    auto it = mu_tildes.find(a);
    if (it == mu_tildes.end()) throw PreconditionError("no chord index for letter '" + a + "'");
    s += it->second;
  }
  return s;
}

Localization localize_index(const SymplecticPath& path) {
  Localization out;
  out.mu = conley_zehnder(path);
  const double a = rotation_angle(path, AngleVariant::image_e1).back();
  const double two_pi = 2 * std::acos(-1.0), half = two_pi / 4;
  if (out.mu % 2 != 0) {
    const double k = std::floor((a - half) / two_pi);
    out.applicable = a >= k * two_pi + half && a <= k * two_pi + 3 * half;
    out.predicted = 2 * int(k) + 1;
  } else {
    const double k = std::floor((a + half) / two_pi);
    out.applicable = a >= k * two_pi - half && a <= k * two_pi + half;
    out.predicted = 2 * int(k);
  }
  return out;
}

std::optional<int> cone_eigen_sign(const Mat2& R, double nu, double theta0, const Eigen::Vector2d& f) {
  const Eigen::Vector2d r1 = R.col(0), rf = R * f;
  auto in_cone = [](const Eigen::Vector2d& w, const Eigen::Vector2d& axis, double width) {
    const Eigen::Vector2d v(-axis.y(), axis.x());
    return std::abs(w.dot(v)) < width * std::abs(w.dot(axis));
  };
  const Eigen::Vector2d e1(1, 0), e2(0, 1);
  if (!in_cone(r1, e1, std::tan(nu)) || r1.norm() < 3) return std::nullopt;
  if (!in_cone(f, e2, std::tan(theta0)) || !in_cone(rf, e2, std::tan(theta0))) return std::nullopt;
  return r1.x() > 0 ? 1 : -1;
}

}  // namespace reeb
