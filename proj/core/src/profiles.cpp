#include "reeb/profiles.hpp"

#include <cmath>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

// sigma(t) = exp(-1/t) and its derivative, both 0 for t <= 0.
Jet sigma(double t) {
  if (t <= 0.0) return {};
  const double e = std::exp(-1.0 / t);
  return {e, e / (t * t)};
}

// Rising transition over [a, b] in the variable u.
Jet ramp(double u, double a, double b) {
  const double w = b - a;
  Jet s = smooth_step((u - a) / w);
  return {s.v, s.d / w};
}

// Odd saturation S with S(u) = u for |u| <= lo and S = sign(u) for |u| >= hi.
// S' >= 0 everywhere, which is what keeps f*sin + f'*cos positive.
Jet saturate(double u, double lo, double hi) {
  const double a = std::fabs(u);
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  if (a <= lo) return {u, 1.0};
  if (a >= hi) return {sgn, 0.0};
  Jet s = ramp(a, lo, hi);
  const double v = a + (1.0 - a) * s.v;
  const double d = 1.0 - s.v + (1.0 - a) * s.d;
  return {sgn * v, d};
}

}  // namespace

Jet smooth_step(double t) {
  if (t <= 0.0) return {0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0};
  Jet a = sigma(t);
  Jet b = sigma(1.0 - t);
  const double den = a.v + b.v;
  // d/dt sigma(1-t) = -b.d
  return {a.v / den, (a.d * b.v + a.v * b.d) / (den * den)};
}

std::string to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::cutoff_k: return "cutoff_k";
    case ProfileFamily::convex_l: return "convex_l";
    case ProfileFamily::cutoff_m: return "cutoff_m";
    case ProfileFamily::slope_f: return "slope_f";
    case ProfileFamily::shear_g: return "shear_g";
  }
  return "?";
}

ProfileFamily profile_family_from_string(const std::string& s) {
  if (s == "cutoff_k") return ProfileFamily::cutoff_k;
  if (s == "convex_l") return ProfileFamily::convex_l;
  if (s == "cutoff_m") return ProfileFamily::cutoff_m;
  if (s == "slope_f") return ProfileFamily::slope_f;
  if (s == "shear_g") return ProfileFamily::shear_g;
  throw ParameterError("unknown profile family: " + s);
}

Jet BumpProfile::eval(double s) const {
  switch (family) {
    case ProfileFamily::cutoff_k:
    case ProfileFamily::shear_g: {
      const double u = s - center;
      Jet r = ramp(std::fabs(u), plateau, support);
      const double sgn = u < 0.0 ? -1.0 : 1.0;
      const double amp = family == ProfileFamily::shear_g ? amplitude : 1.0;
      return {amp * (1.0 - r.v), -amp * sgn * r.d};
    }
    case ProfileFamily::convex_l: {
      const double u = s - center;
      return {amplitude * (std::cosh(support * u) - 1.0),
              amplitude * support * std::sinh(support * u)};
    }
    case ProfileFamily::cutoff_m: {
      const double u = s - center;
      Jet r = ramp(std::fabs(u), plateau, support);
      const double sgn = u < 0.0 ? -1.0 : 1.0;
      return {r.v, sgn * r.d};
    }
    case ProfileFamily::slope_f: {
      const double sn = std::sin(s);
      Jet S = saturate(sn, plateau, support);
      return {S.v, S.d * std::cos(s)};
    }
  }
  return {};
}

double BumpProfile::second_derivative_at_center() const {
  if (family != ProfileFamily::convex_l)
    throw ParameterError("second derivative is only reported for convex_l");
  return amplitude * support * support;
}

BumpProfile BumpProfile::cutoff_k(double plateau, double support) {
  return {ProfileFamily::cutoff_k, 0.0, plateau, support, 1.0};
}

BumpProfile BumpProfile::convex_l(double eps, double beta) {
  return {ProfileFamily::convex_l, 0.0, 0.0, beta, eps};
}

BumpProfile BumpProfile::cutoff_m(double z_max, double support) {
  return {ProfileFamily::cutoff_m, 0.0, z_max, support, 1.0};
}

BumpProfile BumpProfile::slope_f(double lo, double hi) {
  return {ProfileFamily::slope_f, 0.0, lo, hi, 1.0};
}

BumpProfile BumpProfile::shear_g(double center, double amplitude,
                                 double plateau, double support) {
  return {ProfileFamily::shear_g, center, plateau, support, amplitude};
}

void to_json(nlohmann::json& j, const BumpProfile& p) {
  j = nlohmann::json{{"family", to_string(p.family)},
                     {"center", p.center},
                     {"plateau", p.plateau},
                     {"support", p.support},
                     {"amplitude", p.amplitude}};
}

void from_json(const nlohmann::json& j, BumpProfile& p) {
  p.family = profile_family_from_string(j.at("family").get<std::string>());
  p.center = j.value("center", 0.0);
  p.plateau = j.value("plateau", 0.0);
  p.support = j.value("support", 1.0);
  p.amplitude = j.value("amplitude", 1.0);
  if (!(p.support > p.plateau) && p.family != ProfileFamily::convex_l)
    throw ParameterError("profile support must exceed plateau");
}

}  // namespace reeb
