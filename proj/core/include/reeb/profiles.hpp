#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace reeb {

// Value and first derivative of a scalar profile.
struct Jet {
  double v = 0.0;
  double d = 0.0;
};

// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
Jet smooth_step(double t);

enum class ProfileFamily { cutoff_k, convex_l, cutoff_m, slope_f, shear_g };

std::string to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(const std::string& s);

// One-dimensional profile. The meaning of the four numbers depends on the
// family:
//   cutoff_k  1 on |x-center| <= plateau, 0 for |x-center| >= support
//   convex_l  amplitude*(cosh(support*(y-center)) - 1); plateau unused
//   cutoff_m  0 on |z-center| <= plateau, 1 beyond support; the model
//             reduces z to one period before evaluating
//   slope_f   sin(x) near k*pi, sign(sin x) where |sin x| >= support;
//             plateau is the |sin x| level below which f = sin exactly
//   shear_g   amplitude * bump(x-center) with bump = 1 on plateau, 0 past
//             support; y-dependence is handled by the model
struct BumpProfile {
  ProfileFamily family = ProfileFamily::cutoff_k;
  double center = 0.0;
  double plateau = 0.0;
  double support = 1.0;
  double amplitude = 1.0;

  Jet eval(double s) const;
  // Second derivative, only meaningful for convex_l.
  double second_derivative_at_center() const;

  static BumpProfile cutoff_k(double plateau = 0.3, double support = 0.7);
  static BumpProfile convex_l(double eps = 0.01, double beta = 2.0);
  static BumpProfile cutoff_m(double z_max = 0.1, double support = 0.3);
  static BumpProfile slope_f(double lo = 0.3, double hi = 0.6);
  static BumpProfile shear_g(double center, double amplitude = 0.05,
                             double plateau = 0.1, double support = 0.3);
};

void to_json(nlohmann::json& j, const BumpProfile& p);
void from_json(const nlohmann::json& j, BumpProfile& p);

}  // namespace reeb
