#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "reeb/profiles.hpp"

namespace reeb {

using Vec3 = Eigen::Vector3d;

struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // lifted circle coordinate; never reduced mod z_period

  Vec3 vec() const { return {x, y, z}; }
  static ChartPoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

enum class Variant {
  Standard,
  ThickenedPerturbed_alpha_p,
  BypassAdapted_alpha_b,
  SolidTorus_alpha,
  SolidTorus_alpha_p,
  SolidTorus_alpha_b,
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Chart bounds. z is a lift of a circle of circumference z_period and is not
// bounded; z_max is the half-width of the window where cutoff_m vanishes.
struct Box {
  double x_lo = -0.7853981633974483;
  double x_hi = 0.7853981633974483;
  double y_lo = -1.0;
  double y_hi = 1.0;
  double z_max = 0.1;
  double y_S = 1.0;
  int n = 0;          // number of orbit cores on solid tori
  double eta = 0.1;   // end margin on solid tori
  double z_period = 6.283185307179586;

  bool contains(const ChartPoint& p, double slack = 0.0) const;
};

// The coefficient functions of  alpha = g dx + f dy + P cos(x) dz  with the
// first partials the Reeb field needs. Every variant has this shape.
struct FormJet {
  double g = 0, g_y = 0;
  double f = 0, f_x = 0;
  double P = 1, P_x = 0, P_y = 0, P_z = 0;
};

class ContactModel {
 public:
  ContactModel() = default;
  ContactModel(Variant v, Box box, std::map<std::string, BumpProfile> profiles);

  // Factories with the default profiles.
  static ContactModel standard();
  static ContactModel alpha_p();
  static ContactModel alpha_b();
  static ContactModel solid_torus(int n, double eta = 0.1);
  static ContactModel solid_torus_p(int n, double eta = 0.1);
  static ContactModel solid_torus_b(int n, double eta = 0.1);

  Variant variant() const { return variant_; }
  const Box& box() const { return box_; }
  Box& box() { return box_; }
  const std::map<std::string, BumpProfile>& profiles() const { return profiles_; }
  const BumpProfile& profile(const std::string& role) const;

  // Closed-form coefficients; no box check.
  FormJet jet(const ChartPoint& p) const;

  // l''(0) of the convex profile, for the trace formula.
  double l_second_derivative() const;

 private:
  Variant variant_ = Variant::Standard;
  Box box_;
  std::map<std::string, BumpProfile> profiles_;
};

// (a_x, a_y, a_z). Throws DomainError outside the box.
Vec3 evaluate_form(const ContactModel& m, const ChartPoint& p);

// R = curl(a) / (a . curl(a)). Throws SingularityError if the volume
// vanishes and DomainError outside the box.
Vec3 reeb_field(const ContactModel& m, const ChartPoint& p);

// Same formula without the box check, for integrators that must probe a
// step slightly past a face before the exit event is localized.
Vec3 reeb_field_unchecked(const ContactModel& m, const ChartPoint& p);

// alpha ^ d alpha / dx^dy^dz.
double contact_volume(const ContactModel& m, const ChartPoint& p);

// Exterior derivative as the antisymmetric matrix D with
// d alpha(u, v) = u^T D v, from closed-form partials.
Eigen::Matrix3d d_alpha_matrix(const ContactModel& m, const ChartPoint& p);

// Finite-difference residuals |alpha(R) - 1| and max_i |d alpha(R, e_i)|,
// computed from evaluate_form only. Independent of the closed-form curl.
struct ReebResidual {
  double alpha_minus_one = 0.0;
  double iota_dalpha = 0.0;
};
ReebResidual verify_reeb(const ContactModel& m, const ChartPoint& p, double h = 1e-6);

// Minimum of contact_volume over an n^3 grid of the box (z over one period).
double min_volume_on_grid(const ContactModel& m, int n);

void to_json(nlohmann::json& j, const ContactModel& m);
void from_json(const nlohmann::json& j, ContactModel& m);

}  // namespace reeb
