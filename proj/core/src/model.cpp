#include "reeb/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reeb/errors.hpp"

namespace reeb {

namespace {

constexpr double kPi = std::numbers::pi;

bool has_p_term(Variant v) {
  return v == Variant::ThickenedPerturbed_alpha_p || v == Variant::BypassAdapted_alpha_b ||
         v == Variant::SolidTorus_alpha_p || v == Variant::SolidTorus_alpha_b;
}

bool has_m_term(Variant v) {
  return v == Variant::BypassAdapted_alpha_b || v == Variant::SolidTorus_alpha_b;
}

bool is_torus(Variant v) {
  return v == Variant::SolidTorus_alpha || v == Variant::SolidTorus_alpha_p ||
         v == Variant::SolidTorus_alpha_b;
}

// Representative of z in [-period/2, period/2).
double wrap_period(double z, double period) {
  double r = std::fmod(z + 0.5 * period, period);
  if (r < 0.0) r += period;
  return r - 0.5 * period;
}

Vec3 form_from_jet(const FormJet& j, double x) {
  return {j.g, j.f, j.P * std::cos(x)};
}

Vec3 curl_from_jet(const FormJet& j, double x) {
  const double c = std::cos(x), s = std::sin(x);
  return {j.P_y * c, j.P * s - j.P_x * c, j.f_x - j.g_y};
}

Box torus_box(int n, double eta) {
  if (n < 1) throw ParameterError("solid torus needs n >= 1");
  Box b;
  b.x_lo = -kPi + eta;
  b.x_hi = n * kPi - eta;
  b.n = n;
  b.eta = eta;
  return b;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Standard: return "Standard";
    case Variant::ThickenedPerturbed_alpha_p: return "ThickenedPerturbed_alpha_p";
    case Variant::BypassAdapted_alpha_b: return "BypassAdapted_alpha_b";
    case Variant::SolidTorus_alpha: return "SolidTorus_alpha";
    case Variant::SolidTorus_alpha_p: return "SolidTorus_alpha_p";
    case Variant::SolidTorus_alpha_b: return "SolidTorus_alpha_b";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "Standard" || s == "standard") return Variant::Standard;
  if (s == "ThickenedPerturbed_alpha_p" || s == "alpha_p") return Variant::ThickenedPerturbed_alpha_p;
  if (s == "BypassAdapted_alpha_b" || s == "alpha_b") return Variant::BypassAdapted_alpha_b;
  if (s == "SolidTorus_alpha") return Variant::SolidTorus_alpha;
  if (s == "SolidTorus_alpha_p") return Variant::SolidTorus_alpha_p;
  if (s == "SolidTorus_alpha_b") return Variant::SolidTorus_alpha_b;
  throw ParameterError("unknown model variant: " + s);
}

bool Box::contains(const ChartPoint& p, double slack) const {
  return p.x >= x_lo - slack && p.x <= x_hi + slack && p.y >= y_lo - slack &&
         p.y <= y_hi + slack && std::isfinite(p.z);
}

ContactModel::ContactModel(Variant v, Box box, std::map<std::string, BumpProfile> profiles)
    : variant_(v), box_(box), profiles_(std::move(profiles)) {
  auto need = [&](const char* role) {
    if (!profiles_.count(role))
      throw ParameterError(std::string("model ") + to_string(v) + " needs profile '" + role + "'");
  };
  if (has_p_term(v)) {
    need("k");
    need("l");
  }
  if (has_m_term(v)) need("m");
  if (is_torus(v)) {
    need("f");
    if (box_.n < 1) throw ParameterError("solid torus needs n >= 1");
  }
  if (!(box_.x_lo < box_.x_hi) || !(box_.y_lo < box_.y_hi))
    throw ParameterError("empty model box");
  if (!(box_.z_period > 0.0)) throw ParameterError("z_period must be positive");
}

ContactModel ContactModel::standard() {
  Box b;
  b.x_lo = -kPi;
  b.x_hi = kPi;
  return ContactModel(Variant::Standard, b, {});
}

ContactModel ContactModel::alpha_p() {
  return ContactModel(Variant::ThickenedPerturbed_alpha_p, Box{},
                      {{"k", BumpProfile::cutoff_k()}, {"l", BumpProfile::convex_l()}});
}

ContactModel ContactModel::alpha_b() {
  return ContactModel(Variant::BypassAdapted_alpha_b, Box{},
                      {{"k", BumpProfile::cutoff_k()},
                       {"l", BumpProfile::convex_l()},
                       {"m", BumpProfile::cutoff_m()}});
}

ContactModel ContactModel::solid_torus(int n, double eta) {
  return ContactModel(Variant::SolidTorus_alpha, torus_box(n, eta),
                      {{"f", BumpProfile::slope_f()},
                       {"g", BumpProfile::shear_g(-3.0 * kPi / 4.0)}});
}

ContactModel ContactModel::solid_torus_p(int n, double eta) {
  return ContactModel(Variant::SolidTorus_alpha_p, torus_box(n, eta),
                      {{"f", BumpProfile::slope_f()},
                       {"g", BumpProfile::shear_g(-3.0 * kPi / 4.0)},
                       {"k", BumpProfile::cutoff_k()},
                       {"l", BumpProfile::convex_l()}});
}

ContactModel ContactModel::solid_torus_b(int n, double eta) {
  return ContactModel(Variant::SolidTorus_alpha_b, torus_box(n, eta),
                      {{"f", BumpProfile::slope_f()},
                       {"g", BumpProfile::shear_g(-3.0 * kPi / 4.0)},
                       {"k", BumpProfile::cutoff_k()},
                       {"l", BumpProfile::convex_l()},
                       {"m", BumpProfile::cutoff_m()}});
}

const BumpProfile& ContactModel::profile(const std::string& role) const {
  auto it = profiles_.find(role);
  if (it == profiles_.end()) throw ParameterError("model has no profile '" + role + "'");
  return it->second;
}

double ContactModel::l_second_derivative() const {
  return profile("l").second_derivative_at_center();
}

FormJet ContactModel::jet(const ChartPoint& p) const {
  FormJet j;
  if (auto it = profiles_.find("f"); it != profiles_.end()) {
    Jet f = it->second.eval(p.x);
    j.f = f.v;
    j.f_x = f.d;
  } else {
    j.f = std::sin(p.x);
    j.f_x = std::cos(p.x);
  }
  if (auto it = profiles_.find("g"); it != profiles_.end()) {
    Jet b = it->second.eval(p.x);
    Jet sy = smooth_step(2.0 * p.y);
    j.g = b.v * sy.v;
    j.g_y = b.v * 2.0 * sy.d;
  }
  if (has_p_term(variant_)) {
    const BumpProfile& kp = profile("k");
    Jet K{};
    if (is_torus(variant_)) {
      for (int i = 0; i < box_.n; ++i) {
        Jet t = kp.eval(p.x - i * kPi);
        K.v += t.v;
        K.d += t.d;
      }
    } else {
      K = kp.eval(p.x);
    }
    Jet L = profile("l").eval(p.y);
    Jet M{1.0, 0.0};
    if (has_m_term(variant_)) M = profile("m").eval(wrap_period(p.z, box_.z_period));
    j.P = 1.0 + K.v * L.v * M.v;
    j.P_x = K.d * L.v * M.v;
    j.P_y = K.v * L.d * M.v;
    j.P_z = K.v * L.v * M.d;
  }
  return j;
}

Vec3 evaluate_form(const ContactModel& m, const ChartPoint& p) {
  if (!m.box().contains(p)) throw DomainError("point outside model box");
  return form_from_jet(m.jet(p), p.x);
}

Vec3 reeb_field_unchecked(const ContactModel& m, const ChartPoint& p) {
  const FormJet j = m.jet(p);
  const Vec3 a = form_from_jet(j, p.x);
  const Vec3 c = curl_from_jet(j, p.x);
  const double vol = a.dot(c);
  if (std::fabs(vol) < 1e-12) throw SingularityError("contact volume vanishes; invalid profile");
  return c / vol;
}

Vec3 reeb_field(const ContactModel& m, const ChartPoint& p) {
  if (!m.box().contains(p)) throw DomainError("point outside model box");
  return reeb_field_unchecked(m, p);
}

double contact_volume(const ContactModel& m, const ChartPoint& p) {
  const FormJet j = m.jet(p);
  return form_from_jet(j, p.x).dot(curl_from_jet(j, p.x));
}

Eigen::Matrix3d d_alpha_matrix(const ContactModel& m, const ChartPoint& p) {
  const FormJet j = m.jet(p);
  const double c = std::cos(p.x), s = std::sin(p.x);
  const double dxy = j.f_x - j.g_y;
  const double dxz = j.P_x * c - j.P * s;
  const double dyz = j.P_y * c;
  Eigen::Matrix3d D;
  D << 0.0, dxy, dxz,
      -dxy, 0.0, dyz,
      -dxz, -dyz, 0.0;
  return D;
}

ReebResidual verify_reeb(const ContactModel& m, const ChartPoint& p, double h) {
  auto form = [&](const Vec3& q) { return form_from_jet(m.jet(ChartPoint::from(q)), q[0]); };
  const Vec3 q = p.vec();
  Eigen::Matrix3d grad;  // grad(i, j) = d_i a_j
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    grad.row(i) = ((form(q + e) - form(q - e)) / (2.0 * h)).transpose();
  }
  const Eigen::Matrix3d D = grad - grad.transpose();
  const Vec3 R = reeb_field_unchecked(m, p);
  ReebResidual r;
  r.alpha_minus_one = std::fabs(form(q).dot(R) - 1.0);
  r.iota_dalpha = (R.transpose() * D).cwiseAbs().maxCoeff();
  return r;
}

double min_volume_on_grid(const ContactModel& m, int n) {
  const Box& b = m.box();
  double lo = INFINITY;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const double tx = n > 1 ? double(i) / (n - 1) : 0.5;
        const double ty = n > 1 ? double(k) / (n - 1) : 0.5;
        ChartPoint p{b.x_lo + tx * (b.x_hi - b.x_lo), b.y_lo + ty * (b.y_hi - b.y_lo),
                     -0.5 * b.z_period + b.z_period * double(l) / n};
        lo = std::min(lo, contact_volume(m, p));
      }
  return lo;
}

void to_json(nlohmann::json& j, const ContactModel& m) {
  const Box& b = m.box();
  j = nlohmann::json{
      {"variant", to_string(m.variant())},
      {"box",
       {{"x_lo", b.x_lo}, {"x_hi", b.x_hi}, {"y_lo", b.y_lo}, {"y_hi", b.y_hi},
        {"z_max", b.z_max}, {"y_S", b.y_S}, {"n", b.n}, {"eta", b.eta},
        {"z_period", b.z_period}}},
      {"profiles", m.profiles()}};
}

void from_json(const nlohmann::json& j, ContactModel& m) {
  const Variant v = variant_from_string(j.at("variant").get<std::string>());
  ContactModel def;
  switch (v) {
    case Variant::Standard: def = ContactModel::standard(); break;
    case Variant::ThickenedPerturbed_alpha_p: def = ContactModel::alpha_p(); break;
    case Variant::BypassAdapted_alpha_b: def = ContactModel::alpha_b(); break;
    case Variant::SolidTorus_alpha:
    case Variant::SolidTorus_alpha_p:
    case Variant::SolidTorus_alpha_b: {
      int n = 4;
      double eta = 0.1;
      if (j.contains("box")) {
        n = j["box"].value("n", 4);
        eta = j["box"].value("eta", 0.1);
      }
      def = v == Variant::SolidTorus_alpha     ? ContactModel::solid_torus(n, eta)
            : v == Variant::SolidTorus_alpha_p ? ContactModel::solid_torus_p(n, eta)
                                               : ContactModel::solid_torus_b(n, eta);
      break;
    }
  }
  Box b = def.box();
  if (j.contains("box")) {
    const auto& jb = j["box"];
    b.x_lo = jb.value("x_lo", b.x_lo);
    b.x_hi = jb.value("x_hi", b.x_hi);
    b.y_lo = jb.value("y_lo", b.y_lo);
    b.y_hi = jb.value("y_hi", b.y_hi);
    b.z_max = jb.value("z_max", b.z_max);
    b.y_S = jb.value("y_S", b.y_S);
    b.n = jb.value("n", b.n);
    b.eta = jb.value("eta", b.eta);
    b.z_period = jb.value("z_period", b.z_period);
  }
  auto profiles = def.profiles();
  if (j.contains("profiles"))
    for (auto& [role, pj] : j["profiles"].items()) profiles[role] = pj.get<BumpProfile>();
  m = ContactModel(v, b, profiles);
}

}  // namespace reeb
