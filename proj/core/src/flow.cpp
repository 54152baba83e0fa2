#include "reeb/flow.hpp"

#include <cmath>
#include <sstream>

#include "dopri.hpp"
#include "reeb/errors.hpp"

namespace reeb {

namespace {

using Stepper3 = detail::Dopri5<3>;
using Stepper12 = detail::Dopri5<12>;

Stepper3::Options stepper_options(const FlowSettings& s) {
  return {s.abs_tol, s.rel_tol, s.max_step, s.min_step};
}

// Signed distances to the four faces; all positive strictly inside.
struct FaceFn {
  Face face;
  double operator()(const Box& b, const Vec3& q) const {
    switch (face) {
      case Face::x_lo: return q[0] - b.x_lo;
      case Face::x_hi: return b.x_hi - q[0];
      case Face::y_lo: return q[1] - b.y_lo;
      case Face::y_hi: return b.y_hi - q[1];
      case Face::none: break;
    }
    return 1.0;
  }
};
constexpr Face kFaces[] = {Face::x_lo, Face::x_hi, Face::y_lo, Face::y_hi};

// Bisection on the dense output for a sign change of g over the last step.
template <class Stepper, class G>
double localize(const Stepper& st, G&& g, double tol) {
  double a = st.t_prev(), b = st.t();
  double ga = g(st.dense(a));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    const double gm = g(st.dense(mid));
    if (std::fabs(gm) < tol * 1e-2 || std::fabs(b - a) < 1e-15) return mid;
    if ((ga <= 0.0) == (gm <= 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void FlowSettings::validate() const {
  if (!(abs_tol > 0 && rel_tol > 0 && event_tol > 0)) throw ParameterError("tolerances must be positive");
  if (!(min_step < max_step)) throw ParameterError("min_step must be below max_step");
  if (!(max_time > 0)) throw ParameterError("max_time must be positive");
}

std::string to_string(Face f) {
  switch (f) {
    case Face::none: return "none";
    case Face::x_lo: return "x_lo";
    case Face::x_hi: return "x_hi";
    case Face::y_lo: return "y_lo";
    case Face::y_hi: return "y_hi";
  }
  return "?";
}

double Section::event_value(const Vec3& q) const {
  switch (kind) {
    case Kind::plane_x: return q[0] - value;
    case Kind::plane_y:
    case Kind::rectangle: return q[1] - value;
    case Kind::plane_z: return q[2] - value;
  }
  return 0.0;
}

bool Section::accepts(const Vec3& q) const {
  if (kind != Kind::rectangle) return true;
  return q[0] >= lo[0] && q[0] <= hi[0] && q[2] >= lo[1] && q[2] <= hi[1];
}

Trajectory integrate(const ContactModel& m, const ChartPoint& p0, double t_final, const FlowSettings& s,
                     const std::vector<Section>& sections, bool stop_on_event) {
  s.validate();
  if (!m.box().contains(p0)) throw DomainError("initial point outside model box");
  const Box& box = m.box();
  Stepper3 st([&](const Vec3& q) { return reeb_field_unchecked(m, ChartPoint::from(q)); },
              stepper_options(s));
  const double dir = t_final < 0 ? -1.0 : 1.0;
  st.reset(0.0, p0.vec(), dir);

  Trajectory tr;
  tr.t.push_back(0.0);
  tr.samples.push_back(p0);

  while (st.step(t_final)) {
    const Vec3 qa = st.y_prev(), qb = st.y();

    // earliest box exit in this step
    double t_exit = INFINITY;
    Face exit_face = Face::none;
    for (Face f : kFaces) {
      FaceFn fn{f};
      const double ga = fn(box, qa), gb = fn(box, qb);
      if (ga >= 0.0 && gb < 0.0) {
        const double te = localize(st, [&](const Vec3& q) { return fn(box, q); }, s.event_tol);
        if (dir * te < dir * t_exit) {
          t_exit = te;
          exit_face = f;
        }
      }
    }

    // section crossings in this step, in time order
    std::vector<FlowEvent> found;
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const Section& sec = sections[k];
      const double ga = sec.event_value(qa), gb = sec.event_value(qb);
      const bool up = ga < 0.0 && gb >= 0.0;
      const bool down = ga > 0.0 && gb <= 0.0;
      if (!(up || down)) continue;
      const int d = up ? 1 : -1;
      if (sec.direction != 0 && sec.direction != d * int(dir)) continue;
      const double te = localize(st, [&](const Vec3& q) { return sec.event_value(q); }, s.event_tol);
      const Vec3 q = st.dense(te);
      if (!sec.accepts(q)) continue;
      // an event at the exit instant still counts: the face may coincide with the section
      if (std::isfinite(t_exit) && dir * te > dir * t_exit + s.event_tol) continue;
      found.push_back({k, te, ChartPoint::from(q), d});
    }
    std::sort(found.begin(), found.end(), [&](const FlowEvent& a, const FlowEvent& b) { return dir * a.t < dir * b.t; });

    if (!found.empty()) {
      tr.events.insert(tr.events.end(), found.begin(), found.end());
      if (stop_on_event) {
        tr.t.push_back(found.front().t);
        tr.samples.push_back(found.front().p);
        if (std::isfinite(t_exit) && std::fabs(found.front().t - t_exit) <= s.event_tol) tr.exit_face = exit_face;
        return tr;
      }
    }
    if (std::isfinite(t_exit)) {
      tr.t.push_back(t_exit);
      tr.samples.push_back(ChartPoint::from(st.dense(t_exit)));
      tr.exit_face = exit_face;
      return tr;
    }
    tr.t.push_back(st.t());
    tr.samples.push_back(ChartPoint::from(qb));
  }
  return tr;
}

std::variant<Return, Escape> first_return(const ContactModel& m, const ChartPoint& p0, const Section& section,
                                          const FlowSettings& s) {
  Trajectory tr = integrate(m, p0, s.max_time, s, {section}, true);
  if (!tr.events.empty()) {
    const FlowEvent& e = tr.events.front();
    // transversality: derivative of the event function along R
    const Vec3 R = reeb_field_unchecked(m, e.p);
    Vec3 q1 = e.p.vec(), q0 = e.p.vec();
    q1 += 1e-6 * R;
    q0 -= 1e-6 * R;
    const double dg = (section.event_value(q1) - section.event_value(q0)) / 2e-6;
    if (std::fabs(dg) < s.event_tol) throw TangencyError("section crossing is tangential");
    return Return{e.p, e.t};
  }
  return Escape{tr.exit_face, tr.end(), tr.t.back()};
}

FrameField default_frame(const ContactModel& m) {
  return [m](const ChartPoint& p) {
    const Vec3 R = reeb_field_unchecked(m, p);
    const FormJet j = m.jet(p);
    const Vec3 a(j.g, j.f, j.P * std::cos(p.x));
    Vec3 e1 = Vec3::UnitX() - a[0] * R;
    Vec3 e2 = Vec3::UnitY() - a[1] * R;
    const double n1 = e1.squaredNorm();
    if (n1 < 1e-24) throw FrameError("frame vector e1 degenerate");
    e2 -= (e2.dot(e1) / n1) * e1;
    const double w = e1.dot(d_alpha_matrix(m, p) * e2);
    if (std::fabs(w) < 1e-12) throw FrameError("frame is not symplectic");
    const double sc = 1.0 / std::sqrt(std::fabs(w));
    e1 *= sc;
    e2 *= sc * (w > 0 ? 1.0 : -1.0);
    return std::make_pair(e1, e2);
  };
}

Eigen::Matrix3d reeb_jacobian(const ContactModel& m, const ChartPoint& p, double h) {
  Eigen::Matrix3d J;
  const Vec3 q = p.vec();
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    J.col(i) = (reeb_field_unchecked(m, ChartPoint::from(q + e)) - reeb_field_unchecked(m, ChartPoint::from(q - e))) /
               (2.0 * h);
  }
  return J;
}

SymplecticPath linearized_flow(const ContactModel& m, const ChartPoint& p0, double t_final, const FrameField& frame,
                               const FlowSettings& s) {
  s.validate();
  if (!m.box().contains(p0)) throw DomainError("initial point outside model box");
  using V12 = Stepper12::State;
  auto rhs = [&](const V12& u) {
    const ChartPoint p{u[0], u[1], u[2]};
    V12 out;
    out.head<3>() = reeb_field_unchecked(m, p);
    const Eigen::Matrix3d J = reeb_jacobian(m, p);
    Eigen::Map<const Eigen::Matrix3d> Phi(u.data() + 3);
    Eigen::Matrix3d dPhi = J * Phi;
    Eigen::Map<Eigen::Matrix3d>(out.data() + 3) = dPhi;
    return out;
  };
  Stepper12 st(rhs, {s.abs_tol, s.rel_tol, s.max_step, s.min_step});
  V12 u0;
  u0.head<3>() = p0.vec();
  Eigen::Map<Eigen::Matrix3d>(u0.data() + 3) = Eigen::Matrix3d::Identity();
  st.reset(0.0, u0, t_final);

  const auto [f1, f2] = frame(p0);
  auto project = [&](const V12& u) {
    const ChartPoint p{u[0], u[1], u[2]};
    Eigen::Map<const Eigen::Matrix3d> Phi(u.data() + 3);
    const auto [e1, e2] = frame(p);
    const Eigen::Matrix3d D = d_alpha_matrix(m, p);
    Mat2 M;
    for (int c = 0; c < 2; ++c) {
      const Vec3 w = Phi * (c == 0 ? f1 : f2);
      // w = a e1 + b e2 with a = d alpha(w, e2), b = d alpha(e1, w)
      M(0, c) = w.dot(D * e2);
      M(1, c) = e1.dot(D * w);
    }
    const double det = M.determinant();
    if (!(det > 0.0) || std::fabs(det - 1.0) > 1e-6)
      throw NumericalError("linearized flow left Sp(2): determinant drift above 1e-6");
    return Mat2(M / std::sqrt(det));
  };

  SymplecticPath path;
  path.t.push_back(0.0);
  path.M.push_back(Mat2::Identity());
  if (t_final == 0.0) return path;
  while (st.step(t_final)) {
    path.t.push_back(std::fabs(st.t()));
    path.M.push_back(project(st.y()));
  }
  return path;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os.precision(17);
  os << "t,x,y,z\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    os << tr.t[i] << ',' << tr.samples[i].x << ',' << tr.samples[i].y << ',' << tr.samples[i].z << '\n';
  return os.str();
}

}  // namespace reeb
