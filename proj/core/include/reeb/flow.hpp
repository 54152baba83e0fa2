#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "reeb/model.hpp"
#include "reeb/cz.hpp"

namespace reeb {

struct FlowSettings {
  double abs_tol = 1e-11;
  double rel_tol = 1e-10;
  double max_time = 100.0;
  double max_step = 0.05;
  double min_step = 1e-13;
  double event_tol = 1e-10;

  void validate() const;
};

enum class Face { none, x_lo, x_hi, y_lo, y_hi };
std::string to_string(Face f);

struct Section {
  enum class Kind { plane_x, plane_y, plane_z, rectangle };
  Kind kind = Kind::plane_y;
  double value = 0.0;
  int direction = 0;  // +1 increasing crossings only, -1 decreasing, 0 both
  // rectangle: lies in plane y = value, x in [lo[0], hi[0]], z in [lo[1], hi[1]]
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};

  static Section plane_y(double c, int dir = 0) { return {Kind::plane_y, c, dir, {}, {}}; }
  static Section plane_x(double c, int dir = 0) { return {Kind::plane_x, c, dir, {}, {}}; }
  static Section plane_z(double c, int dir = 0) { return {Kind::plane_z, c, dir, {}, {}}; }

  double event_value(const Vec3& q) const;
  bool accepts(const Vec3& q) const;  // rectangle bounds; planes accept everything
};

struct FlowEvent {
  std::size_t section = 0;
  double t = 0.0;
  ChartPoint p;
  int direction = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<ChartPoint> samples;
  std::vector<FlowEvent> events;
  Face exit_face = Face::none;

  const ChartPoint& end() const { return samples.back(); }
  double duration() const { return t.back() - t.front(); }
};

// Integrates the Reeb flow from p0 for time t_final (negative means
// backward). Stops at the first box exit, which is localized like a section
// crossing and reported in exit_face. If stop_on_event is set, also stops at
// the first accepted section crossing.
Trajectory integrate(const ContactModel& m, const ChartPoint& p0, double t_final,
                     const FlowSettings& s, const std::vector<Section>& sections = {},
                     bool stop_on_event = false);

struct Escape {
  Face face = Face::none;  // none means max_time was reached
  ChartPoint where;
  double t = 0.0;
};

struct Return {
  ChartPoint p;
  double period = 0.0;
};

// First transverse crossing of the section in forward time.
std::variant<Return, Escape> first_return(const ContactModel& m, const ChartPoint& p0,
                                          const Section& section, const FlowSettings& s);

// An oriented frame (e1, e2) of ker(alpha) with d alpha(e1, e2) = 1.
using FrameField = std::function<std::pair<Vec3, Vec3>(const ChartPoint&)>;

// e1 = dx and e2 = dy projected along R onto ker(alpha), e2 made
// orthogonal to e1, then both scaled so that d alpha(e1, e2) = 1.
FrameField default_frame(const ContactModel& m);

// Linearized Reeb flow on the contact planes, expressed in the frame.
// Samples are taken at every accepted step and at t_final.
SymplecticPath linearized_flow(const ContactModel& m, const ChartPoint& p0, double t_final,
                               const FrameField& frame, const FlowSettings& s);

// Jacobian of the Reeb field by central differences.
Eigen::Matrix3d reeb_jacobian(const ContactModel& m, const ChartPoint& p, double h = 1e-6);

// CSV with header t,x,y,z.
std::string trajectory_csv(const Trajectory& tr);

}  // namespace reeb
