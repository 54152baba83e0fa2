#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace reeb {

using Vec2 = Eigen::Vector2d;
using Mat2d = Eigen::Matrix2d;

enum class FiberKind { horizontal, vertical };

// Image of [0,1]^2 under the Coons patch spanned by four boundary
// polylines. bottom/top run s = 0..1, left/right run t = 0..1; corners must
// agree. Fibres are the images of {s} x [0,1] (vertical) or [0,1] x {t}.
struct Rect {
  std::vector<Vec2> bottom, top, left, right;
  FiberKind fiber = FiberKind::horizontal;

  static Rect box(double x0, double x1, double z0, double z1, FiberKind fiber);

  // Throws PreconditionError on mismatched corners or degenerate polylines.
  void validate() const;
  Vec2 at(double s, double t) const;
  Mat2d jacobian(double s, double t) const;  // columns d/ds, d/dt
  // Patch coordinates of p, if Newton inversion converges.
  std::optional<Vec2> locate(const Vec2& p) const;
  bool contains(const Vec2& p, double tol = 0.0) const;
  // Unit tangent of the fibre through (s, t).
  Vec2 fiber_tangent(double s, double t) const;
  void bounds(double& x0, double& x1, double& z0, double& z1) const;

 private:
  bool is_box() const;
};

// {w : |<w,v>| < width |<w,u>|} with u the unit direction at angle `angle`.
struct ConeSpec {
  double angle = 0.0;
  double width = 0.1;

  static ConeSpec horizontal(double w) { return {0.0, w}; }
  static ConeSpec vertical(double w);
  // Slack width*|<w,u>| - |<w,v>| for unit w; positive inside.
  double slack(const Vec2& w) const;
  bool contains(const Vec2& w) const { return slack(w) > 0.0; }
  Vec2 axis() const;
  Vec2 edge(int side) const;  // boundary rays, side = +1 or -1
};

// Image of cone c under L sits inside target, with the minimal normalized
// slack over the two boundary rays (negative when it does not).
double cone_image_margin(const Mat2d& L, const ConeSpec& c, const ConeSpec& target);
// min |L w| / |w| over w in the cone (angular sampling, edges included).
double cone_min_stretch(const Mat2d& L, const ConeSpec& c, int samples = 65);

enum class BranchKind { drift, rectangle };

struct Branch {
  std::string label;
  BranchKind kind = BranchKind::rectangle;
  Rect dom, im;
  // Formulas are valid on a neighbourhood of dom (resp. im for inverse).
  std::function<Vec2(const Vec2&)> eval;
  std::function<Mat2d(const Vec2&)> diff;     // optional: central differences otherwise
  std::function<Vec2(const Vec2&)> inverse;   // optional
  std::function<double(const Vec2&)> return_time;
  double nominal_time = 0.0;                  // T(a_j) for manifold branches
  int strip = 0;                              // drift branches: k of the strip X_k
  std::optional<double> d_dom_angle, d_im_angle;  // segments D_1, D_2

  Mat2d differential(const Vec2& p) const;
};

struct SectionMapModel {
  std::string name;
  double lambda = 0.3;
  double z_max = 0.5;
  std::vector<Branch> branches;

  // Index of the branch whose domain holds p, or -1.
  int branch_at(const Vec2& p) const;
  std::vector<int> rectangle_branches() const;  // in declaration order
  // Checks domain disjointness and injectivity on an n x n sample grid.
  void validate(int n = 24) const;
};

// Section geometry for 0 < lambda < pi/8.
int r_lambda_component(double x, double lambda);        // -1..4 or -99
int q_lambda_strip(double x, double lambda);            // 0..2 or -99
bool in_r_lambda(const Vec2& p, double lambda, double z_max);
bool in_q_lambda(const Vec2& p, double lambda, double z_max);
bool in_x_region(const Vec2& p, double z_max);
bool in_y_region(const Vec2& p, double z_max);

struct Condition {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct HyperbolicCertificate {
  std::vector<Condition> conditions;

  bool passed() const;
  const Condition* find(const std::string& name) const;
  void add(const std::string& name, double margin);
};

nlohmann::json certificate_json(const HyperbolicCertificate& c);

// Manifold side: drift branches in Q_lambda, rectangle branches with
// horizontal fibres that the map reverses.
HyperbolicCertificate verify_k_hyperbolic(const SectionMapModel& psi, double lambda, int sample_n = 64);

// Domination by (mu, nu, tau) of the rectangle branches. Branches must
// carry their D segments. Throws PreconditionError without them.
HyperbolicCertificate verify_dominated(const SectionMapModel& psi, double mu, double nu, double tau,
                                       int sample_n = 64);

// Bypass side: drift branches as above, rectangle branches from X to Y with
// vertical fibres, as wide as their R_lambda component.
HyperbolicCertificate verify_hyperbolic_bypass(const SectionMapModel& phi, double lambda, int sample_n = 64);

// Domination by (nu, tau, A, eta) of the bypass rectangle branches.
HyperbolicCertificate verify_bypass_dominated(const SectionMapModel& phi, double nu, double tau, double A,
                                              double eta, int sample_n = 64);

struct SyntheticParams {
  double lambda = 0.3;
  double nu = 0.2;
  double tau = 1.0;
  double A = 1.0;
  double eta = 0.1;
  double z_max = 0.5;
  std::vector<double> periods{1.0, 1.3};  // T(a_1), T(a_2)
  double psi_width = 0.35;                // width of dom(psi_j)
  double mu = 0.3;                        // domination cone of the manifold side

  // Throws ParameterError on infeasible values.
  void validate() const;
  double sigma() const;  // stretch of the bypass branches
};

// Bypass map: drift on the strips of Q_lambda plus four branches phi_{i,j}
// from component i of [0, pi] to component 2+j, each stretching vertical
// fibres by sigma onto full width.
SectionMapModel synthetic_bypass_map(const SyntheticParams& p);
// Manifold map: drift plus psi_j from component 2+j back to component j
// (j = 0, 1), with return time close to periods[j].
SectionMapModel synthetic_manifold_map(const SyntheticParams& p);

// F_a = psi_{i_k} o phi_B o ... o psi_{i_1} o phi_B restricted to R_lambda.
// Letters are 1-based indices into psi.rectangle_branches().
class CompositeMap {
 public:
  CompositeMap(const SectionMapModel& phi, const SectionMapModel& psi, std::vector<int> word);

  const std::vector<int>& word() const { return word_; }
  // Image of p, or nullopt when p leaves the composite domain.
  std::optional<Vec2> operator()(const Vec2& p) const;
  std::optional<Mat2d> differential(const Vec2& p) const;
  std::optional<double> return_time(const Vec2& p) const;
  // Orbit points p_0 = p, p_1, ..., p_k, or nullopt.
  std::optional<std::vector<Vec2>> orbit(const Vec2& p) const;

  // Branch itinerary: for letter m, the phi branch and psi branch used.
  // Empty optional when some letter has no compatible phi branch.
  struct Step {
    int phi_branch = -1;
    int psi_branch = -1;
  };
  const std::vector<Step>& steps() const { return steps_; }
  bool itinerary_ok() const { return ok_; }

  // A point of the domain on the fibre at relative position s of the first
  // letter's component, whose image sits at relative height u of the last
  // image rectangle. Found by sweeping (forward in x, backward in z).
  // nullopt when the domain is empty.
  std::optional<Vec2> domain_point(double s = 0.5, double u = 0.5) const;

  const SectionMapModel& phi() const { return *phi_; }
  const SectionMapModel& psi() const { return *psi_; }

 private:
  const SectionMapModel* phi_;
  const SectionMapModel* psi_;
  std::vector<int> word_;
  std::vector<Step> steps_;
  bool ok_ = true;
};

CompositeMap compose_word_map(const SectionMapModel& phi, const SectionMapModel& psi, const std::vector<int>& word);

struct FixedPoint {
  Vec2 p;
  std::vector<Vec2> orbit;  // p_0 .. p_{k-1}
  double period = 0.0;      // accumulated return time
  double residual = 0.0;    // max per-letter shooting residual
  bool used_fallback = false;
  double stretch = 0.0;     // certified a
  double cone_margin = 0.0;
};

struct FixedPointOptions {
  double A = 1.0;
  double nu = 0.2;
  int grid = 32;
  double tol = 1e-12;
  int max_newton = 50;
  std::optional<Vec2> seed;  // default: domain centre
};

// Unique fixed point of a cyclic word map. Hypotheses (cone invariance and
// stretch a > 2 of F and F^-1) are sampled on a grid x grid mesh over each
// letter's domain. Throws HypothesisError if they fail and NumericalError
// if neither Newton nor the sweep converges.
FixedPoint unique_fixed_point(const CompositeMap& F, const FixedPointOptions& opt = {});

// Re-solves from `seeds` random points of dom(F) (each used as Newton seed)
// and returns the largest distance to fp.p. Deterministic in rng_seed.
double multi_seed_spread(const CompositeMap& F, const FixedPoint& fp, int seeds, unsigned long rng_seed,
                         const FixedPointOptions& opt = {});

// Same for a bare map on [0,1]^2 given with its differential.
Vec2 unique_fixed_point_plain(const std::function<Vec2(const Vec2&)>& F,
                              const std::function<Mat2d(const Vec2&)>& dF, const Vec2& seed, double tol = 1e-13);

struct EscapeReport {
  int strip = 0;
  bool backward = true;          // preimage scheme (p-sequence) or image scheme
  std::vector<double> z;         // z along the scheme
  int exit_iteration = -1;       // first index with no well-defined next point
  bool monotone = true;
  int direction = 0;             // +1 increasing, -1 decreasing
  std::optional<int> violation;  // index of the first non-monotone step
};

// Alternating scheme p_{2l+1} = psi^-1(p_{2l}), p_{2l+2} = phi^-1(p_{2l+1})
// for (k odd, z >= 0) or (k even, z <= 0); the forward scheme
// q_{2l+1} = phi(q_{2l}), q_{2l+2} = psi(q_{2l+1}) otherwise.
// Throws PreconditionError if p is not in Q_lambda.
EscapeReport q_lambda_escape(const SectionMapModel& phi, const SectionMapModel& psi, const Vec2& p, int max_iter = 10000);

struct HorseshoeOrbit {
  std::vector<int> word;        // canonical rotation
  std::vector<int> root;
  double action = 0.0;          // l(a)
  std::optional<FixedPoint> fp;
  std::string error;
  double window_lo = 0.0, window_hi = 0.0;
  bool in_window = false;
  int cz = 0;                   // sum of the letter indices mu~ (one each)
};

// All cyclic words on the psi letters with action < K (words within 1e-6
// below K count as K), solved in parallel.
std::vector<HorseshoeOrbit> horseshoe_orbits(const SectionMapModel& phi, const SectionMapModel& psi, double K,
                                             double tau, const FixedPointOptions& opt = {});

std::string fixed_points_csv(const std::vector<HorseshoeOrbit>& orbits);

}  // namespace reeb
