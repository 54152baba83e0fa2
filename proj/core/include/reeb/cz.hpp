#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reeb {

using Mat2 = Eigen::Matrix2d;

// Sampled path in Sp(2). M[0] is the identity.
struct SymplecticPath {
  std::vector<double> t;
  std::vector<Mat2> M;

  std::size_t size() const { return t.size(); }
  const Mat2& end() const { return M.back(); }

  // Throws PreconditionError when an invariant fails.
  void validate() const;

  std::string to_csv() const;  // rows t,m11,m12,m21,m22
  static SymplecticPath from_csv(const std::string& text);
};

enum class AngleVariant {
  polar,     // angle of the orthogonal factor in M = S O
  image_e1,  // argument of M e1
};

// Unwrapped from theta(0) = 0. Throws ResolutionError when two consecutive
// samples differ by more than pi/2.
std::vector<double> rotation_angle(const SymplecticPath& path, AngleVariant v);

// Angle of the orthogonal factor of a 2x2 matrix with positive determinant.
double polar_angle(const Mat2& M);

struct CzResult {
  int mu = 0;
  double theta_end = 0.0;       // polar angle at the end of the given path
  double theta_extended = 0.0;  // after the canonical extension
  double residual = 0.0;        // |theta_extended/pi - mu|
};

// Extends the path inside Sp* to -I (trace < 2) or diag(2, 1/2)
// (trace > 2) and reads off theta/pi. Throws DegeneracyError when
// |det(M_end - I)| <= 1e-8.
CzResult conley_zehnder_detail(const SymplecticPath& path);
int conley_zehnder(const SymplecticPath& path);

struct MuTilde {
  int value = 0;
  double theta = 0.0;
  bool boundary_warning = false;
};

// Integer with theta(duration) in (pi*mu, pi*(mu+1)], theta from the image of e1.
MuTilde mu_tilde(const SymplecticPath& path, double duration);

enum class Parity { even, odd };
enum class OrbitType { hyperbolic, elliptic };

struct OrbitParity {
  Parity parity = Parity::even;
  OrbitType type = OrbitType::hyperbolic;
  double lambda1 = 0.0, lambda2 = 0.0;  // hyperbolic eigenvalues, |lambda1| >= 1
  double rho = 0.0, arg = 0.0;          // elliptic: modulus and argument in (0, pi)

  bool negative_hyperbolic() const {
    return type == OrbitType::hyperbolic && parity == Parity::odd;
  }
};

std::string to_string(Parity p);
std::string to_string(OrbitType t);

// Throws PreconditionError for |det - 1| >= 1e-6 and DegeneracyError for
// |trace| within 1e-9 of 2.
OrbitParity classify(const Mat2& M);

// The m-th cover is bad exactly when the primitive is negative hyperbolic
// and m is even.
bool is_good(const OrbitParity& primitive, int m);

int word_index(const std::vector<std::string>& word, const std::map<std::string, int>& mu_tildes);

// Reading mu off the end angle alpha of M e1: for odd mu and
// alpha in [2k pi + pi/2, 2k pi + 3pi/2] the index is 2k+1; for even mu and
// alpha in [2k pi - pi/2, 2k pi + pi/2] it is 2k. applicable is false when
// alpha falls outside the window of the parity of mu.
struct Localization {
  bool applicable = false;
  int predicted = 0;
  int mu = 0;
  bool holds() const { return !applicable || predicted == mu; }
};
Localization localize_index(const SymplecticPath& path);

// Hyperbolicity from cones: R e1 in C(e1, tan nu), |R e1| >= 3, and f, R f
// both in C(e2, tan theta0). When these hold, returns the predicted sign of
// the (real) eigenvalues, sign <e1, R e1>; nullopt otherwise.
std::optional<int> cone_eigen_sign(const Mat2& R, double nu, double theta0, const Eigen::Vector2d& f);

}  // namespace reeb
