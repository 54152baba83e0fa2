#pragma once

#include <stdexcept>
#include <string>

namespace reeb {

// Base for every failure the library reports. Callers that only care about
// "did it work" catch this; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class SingularityError : public Error { using Error::Error; };
class StiffnessError : public Error { using Error::Error; };
class TangencyError : public Error { using Error::Error; };
class FrameError : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class DegeneracyError : public Error { using Error::Error; };
class BoundaryError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class HypothesisError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };

}  // namespace reeb
