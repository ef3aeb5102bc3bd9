#pragma once

#include <stdexcept>
#include <string>

namespace frameforge {

// Base class for every error the library throws on purpose.
// Anything else escaping the API is a bug.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expansion would materialize more terms than the configured cap.
class CapExceeded : public Error {
public:
  explicit CapExceeded(const std::string& what) : Error(what) {}
};

// A computed quantity exceeds its certified analytic bound. Signals an
// implementation bug, never a tolerable numeric wobble.
class BoundViolated : public Error {
public:
  explicit BoundViolated(const std::string& what) : Error(what) {}
};

// Requested object does not fit inside the grid.
class OutOfRange : public Error {
public:
  explicit OutOfRange(const std::string& what) : Error(what) {}
};

// Declared off-grid decay is too weak for the requested seminorm.
class DecayTooWeak : public Error {
public:
  explicit DecayTooWeak(const std::string& what) : Error(what) {}
};

// No parameters satisfy the inequality system within the caps.
class Infeasible : public Error {
public:
  explicit Infeasible(const std::string& what) : Error(what) {}
};

// An inequality in the certificate chain fails; the message names the
// first failing entry. The reporting variant returns the certificate
// with valid=false instead of throwing.
class ChainBroken : public Error {
public:
  explicit ChainBroken(const std::string& what) : Error(what) {}
};

// An exact polynomial identity failed in a brute-force cross-check.
class MismatchDetected : public Error {
public:
  explicit MismatchDetected(const std::string& what) : Error(what) {}
};

// Least-squares system is numerically rank-deficient.
class SingularSystem : public Error {
public:
  explicit SingularSystem(const std::string& what) : Error(what) {}
};

// A frame stage missed one of its numeric targets.
class StageFailed : public Error {
public:
  explicit StageFailed(const std::string& what) : Error(what) {}
};

// Two frame frequencies coincide.
class CollisionDetected : public Error {
public:
  explicit CollisionDetected(const std::string& what) : Error(what) {}
};

// Change-of-basis matrix too far from identity for Neumann inversion.
class NotDiagonallyDominant : public Error {
public:
  explicit NotDiagonallyDominant(const std::string& what) : Error(what) {}
};

// File could not be read, written, or parsed.
class IoFailed : public Error {
public:
  explicit IoFailed(const std::string& what) : Error(what) {}
};

}  // namespace frameforge
