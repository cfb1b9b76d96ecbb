#pragma once

#include <stdexcept>
#include <string>

namespace llgs {

// Base of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside a function's mathematical domain (invalid parameters, theta off [0, pi], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The singular coordinate system was evaluated too close to a pole; switch to the desingularized one.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class PoleEvaluation : public Error {
 public:
  using Error::Error;
};

// Chart flow was asked to evolve a point that sits on an equilibrium.
class EquilibriumInput : public Error {
 public:
  using Error::Error;
};

class PoleCrossing : public Error {
 public:
  using Error::Error;
};

class OrientationError : public Error {
 public:
  using Error::Error;
};

class CurvePole : public Error {
 public:
  using Error::Error;
};

class InvariantLine : public Error {
 public:
  using Error::Error;
};

class RegimeError : public Error {
 public:
  using Error::Error;
};

class ChartMiss : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  using Error::Error;
};

class SpectralMismatch : public Error {
 public:
  using Error::Error;
};

class NoConnection : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class PhaseDegeneracy : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace llgs
