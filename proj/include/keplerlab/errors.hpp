// Exception types raised by the library.
#pragma once

#include <stdexcept>
#include <string>

namespace keplerlab {

/// Base class for every numerical or model error raised by keplerlab.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A position came closer to the gravitational center than the singularity floor.
class DomainError : public Error {
public:
    DomainError(const std::string& what, double radius) : Error(what), radius_(radius) {}
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// Energy is non-negative, so there is no ellipse to describe.
class UnboundOrbit : public Error {
public:
    using Error::Error;
};

/// Zero angular momentum: the orbit degenerates to a collision line.
class DegenerateOrbit : public Error {
public:
    using Error::Error;
};

/// An iterative solve (Newton for implicit steps or Kepler's equation) did not converge.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// The velocity Hessian of a modified Lagrangian is too ill-conditioned to invert.
class SingularMassMatrix : public Error {
public:
    SingularMassMatrix(const std::string& what, double condition) : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A precession fit was requested on fewer than two revolutions of data.
class TooFewRevolutions : public Error {
public:
    TooFewRevolutions(const std::string& what, double revolutions) : Error(what), revolutions_(revolutions) {}
    double revolutions() const noexcept { return revolutions_; }

private:
    double revolutions_;
};

/// Values passed to a log-log fit change sign or vanish.
class SignChange : public Error {
public:
    using Error::Error;
};

}  // namespace keplerlab
