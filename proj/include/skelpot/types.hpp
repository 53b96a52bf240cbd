#ifndef SKELPOT_TYPES_HPP
#define SKELPOT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace skelpot {

using Real = double;
using Complex = std::complex<double>;

using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using IMatrix = Eigen::MatrixXi;
using RSparse = Eigen::SparseMatrix<Real>;
using CSparse = Eigen::SparseMatrix<Complex>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that cannot be parsed; message carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Mismatch between a field and the space an operation expects.
class SpaceError : public Error {
 public:
  using Error::Error;
};

// A violated internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

// Laplace-domain frequency with Re s > 0 and cached principal square roots.
class Frequency {
 public:
  explicit Frequency(Complex s, Real floor = 0.0);

  Complex value() const { return s_; }
  Complex sqrt() const { return sqrt_s_; }
  Complex inv_sqrt() const { return inv_sqrt_s_; }
  Complex square() const { return s_ * s_; }
  Real abs() const { return std::abs(s_); }
  Real real() const { return s_.real(); }
  // Rotation mu = s/|s| that makes the sesquilinear form coercive.
  Complex rotation() const { return s_ / std::abs(s_); }

  static Frequency polar(Real modulus, Real argument, Real floor = 0.0);

 private:
  Complex s_;
  Complex sqrt_s_;
  Complex inv_sqrt_s_;
};

enum class Side { Minus, Plus };

}  // namespace skelpot

#endif
