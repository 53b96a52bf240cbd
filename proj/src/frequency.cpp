#include <cmath>
#include <sstream>

#include "skelpot/types.hpp"

namespace skelpot {

Frequency::Frequency(Complex s, Real floor) : s_(s) {
  if (!(s.real() > 0.0) || !std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    std::ostringstream msg;
    msg << "frequency not in right half-plane: s = " << s.real() << (s.imag() < 0 ? "" : "+")
        << s.imag() << "i";
    throw DomainError(msg.str());
  }
  if (s.real() < floor) {
    std::ostringstream msg;
    msg << "below s0 floor: Re s = " << s.real() << " < " << floor;
    throw DomainError(msg.str());
  }
  sqrt_s_ = std::sqrt(s);
  inv_sqrt_s_ = 1.0 / sqrt_s_;
}

Frequency Frequency::polar(Real modulus, Real argument, Real floor) {
  return Frequency(std::polar(modulus, argument), floor);
}

}  // namespace skelpot
