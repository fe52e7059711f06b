#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qbell {

/// A point in single-mode phase space (a complex displacement amplitude).
/// Components must be finite; NaN/Inf are rejected at construction.
class PhasePoint {
 public:
  PhasePoint() = default;
  PhasePoint(double re, double im) : re_(re), im_(im) {
    if (!std::isfinite(re) || !std::isfinite(im))
      throw std::domain_error("PhasePoint: components must be finite");
  }
  explicit PhasePoint(std::complex<double> v) : PhasePoint(v.real(), v.imag()) {}

  double re() const noexcept { return re_; }
  double im() const noexcept { return im_; }
  std::complex<double> value() const noexcept { return {re_, im_}; }
  double abs() const noexcept { return std::hypot(re_, im_); }

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

/// Quasiprobability order parameter. Only the non-positive range is
/// meaningful here (the weights ((s+1)/(s-1))^n are unbounded for s > 0),
/// so construction rejects s > 0.
class SParameter {
 public:
  SParameter() = default;
  explicit SParameter(double s) : s_(s) {
    if (!std::isfinite(s)) throw std::domain_error("SParameter: s must be finite");
    if (s > 0.0) throw std::domain_error("SParameter: s must be <= 0");
  }
  double value() const noexcept { return s_; }

  /// Geometric weight base (s+1)/(s-1); lies in (-1, 1] for s <= 0.
  double weight_base() const noexcept { return (s_ + 1.0) / (s_ - 1.0); }

 private:
  double s_ = 0.0;
};

/// The four displacements chosen by the two parties.
struct MeasurementSettings {
  PhasePoint alpha1, alpha2, beta1, beta2;
};

/// Target order parameter plus overall detection efficiency eta = eta_d * T.
struct BellContext {
  SParameter s;
  double eta = 1.0;

  BellContext() = default;
  BellContext(SParameter s_in, double eta_in) : s(s_in), eta(eta_in) {
    if (!(eta_in > 0.0) || eta_in > 1.0 || !std::isfinite(eta_in))
      throw std::domain_error("BellContext: eta must lie in (0, 1]");
  }
};

/// Signed Bell expectation value. |value| > 2 certifies a violation of
/// the local-realistic bound.
struct BellValue {
  double value = 0.0;
  double magnitude = 0.0;
  bool violated = false;

  static BellValue from(double v) {
    BellValue b;
    b.value = v;
    b.magnitude = std::fabs(v);
    b.violated = b.magnitude > 2.0;
    return b;
  }
};

/// Thrown when a threshold search finds no violation on the search interval.
class NoViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a truncated Pi series is too short for the requested inputs.
class InadequateCutoffError : public std::runtime_error {
 public:
  InadequateCutoffError(const std::string& msg, double contribution)
      : std::runtime_error(msg), last_term_contribution(contribution) {}
  double last_term_contribution = 0.0;
};

/// Parses "a", "a+bi", "a-bi", "bi" (and bare "i" / "-i").
std::complex<double> parse_complex(const std::string& text);

/// Formats with 17 significant digits; pure reals stay bare, so output
/// round-trips through parse_complex.
std::string format_complex(std::complex<double> z);

}  // namespace qbell
