#include "qbell/types.hpp"

#include <cstdio>
#include <cstdlib>

#include "qbell/state.hpp"

namespace qbell {

namespace {

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + text.size() && std::isfinite(out);
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
  std::string t;
  t.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw std::domain_error("empty complex literal");

  if (t.back() != 'i' && t.back() != 'I') {
    double re;
    if (!parse_double(t, re)) throw std::domain_error("bad complex literal: " + text);
    return {re, 0.0};
  }

  t.pop_back();  // strip the trailing i
  // Split at the last +/- that is not an exponent sign and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](std::string part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    double im;
    if (!parse_double(part, im)) throw std::domain_error("bad complex literal: " + text);
    return im;
  };
  if (split == std::string::npos) return {0.0, imag_of(t)};
  double re;
  if (!parse_double(t.substr(0, split), re))
    throw std::domain_error("bad complex literal: " + text);
  return {re, imag_of(t.substr(split))};
}

std::string format_complex(std::complex<double> z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", z.real());
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

std::string state_name(const StateModel& state) {
  if (std::holds_alternative<SinglePhotonEntangled>(state)) return "single-photon";
  if (std::holds_alternative<Tmss>(state)) return "tmss";
  return "generic-fock";
}

}  // namespace qbell
