#ifndef SIE_CORE_HPP
#define SIE_CORE_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sie {

using cplx = std::complex<double>;
using index_t = std::ptrdiff_t;
using CVec = std::vector<cplx>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

enum class ErrorKind {
  invalid_argument,
  unsupported_basis,
  resolution_failure,
  singular_system,
  cache_mismatch,
  splitting_mismatch,
  not_nonnegative_definite,
  on_contour,
  singular_argument,
  config_error
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ResolutionFailure : public Error {
 public:
  ResolutionFailure(const std::string& what, double tail)
      : Error(ErrorKind::resolution_failure, what), tail_(tail) {}
  double tail_estimate() const { return tail_; }

 private:
  double tail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Graded bases. U is stored as ultraspherical with lambda = 1.
enum class BasisKind { T, C, WT, WU, MT };

struct Basis {
  BasisKind kind = BasisKind::T;
  int lambda = 0;  // only meaningful for C

  static Basis T() { return {BasisKind::T, 0}; }
  static Basis U() { return {BasisKind::C, 1}; }
  static Basis C(int lam);
  static Basis WT() { return {BasisKind::WT, 0}; }
  static Basis WU() { return {BasisKind::WU, 0}; }
  static Basis MT() { return {BasisKind::MT, 0}; }

  // ultraspherical order seen by multiplication/conversion: T and MT -> 0
  int order() const { return kind == BasisKind::C ? lambda : 0; }
  bool operator==(const Basis& o) const {
    return kind == o.kind && (kind != BasisKind::C || lambda == o.lambda);
  }
  bool operator!=(const Basis& o) const { return !(*this == o); }
  std::string name() const;
  static Basis parse(const std::string& s);
};

// Straight segment x(t) = (a+b)/2 + (b-a)/2 t, t in [-1,1].
struct Segment {
  cplx a{-1.0, 0.0};
  cplx b{1.0, 0.0};

  Segment() = default;
  Segment(cplx a_, cplx b_);

  cplx center() const { return 0.5 * (a + b); }
  cplx half() const { return 0.5 * (b - a); }
  double half_length() const { return 0.5 * std::abs(b - a); }
  cplx tangent() const { return (b - a) / std::abs(b - a); }
  cplx normal() const { return cplx(0.0, 1.0) * tangent(); }
  cplx to_global(cplx t) const { return center() + half() * t; }
  cplx to_local(cplx x) const { return (x - center()) / half(); }
  bool canonical() const { return a == cplx(-1.0, 0.0) && b == cplx(1.0, 0.0); }
  bool operator==(const Segment& o) const { return a == o.a && b == o.b; }
};

// Scheduling switch shared by the kernels that have both a serial reference
// and an OpenMP version.
enum class Exec { serial, parallel };

}  // namespace sie

#endif
