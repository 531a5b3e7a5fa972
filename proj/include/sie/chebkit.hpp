#ifndef SIE_CHEBKIT_HPP
#define SIE_CHEBKIT_HPP

#include <functional>
#include "json.hpp"

#include "sie/core.hpp"

namespace sie {

enum class GridKind { first, second };

struct GridSample {
  GridKind kind = GridKind::first;
  std::vector<double> nodes;
  CVec values;
};

struct CoeffExpansion {
  Basis basis = Basis::T();
  Segment segment;
  CVec coeffs;

  CoeffExpansion() = default;
  CoeffExpansion(Basis b, CVec c, Segment s = Segment()) : basis(b), segment(s), coeffs(std::move(c)) {}

  std::size_t size() const { return coeffs.size(); }
  cplx coeff(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : cplx(0.0); }
  cplx operator()(cplx x) const;
};

std::vector<double> cheb_points(GridKind kind, std::size_t n);

CoeffExpansion values_to_coeffs(const GridSample& sample);
GridSample coeffs_to_values(const CoeffExpansion& e, GridKind kind, std::size_t n);

// Raw transforms on [-1,1] node orderings produced by cheb_points.
CVec values_to_coeffs(GridKind kind, const CVec& values);
CVec coeffs_to_values(GridKind kind, const CVec& coeffs, std::size_t n);

// Evaluation in the local variable t (no segment map).
cplx clenshaw_T(const CVec& c, cplx t);
cplx clenshaw_C(const CVec& c, int lambda, cplx t);
cplx eval_local(const CoeffExpansion& e, cplx t);
cplx eval(const CoeffExpansion& e, cplx x);
bool endpoint_singular(const CoeffExpansion& e, cplx x);

// sqrt(1-t) * sqrt(1+t) with principal branches; real positive on (-1,1).
cplx weight_sqrt(cplx t);

struct FitOptions {
  std::size_t initial = 16;
  std::size_t max_length = std::size_t(1) << 20;
};

using ScalarFunction = std::function<cplx(cplx)>;

// f is evaluated at global points of the segment.
CoeffExpansion adaptive_fit(const ScalarFunction& f, double tol, const Segment& seg = Segment(),
                            const FitOptions& opt = FitOptions());

std::size_t chop(const CVec& coeffs, double tol);
std::size_t chop_absolute(const CVec& coeffs, double threshold);
CoeffExpansion chopped(const CoeffExpansion& e, double tol);

double max_abs(const CVec& v);

// Modified series T^_0 = 1, T^_1 = x, T^_n = T_n - T_{n-2}.
CVec from_modified(const CVec& mt);
CVec to_modified(const CVec& t);

nlohmann::json to_json(const CoeffExpansion& e);
CoeffExpansion expansion_from_json(const nlohmann::json& j);

}  // namespace sie

#endif
