#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "heatlab/logscalar.hpp"

namespace heatlab {

/// Positive nondecreasing radial function families shared by L(r) and k(r).
namespace family {

/// C r^beta
struct Power {
  double C = 1.0;
  double beta = 0.0;
};

/// C r^beta (ln(e + r))^gamma
struct PowerLog {
  double C = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct Constant {
  double C = 1.0;
};

/// Piecewise linear through (r, value) pairs. Constant below the first
/// node, last slope extrapolated beyond the last node.
struct MonotoneTable {
  std::vector<std::pair<double, double>> points;
};

}  // namespace family

/// k(r) in the curvature condition.
class CurvatureFunction {
 public:
  using Family = std::variant<family::Power, family::PowerLog, family::Constant, family::MonotoneTable>;

  /// Validates parameters; throws std::invalid_argument on a negative
  /// exponent, nonpositive scale or non-monotone table.
  explicit CurvatureFunction(Family f);

  double eval(double r) const;
  /// ln k(e^s), usable where k itself overflows.
  double ln_eval(double s) const;
  const Family& family() const { return family_; }
  std::string describe() const;

 private:
  Family family_;
};

/// L(r) in the growth condition.
class GrowthFunction {
 public:
  /// C r k(2r)
  struct FromCurvature {
    double C = 1.0;
    CurvatureFunction k;
  };
  using Family = std::variant<family::Power, family::PowerLog, family::Constant, family::MonotoneTable,
                              FromCurvature>;

  explicit GrowthFunction(Family f);

  static GrowthFunction power(double C, double beta) { return GrowthFunction(family::Power{C, beta}); }
  static GrowthFunction power_log(double C, double beta, double gamma) {
    return GrowthFunction(family::PowerLog{C, beta, gamma});
  }
  static GrowthFunction constant(double C) { return GrowthFunction(family::Constant{C}); }
  static GrowthFunction table(std::vector<std::pair<double, double>> points) {
    return GrowthFunction(family::MonotoneTable{std::move(points)});
  }
  static GrowthFunction from_curvature(double C, CurvatureFunction k) {
    return GrowthFunction(FromCurvature{C, std::move(k)});
  }

  double eval(double r) const;
  double ln_eval(double s) const;
  const Family& family() const { return family_; }
  /// True for every family with a closed-form Osgood classification.
  bool closed_form() const;
  /// False only for a constant at or below zero, which is fine as a bound to
  /// compare against but not as an Osgood weight or a schedule.
  bool positive() const;
  /// Throws std::invalid_argument unless positive().
  void require_positive(const char* who) const;
  std::string describe() const;

 private:
  Family family_;
};

enum class Verdict { divergent, convergent, inconclusive };
enum class OsgoodMethod { analytic, numeric_doubling };

std::string to_string(Verdict v);
std::string to_string(OsgoodMethod m);

struct OsgoodVerdict {
  Verdict verdict = Verdict::inconclusive;
  OsgoodMethod method = OsgoodMethod::numeric_doubling;
  /// Integral from 1 to probe_radius; for the numeric method the last probe.
  double partial_integral = 0.0;
  double probe_radius = 0.0;
  /// Increments across consecutive doublings (numeric method only).
  std::vector<double> increments;
};

/// Integral of r / L(r) over [1, r_max]; r_max may be +inf (then the integral
/// must converge or QuadratureError is thrown).
double osgood_integral(const GrowthFunction& L, double r_max, double rel_tol = 1e-8);

/// Integral of 1 / k(r) over [1, r_max].
double curvature_integral(const CurvatureFunction& k, double r_max, double rel_tol = 1e-8);

/// Analytic where the family allows it, numeric doubling otherwise.
OsgoodVerdict classify_osgood(const GrowthFunction& L);
OsgoodVerdict classify_curvature(const CurvatureFunction& k);

/// The numeric doubling heuristic alone, for cross-checking the analytic table.
OsgoodVerdict classify_osgood_numeric(const GrowthFunction& L);
OsgoodVerdict classify_curvature_numeric(const CurvatureFunction& k);

/// Doubling-increment test shared by both classifiers: increments[j] is the
/// integral over [2^{k0+j}, 2^{k0+j+1}].
Verdict classify_increments(const std::vector<double>& increments, int k0);

struct Thm2Constants {
  double C_pt = 1.0;
  double a = 1.0;
  double C_vol = 1.0;
  double c_vol = 1.0;
  /// Scale in L(R) = C R k(2R).
  double C_L = 1.0;
};

struct Thm2Envelopes {
  /// exp(C_pt r k(2r)) t^{-a}
  std::function<LogScalar(double r, double t)> pointwise;
  /// C_vol exp(c_vol R k(R))
  std::function<LogScalar(double R)> volume;
  GrowthFunction L;
};

Thm2Envelopes thm2_envelopes(const CurvatureFunction& k, const Thm2Constants& c);

}  // namespace heatlab
