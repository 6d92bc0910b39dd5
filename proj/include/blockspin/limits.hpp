// Limiting objects of the model: Gaussian and quartic fluctuation laws,
// Dirac mixtures for the law of large numbers, large-deviation rate
// functions and the mean-field fixed-point structure behind them.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "blockspin/model.hpp"

namespace blockspin {

struct Gaussian1D {
  double mean = 0.0;
  double variance = 1.0;

  double cdf(double x) const;
};

struct Gaussian2D {
  std::array<double, 2> mean{};
  std::array<std::array<double, 2>, 2> cov{};
};

// Limit covariance of (sqrt(n) m1, sqrt(n) m2) below the critical line:
// s^2 [[1, r], [r, 1]] with s^2 = (8 - 4 beta)/((2 - beta)^2 - alpha^2) and
// r = alpha / (2 - beta).  Requires 0 <= alpha < beta and alpha + beta < 2.
Gaussian2D clt_covariance(double alpha, double beta);

// Limit covariance of the rotated pair sqrt(n) ((m1+m2)/2, (m1-m2)/2):
// diag(1/(1-(alpha+beta)/2), 1/(1-(beta-alpha)/2)).  Same hypotheses.
Gaussian2D w_covariance(double alpha, double beta);

// Law with density exp(-x^4/12) / normalizer.
struct QuarticLaw {
  double normalizer = 0.0;

  double pdf(double x) const;
};

double quartic_normalizer();     // integral of exp(-x^4/12) over the line
double quartic_pdf(double x);
double quartic_cdf(double x);    // absolute error <= 1e-10
double quartic_second_moment();

// Limit laws on the critical line alpha + beta == 2 (exact comparison),
// alpha < beta: the quartic law of n^{1/4} m1 and the centered Gaussian of
// (sqrt(n)/2)(m1 - m2) with variance 2/(2 - (beta - alpha)).
std::pair<QuarticLaw, Gaussian1D> critical_laws(double alpha, double beta);

// Binary entropy rate ((1+x) log(1+x) + (1-x) log(1-x))/2; +infinity
// outside [-1, 1], log 2 at the endpoints.
double entropy_rate_I(double x);

// Rate function of the block spin-sum pair (v1, v2) = (S1/n, S2/n) under
// the symmetric product reference measure: (I(2 x1) + I(2 x2))/2.
double rate_J(double x1, double x2);

// The same function obtained through its Legendre dual
// sup_t [<t, x> - (log cosh(t1) + log cosh(t2))/2], with the suprema solved
// numerically.  Agreement with rate_J is a correctness check, not a faster
// path.
double rate_J_variational(double x1, double x2);

// Largest solution of tanh(theta m) = m; zero when theta <= 1.  The
// residual at the returned point is below 1e-12.
double cw_equation_solve(double theta);

struct WeightedAtom {
  double m1;
  double m2;
  double weight;
};

struct DiracMixture {
  std::vector<WeightedAtom> atoms;
};

// Limit law of (m1, m2): a Dirac at the origin up to the critical line, a
// symmetric two-atom mixture on the diagonal when the blocks interact, and
// a four-atom mixture when alpha == 0 lets them decouple.
DiracMixture limit_mixture(double alpha, double beta);

// F(x) - J(x): the quadratic interaction term of the couplings minus the
// two-block entropy rate.  Its maximizers over [-1, 1]^2 are the limit
// magnetizations; -infinity outside the square.
double tilted_objective(double alpha, double beta, double x1, double x2);

struct FixedPoint {
  double x1;
  double x2;
};

// Stationary points of tilted_objective, i.e. solutions of
//   artanh(x1) = (beta x1 + alpha x2)/2,  artanh(x2) = (alpha x1 + beta x2)/2.
// Nonzero diagonal solutions come from iterating the inverse of
// f(x) = (2/alpha)(artanh(x) - beta x/2) on its increasing branch, then a
// Newton polish; results are sorted lexicographically.
std::vector<FixedPoint> mean_field_fixed_points(double alpha, double beta);

enum class Definiteness { NegativeDefinite, PositiveDefinite, Indefinite, Degenerate };

const char* definiteness_name(Definiteness d);

struct SymmetricMatrix2 {
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;

  std::array<double, 2> eigenvalues() const;  // ascending
};

struct HessianResult {
  SymmetricMatrix2 matrix;
  Definiteness definiteness;
};

// Hessian of tilted_objective at an interior point, classified with an
// eigenvalue tolerance of 1e-12.
HessianResult hessian_tilted_objective(double alpha, double beta, double x1, double x2);

// Rate function of the block magnetization pair, normalized to vanish on
// the limit set:  J_m(x) = sup(tilted_objective) - tilted_objective(x).
// The supremum is resolved once per instance from the mean-field fixed
// points plus a dense grid screen.
class TiltedRate {
 public:
  TiltedRate(double alpha, double beta);

  double operator()(double x1, double x2) const;  // J_m at (x1, x2)

  // Rate of the per-spin block sums (v1, v2) = (m1/2, m2/2): J_v(v) = J_m(2v).
  double in_v_coordinates(double v1, double v2) const;

  double sup_value() const { return sup_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
  double sup_;
};

// One-shot conveniences; each call constructs a TiltedRate.
double rate_Jm(double alpha, double beta, double x1, double x2);
double rate_Jv(double alpha, double beta, double v1, double v2);

}  // namespace blockspin
