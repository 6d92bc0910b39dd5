#include "blockspin/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace blockspin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double artanh(double x) { return 0.5 * std::log((1.0 + x) / (1.0 - x)); }

// log cosh without overflow: for large |x|, cosh x ~ e^{|x|}/2.
double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double simpson(double fa, double fm, double fb, double width) {
  return width / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa,
                        double b, double fb, double m, double fm, double whole,
                        double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  return adaptive_simpson(f, a, fa, b, fb, m, fm, simpson(fa, fm, fb, b - a), tol, 48);
}

void require_gaussian_regime(double alpha, double beta) {
  validate_couplings(alpha, beta);
  if (!(alpha < beta)) {
    throw std::invalid_argument("fluctuation laws require alpha < beta");
  }
  if (alpha + beta >= 2.0) {
    throw std::invalid_argument("gaussian fluctuations require alpha + beta < 2");
  }
}

double quartic_density_unnormalized(double x) {
  const double x2 = x * x;
  return std::exp(-(x2 * x2) / 12.0);
}

}  // namespace

double Gaussian1D::cdf(double x) const {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

Gaussian2D clt_covariance(double alpha, double beta) {
  require_gaussian_regime(alpha, beta);
  const double s2 = (8.0 - 4.0 * beta) / ((2.0 - beta) * (2.0 - beta) - alpha * alpha);
  const double r = alpha / (2.0 - beta);
  Gaussian2D g;
  g.cov = {{{s2, s2 * r}, {s2 * r, s2}}};
  return g;
}

Gaussian2D w_covariance(double alpha, double beta) {
  require_gaussian_regime(alpha, beta);
  Gaussian2D g;
  g.cov = {{{1.0 / (1.0 - 0.5 * (alpha + beta)), 0.0},
            {0.0, 1.0 / (1.0 - 0.5 * (beta - alpha))}}};
  return g;
}

double QuarticLaw::pdf(double x) const {
  return quartic_density_unnormalized(x) / normalizer;
}

double quartic_normalizer() {
  // The integrand is below exp(-1700) past |x| = 12, far under the target
  // tolerance, so the infinite tails are dropped.
  static const double z =
      2.0 * integrate(quartic_density_unnormalized, 0.0, 12.0, 1e-13);
  return z;
}

double quartic_pdf(double x) { return quartic_density_unnormalized(x) / quartic_normalizer(); }

double quartic_cdf(double x) {
  if (x <= -12.0) return 0.0;
  if (x >= 12.0) return 1.0;
  const double half_mass =
      integrate(quartic_pdf, 0.0, std::abs(x), 1e-11);
  const double value = x >= 0.0 ? 0.5 + half_mass : 0.5 - half_mass;
  return std::clamp(value, 0.0, 1.0);
}

double quartic_second_moment() {
  static const double m2 =
      2.0 * integrate([](double x) { return x * x * quartic_pdf(x); }, 0.0, 12.0, 1e-13);
  return m2;
}

std::pair<QuarticLaw, Gaussian1D> critical_laws(double alpha, double beta) {
  validate_couplings(alpha, beta);
  if (!(alpha < beta)) {
    throw std::invalid_argument("fluctuation laws require alpha < beta");
  }
  if (alpha + beta != 2.0) {
    throw std::invalid_argument("critical laws require alpha + beta == 2 exactly");
  }
  return {QuarticLaw{quartic_normalizer()},
          Gaussian1D{0.0, 2.0 / (2.0 - (beta - alpha))}};
}

double entropy_rate_I(double x) {
  const double a = std::abs(x);
  if (a > 1.0) return kInf;
  if (a == 1.0) return std::log(2.0);
  return 0.5 * ((1.0 + x) * std::log1p(x) + (1.0 - x) * std::log1p(-x));
}

double rate_J(double x1, double x2) {
  return 0.5 * entropy_rate_I(2.0 * x1) + 0.5 * entropy_rate_I(2.0 * x2);
}

namespace {

// sup_t [t x - log(cosh t)/2] for a single coordinate; finite only on
// [-1/2, 1/2].  The optimum solves tanh(t)/2 = x and is found by bisection.
double coordinate_dual_sup(double x) {
  const double a = std::abs(x);
  if (a > 0.5) return kInf;
  if (a == 0.5) return 0.5 * std::log(2.0);
  double lo = -80.0;
  double hi = 80.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::tanh(mid) < x ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return t * x - 0.5 * log_cosh(t);
}

}  // namespace

double rate_J_variational(double x1, double x2) {
  return coordinate_dual_sup(x1) + coordinate_dual_sup(x2);
}

double cw_equation_solve(double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (theta <= 1.0) return 0.0;
  // tanh(theta m) - m is positive just right of zero and negative at the
  // upper bracket, and has a single sign change between them.
  double lo = 1e-12;
  double hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::tanh(theta * mid) - mid > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DiracMixture limit_mixture(double alpha, double beta) {
  switch (classify_regime(alpha, beta)) {
    case Regime::Subcritical:
    case Regime::CriticalLine:
      return {{{0.0, 0.0, 1.0}}};
    case Regime::SupercriticalDecoupled: {
      const double m = cw_equation_solve(0.5 * beta);
      return {{{-m, -m, 0.25}, {-m, m, 0.25}, {m, -m, 0.25}, {m, m, 0.25}}};
    }
    case Regime::SupercriticalCoupled: {
      const double m = cw_equation_solve(0.5 * (alpha + beta));
      return {{{-m, -m, 0.5}, {m, m, 0.5}}};
    }
  }
  throw std::logic_error("unknown regime");
}

double tilted_objective(double alpha, double beta, double x1, double x2) {
  const double interaction =
      0.5 * (0.25 * beta * (x1 * x1 + x2 * x2) + 0.5 * alpha * x1 * x2);
  return interaction - 0.5 * (entropy_rate_I(x1) + entropy_rate_I(x2));
}

namespace {

// f(x) = (2/alpha)(artanh x - beta x / 2); the diagonal fixed points solve
// f(m) = m on the branch where f increases.
double branch_value(double alpha, double beta, double x) {
  return (2.0 / alpha) * (artanh(x) - 0.5 * beta * x);
}

// Inverse of branch_value restricted to its increasing branch in [0, 1).
// For beta > 2 the branch starts at the turning point sqrt(1 - 2/beta).
double branch_inverse(double alpha, double beta, double z) {
  double lo = beta > 2.0 ? std::sqrt(1.0 - 2.0 / beta) : 0.0;
  double hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (branch_value(alpha, beta, mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Largest solution of tanh(theta m) = m polished by Newton from a start
// value already close to the root.
double polish_diagonal_root(double theta, double start) {
  double m = start;
  for (int it = 0; it < 60; ++it) {
    const double t = std::tanh(theta * m);
    const double residual = t - m;
    const double derivative = theta * (1.0 - t * t) - 1.0;
    if (derivative == 0.0) break;
    const double step = residual / derivative;
    m -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return m;
}

}  // namespace

std::vector<FixedPoint> mean_field_fixed_points(double alpha, double beta) {
  validate_couplings(alpha, beta);
  std::vector<FixedPoint> points{{0.0, 0.0}};
  if (alpha + beta > 2.0) {
    if (alpha == 0.0) {
      // The stationarity equations decouple into two scalar problems, each
      // with solutions {-m, 0, m}.
      const double m = cw_equation_solve(0.5 * beta);
      for (double a : {-m, 0.0, m}) {
        for (double b : {-m, 0.0, m}) {
          if (a != 0.0 || b != 0.0) points.push_back({a, b});
        }
      }
    } else {
      double z = 0.9;
      for (int it = 0; it < 500; ++it) {
        const double next = branch_inverse(alpha, beta, z);
        const bool settled = std::abs(next - z) < 1e-12;
        z = next;
        if (settled) break;
      }
      z = polish_diagonal_root(0.5 * (alpha + beta), z);
      points.push_back({z, z});
      points.push_back({-z, -z});
    }
  }
  std::sort(points.begin(), points.end(), [](const FixedPoint& a, const FixedPoint& b) {
    return a.x1 != b.x1 ? a.x1 < b.x1 : a.x2 < b.x2;
  });
  return points;
}

const char* definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::NegativeDefinite: return "negative-definite";
    case Definiteness::PositiveDefinite: return "positive-definite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::Degenerate: return "degenerate";
  }
  throw std::logic_error("unknown definiteness");
}

std::array<double, 2> SymmetricMatrix2::eigenvalues() const {
  const double center = 0.5 * (h11 + h22);
  const double radius = std::hypot(0.5 * (h11 - h22), h12);
  return {center - radius, center + radius};
}

HessianResult hessian_tilted_objective(double alpha, double beta, double x1, double x2) {
  validate_couplings(alpha, beta);
  if (!(std::abs(x1) < 1.0) || !(std::abs(x2) < 1.0)) {
    throw std::domain_error("hessian requires an interior point of [-1, 1]^2");
  }
  SymmetricMatrix2 h{0.5 * (0.5 * beta - 1.0 / (1.0 - x1 * x1)), 0.25 * alpha,
                     0.5 * (0.5 * beta - 1.0 / (1.0 - x2 * x2))};
  const auto [lo, hi] = h.eigenvalues();
  constexpr double tol = 1e-12;
  Definiteness d;
  if (hi < -tol) {
    d = Definiteness::NegativeDefinite;
  } else if (lo > tol) {
    d = Definiteness::PositiveDefinite;
  } else if (lo < -tol && hi > tol) {
    d = Definiteness::Indefinite;
  } else {
    d = Definiteness::Degenerate;
  }
  return {h, d};
}

namespace {

// Gradient of tilted_objective at an interior point.
void objective_gradient(double alpha, double beta, double x1, double x2, double& g1,
                        double& g2) {
  g1 = 0.25 * (beta * x1 + alpha * x2) - 0.5 * artanh(x1);
  g2 = 0.25 * (alpha * x1 + beta * x2) - 0.5 * artanh(x2);
}

}  // namespace

TiltedRate::TiltedRate(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  validate_couplings(alpha, beta);
  double best = -kInf;
  for (const FixedPoint& p : mean_field_fixed_points(alpha, beta)) {
    best = std::max(best, tilted_objective(alpha, beta, p.x1, p.x2));
  }

  // Dense screen over the square.  If it beats the fixed-point value beyond
  // rounding, the solver missed a maximizer; polish the grid point and take
  // whichever is larger.
  constexpr int kScreen = 2001;
  double grid_best = -kInf;
  double gx = 0.0;
  double gy = 0.0;
  for (int i = 0; i < kScreen; ++i) {
    const double x = -1.0 + 2.0 * i / (kScreen - 1);
    for (int j = 0; j < kScreen; ++j) {
      const double y = -1.0 + 2.0 * j / (kScreen - 1);
      const double v = tilted_objective(alpha, beta, x, y);
      if (v > grid_best) {
        grid_best = v;
        gx = x;
        gy = y;
      }
    }
  }
  if (grid_best > best + 1e-12) {
    double x = std::clamp(gx, -0.999999, 0.999999);
    double y = std::clamp(gy, -0.999999, 0.999999);
    for (int it = 0; it < 50; ++it) {
      double g1, g2;
      objective_gradient(alpha, beta, x, y, g1, g2);
      const SymmetricMatrix2 h = hessian_tilted_objective(alpha, beta, x, y).matrix;
      const double det = h.h11 * h.h22 - h.h12 * h.h12;
      if (det == 0.0) break;
      const double dx = (h.h22 * g1 - h.h12 * g2) / det;
      const double dy = (h.h11 * g2 - h.h12 * g1) / det;
      x = std::clamp(x - dx, -(1.0 - 1e-12), 1.0 - 1e-12);
      y = std::clamp(y - dy, -(1.0 - 1e-12), 1.0 - 1e-12);
      if (std::abs(dx) + std::abs(dy) < 1e-15) break;
    }
    best = std::max({best, grid_best, tilted_objective(alpha, beta, x, y)});
  }
  sup_ = best;
}

double TiltedRate::operator()(double x1, double x2) const {
  const double value = sup_ - tilted_objective(alpha_, beta_, x1, x2);
  // Rounding can push the rate a few ulp negative at the minimizers.
  return value < 0.0 ? 0.0 : value;
}

double TiltedRate::in_v_coordinates(double v1, double v2) const {
  return (*this)(2.0 * v1, 2.0 * v2);
}

double rate_Jm(double alpha, double beta, double x1, double x2) {
  return TiltedRate(alpha, beta)(x1, x2);
}

double rate_Jv(double alpha, double beta, double v1, double v2) {
  return TiltedRate(alpha, beta).in_v_coordinates(v1, v2);
}

}  // namespace blockspin
