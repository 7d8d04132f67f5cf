#include "homog/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double central_diff(const std::function<double(double)>& f, double x) {
  double e = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + e) - f(x - e)) / (2.0 * e);
}

// adaptive Simpson with Richardson acceptance on each split
double simpson3(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double m, double b,
             double fa, double fm, double fb, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson3(a, m, fa, flm, fm);
  double right = simpson3(m, b, fm, frm, fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return adapt(f, a, m, b, fa, fm, fb, simpson3(a, b, fa, fm, fb), tol, 48);
}

}  // namespace

double h_function::operator()(double x) const {
  switch (form) {
    case form_t::one: return 1.0;
    case form_t::identity: return x;
    case form_t::power: return std::pow(x, p);
    case form_t::linear: return a * x + b;
    case form_t::custom: return fn(x);
  }
  return 0.0;
}

double h_function::prime(double x) const {
  switch (form) {
    case form_t::one: return 0.0;
    case form_t::identity: return 1.0;
    case form_t::power: return p * std::pow(x, p - 1.0);
    case form_t::linear: return a;
    case form_t::custom: return dfn ? dfn(x) : central_diff(fn, x);
  }
  return 0.0;
}

double h_function::hh_prime(double x) const {
  switch (form) {
    case form_t::one: return 0.0;
    case form_t::identity: return x;
    case form_t::power:
      // p x^{2p-1}; the exponent vanishes at p = 1/2, where the product is
      // the constant p even at x = 0
      if (2.0 * p - 1.0 == 0.0) return p;
      return p * std::pow(x, 2.0 * p - 1.0);
    case form_t::linear: return a * (a * x + b);
    case form_t::custom: return fn(x) * prime(x);
  }
  return 0.0;
}

namespace {

transform_spec analytic_one(double xi) {
  transform_spec t;
  t.kind = transform_spec::kind_t::analytic;
  t.xi = xi;
  t.r = [xi](double x) { return x - xi; };
  t.r_inverse = [xi](double z) { return z + xi; };
  t.r_prime = [](double) { return 1.0; };
  t.r_double_prime = [](double) { return 0.0; };
  t.domain_lo = -kInf;
  t.domain_hi = kInf;
  t.z_lo = -kInf;
  t.z_hi = kInf;
  return t;
}

transform_spec analytic_identity(double xi) {
  transform_spec t;
  t.kind = transform_spec::kind_t::analytic;
  t.xi = xi;
  double s = xi > 0.0 ? 1.0 : -1.0;
  t.r = [xi, s](double x) { return std::log(s * x) - std::log(s * xi); };
  t.r_inverse = [xi](double z) { return xi * std::exp(z); };
  t.r_prime = [](double x) { return 1.0 / x; };
  t.r_double_prime = [](double x) { return -1.0 / (x * x); };
  t.domain_lo = xi > 0.0 ? 0.0 : -kInf;
  t.domain_hi = xi > 0.0 ? kInf : 0.0;
  t.z_lo = -kInf;
  t.z_hi = kInf;
  return t;
}

transform_spec analytic_power(double xi, double p) {
  transform_spec t;
  t.kind = transform_spec::kind_t::analytic;
  t.xi = xi;
  const double q = 1.0 - p;  // > 0 for p in [0,1)
  const double xq = std::pow(xi, q);
  const double zlo = -xq / q;
  t.r = [q, xq](double x) { return (std::pow(x, q) - xq) / q; };
  // the closed form would silently reflect below the image boundary, so the
  // inverse enforces the image interval like the numeric transform does
  t.r_inverse = [q, xq, zlo](double z) {
    if (!(z > zlo))
      throw std::domain_error("transform inverse: target outside the image");
    return std::pow(q * z + xq, 1.0 / q);
  };
  t.r_prime = [p](double x) { return std::pow(x, -p); };
  t.r_double_prime = [p](double x) { return -p * std::pow(x, -p - 1.0); };
  t.domain_lo = 0.0;
  t.domain_hi = kInf;
  t.z_lo = zlo;  // finite: the integrable singularity at 0
  t.z_hi = kInf;
  return t;
}

transform_spec analytic_linear(double xi, double a, double b) {
  transform_spec t;
  t.kind = transform_spec::kind_t::analytic;
  t.xi = xi;
  if (a == 0.0) {
    t.r = [xi, b](double x) { return (x - xi) / b; };
    t.r_inverse = [xi, b](double z) { return xi + b * z; };
    t.r_prime = [b](double) { return 1.0 / b; };
    t.r_double_prime = [](double) { return 0.0; };
    t.domain_lo = -kInf;
    t.domain_hi = kInf;
    t.z_lo = b > 0.0 ? -kInf : kInf;
    t.z_hi = b > 0.0 ? kInf : -kInf;
    if (b < 0.0) std::swap(t.z_lo, t.z_hi);
    return t;
  }
  const double hxi = a * xi + b;
  t.r = [a, b, hxi](double x) { return std::log((a * x + b) / hxi) / a; };
  t.r_inverse = [a, b, hxi](double z) { return (hxi * std::exp(a * z) - b) / a; };
  t.r_prime = [a, b](double x) { return 1.0 / (a * x + b); };
  t.r_double_prime = [a, b](double x) {
    double h = a * x + b;
    return -a / (h * h);
  };
  // domain: the side of the root -b/a where h keeps the sign of h(xi)
  double root = -b / a;
  bool right = (a > 0.0) == (hxi > 0.0);
  t.domain_lo = right ? root : -kInf;
  t.domain_hi = right ? kInf : root;
  t.z_lo = -kInf;
  t.z_hi = kInf;
  return t;
}

transform_spec numeric_transform(const h_function& h, double xi, double hint_lo,
                                 double hint_hi) {
  transform_spec t;
  t.kind = transform_spec::kind_t::numeric;
  t.xi = xi;

  const double hxi = h(xi);
  const double sign = hxi > 0.0 ? 1.0 : -1.0;

  // clip unbounded hints to a wide finite scan window around xi
  double lo = std::max(hint_lo, xi - 1e6 * std::max(1.0, std::abs(xi)));
  double hi = std::min(hint_hi, xi + 1e6 * std::max(1.0, std::abs(xi)));
  bool shrunk_lo = false, shrunk_hi = false;

  // scan for sign changes, then bisect the bracketing interval; the domain
  // becomes the maximal sign-constant open interval containing xi
  const int kScan = 4096;
  double prev_x = xi, prev_v = hxi;
  for (int i = 1; i <= kScan; ++i) {
    double x = xi + (hi - xi) * double(i) / double(kScan);
    double v = h(x);
    if (!(sign * v > 0.0)) {
      double a = prev_x, b = x;
      for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (sign * h(m) > 0.0) a = m; else b = m;
      }
      hi = a;
      shrunk_hi = true;
      break;
    }
    prev_x = x;
    prev_v = v;
  }
  prev_x = xi;
  prev_v = hxi;
  for (int i = 1; i <= kScan; ++i) {
    double x = xi + (lo - xi) * double(i) / double(kScan);
    double v = h(x);
    if (!(sign * v > 0.0)) {
      double a = x, b = prev_x;
      for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (sign * h(m) > 0.0) b = m; else a = m;
      }
      lo = b;
      shrunk_lo = true;
      break;
    }
    prev_x = x;
    prev_v = v;
  }
  (void)prev_v;
  t.domain_lo = lo;
  t.domain_hi = hi;
  if (shrunk_lo || shrunk_hi)
    t.warning = "diffusion coefficient changes sign; domain restricted to (" +
                std::to_string(lo) + "," + std::to_string(hi) + ")";

  auto recip = [h](double s) { return 1.0 / h(s); };
  auto r = [recip, xi](double x) { return integrate(recip, xi, x, 1e-10); };
  t.r = r;
  t.r_prime = recip;
  t.r_double_prime = [h](double x) {
    double v = h(x);
    return -h.prime(x) / (v * v);
  };

  // image endpoints: integrate toward the boundary with a small inset so an
  // integrable endpoint singularity still yields a finite bound
  double inset = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  t.z_lo = std::isinf(lo) ? -kInf : r(lo + inset);
  t.z_hi = std::isinf(hi) ? kInf : r(hi - inset);
  if (t.z_lo > t.z_hi) std::swap(t.z_lo, t.z_hi);

  double dlo = lo, dhi = hi;
  t.r_inverse = [r, recip, xi, dlo, dhi](double z) {
    // bracket by doubling steps from xi, then bisection-safeguarded Newton
    double step = std::max(1.0, std::abs(xi)) * 0.5;
    double a = xi, b = xi;
    double ra = 0.0, rb = 0.0;
    bool increasing = recip(xi) > 0.0;
    bool want_right = (z > 0.0) == increasing;
    for (int it = 0; it < 200; ++it) {
      if (want_right) {
        b = std::min(std::isinf(dhi) ? b + step : 0.5 * (b + dhi), b + step);
        rb = r(b);
        if ((rb - z) * (ra - z) <= 0.0) break;
        a = b;
        ra = rb;
        step *= 2.0;
      } else {
        a = std::max(std::isinf(dlo) ? a - step : 0.5 * (a + dlo), a - step);
        ra = r(a);
        if ((rb - z) * (ra - z) <= 0.0) break;
        b = a;
        rb = ra;
        step *= 2.0;
      }
    }
    if ((ra - z) * (rb - z) > 0.0)
      throw std::domain_error("transform inverse: target outside the image");
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      double fx = r(x) - z;
      if (std::abs(fx) <= 1e-12 * std::max(1.0, std::abs(z))) return x;
      if (fx * (ra - z) > 0.0) a = x; else b = x;
      double dx = fx / recip(x);
      double xn = x - dx;
      x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
    }
    return x;
  };
  return t;
}

}  // namespace

transform_spec build_transform(const h_function& h, double xi, double hint_lo,
                               double hint_hi) {
  if (h(xi) == 0.0) throw std::domain_error("transform undefined at initial condition");
  switch (h.form) {
    case h_function::form_t::one: return analytic_one(xi);
    case h_function::form_t::identity: return analytic_identity(xi);
    case h_function::form_t::power:
      if (h.p == 0.0) return analytic_one(xi);
      if (h.p == 1.0) return analytic_identity(xi);
      if (!(xi > 0.0))
        throw std::domain_error("transform undefined at initial condition");
      return analytic_power(xi, h.p);
    case h_function::form_t::linear: return analytic_linear(xi, h.a, h.b);
    case h_function::form_t::custom: return numeric_transform(h, xi, hint_lo, hint_hi);
  }
  throw std::logic_error("build_transform: unreachable");
}

std::function<double(double)> transformed_drift(const std::function<double(double)>& F,
                                                const h_function& h,
                                                const transform_spec& t) {
  double zlo = t.z_lo, zhi = t.z_hi;
  auto rinv = t.r_inverse;
  return [F, h, rinv, zlo, zhi](double z) {
    if (!(z > zlo && z < zhi))
      throw std::domain_error("transformed drift evaluated outside the image");
    double x = rinv(z);
    return F(x) / h(x);
  };
}

std::function<double(double)> strat_correction_drift(const std::function<double(double)>& F,
                                                     const h_function& h, double m2) {
  return [F, h, m2](double x) { return F(x) - 0.5 * h.hh_prime(x) * m2; };
}

std::function<double(double)> ito_form_drift(const std::function<double(double)>& F,
                                             const h_function& h, double sigma2,
                                             double m2) {
  return [F, h, sigma2, m2](double x) { return F(x) + 0.5 * h.hh_prime(x) * (sigma2 - m2); };
}

}  // namespace homog
