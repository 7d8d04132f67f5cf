#pragma once

#include <functional>
#include <string>

namespace homog {

// diffusion coefficient h in dX = F dt + sigma h(X) dW, with closed-form
// derivative combinations so the drift corrections never evaluate 0 * inf at
// interior points (e.g. h = sqrt gives h h' = 1/2 exactly)
struct h_function {
  enum class form_t { one, identity, power, linear, custom };
  form_t form = form_t::one;
  double p = 0.5;            // power: h(x) = x^p, p in [0,1]
  double a = 1.0, b = 0.0;   // linear: h(x) = a x + b
  std::function<double(double)> fn;   // custom value
  std::function<double(double)> dfn;  // custom derivative, optional

  double operator()(double x) const;
  double prime(double x) const;
  double hh_prime(double x) const;  // h(x) h'(x)
};

// integrated coordinate change r(x) = int_xi^x ds/h(s), its inverse, and
// derivatives. r removes the state dependence of the noise: Z = r(X) solves
// an SDE with unit diffusion coefficient.
struct transform_spec {
  enum class kind_t { analytic, numeric };
  kind_t kind = kind_t::analytic;
  std::function<double(double)> r;
  std::function<double(double)> r_inverse;
  std::function<double(double)> r_prime;         // 1/h
  std::function<double(double)> r_double_prime;  // -h'/h^2
  double domain_lo = 0.0, domain_hi = 0.0;  // open interval containing xi
  double z_lo = 0.0, z_hi = 0.0;            // image r((domain_lo, domain_hi))
  double xi = 0.0;                          // anchor, r(xi) = 0
  std::string warning;  // nonempty when a sign change forced a domain shrink
};

// builds the transform anchored at xi. Closed forms cover the non-custom
// h kinds; custom h integrates 1/h adaptively and inverts by safeguarded
// Newton. If h changes sign inside the hinted domain, the domain shrinks to
// the maximal sign-constant interval containing xi and warning is set.
// throws std::domain_error when h(xi) == 0.
transform_spec build_transform(const h_function& h, double xi,
                               double hint_lo = -1e308, double hint_hi = 1e308);

// drift of the transformed process: z -> F(r^-1(z)) / h(r^-1(z)); throws
// std::domain_error for z outside the image interval
std::function<double(double)> transformed_drift(const std::function<double(double)>& F,
                                                const h_function& h,
                                                const transform_spec& t);

// Stratonovich-form drift of the slow limit: F(x) - (1/2) h(x) h'(x) m2,
// with m2 the second moment of the fast observable
std::function<double(double)> strat_correction_drift(const std::function<double(double)>& F,
                                                     const h_function& h, double m2);

// Ito-form drift: F(x) + (1/2) h(x) h'(x) (sigma2 - m2); equals F exactly
// when sigma2 == m2
std::function<double(double)> ito_form_drift(const std::function<double(double)>& F,
                                             const h_function& h, double sigma2, double m2);

}  // namespace homog
