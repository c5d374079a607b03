#pragma once

namespace popdyn {

// regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// regularized incomplete beta I_x(a,b)
double beta_inc(double a, double b, double x);

// exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0
double expint_e1(double x);
// inverse of E1 on (0, inf): returns x with E1(x) = y
double expint_e1_inv(double y);

// cdf helpers built on the above
double gamma_cdf(double shape, double rate, double x);
double beta_cdf(double a, double b, double x);
double normal_cdf(double z);
double exponential_cdf(double mean, double x);

} // namespace popdyn
