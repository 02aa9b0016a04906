#pragma once

namespace vbcomp::num {

inline constexpr double ln2pi = 1.8378770664093454836;

double norm_pdf(double x);
double log_norm_pdf(double x);
double norm_cdf(double x);

// log Phi(x), stable in both tails. The lower tail (x < -8) goes through the
// asymptotic expansion of the hazard instead of log(Phi) directly, so it
// stays finite down to arbitrarily large |x|.
double log_norm_cdf(double x);

// phi(x)/Phi(x). This is the mean shift of a standard normal truncated to
// (x-related) half-lines and the weight in the probit score. For x < -8 the
// direct ratio under/overflows, so the asymptotic hazard expansion
//   phi(x)/Phi(x) = t / (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...),  t = -x,
// is used with adaptive truncation.
double inv_mills(double x);

double digamma(double x);

}  // namespace vbcomp::num
