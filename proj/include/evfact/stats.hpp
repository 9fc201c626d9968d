#ifndef EVFACT_STATS_HPP
#define EVFACT_STATS_HPP

namespace evfact::stats {

// Standard normal CDF, computed through erfc so deep tails keep relative
// precision instead of rounding to 0/1.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF). Wichura's rational-approximation
// scheme, accurate to ~1e-15 over (0,1); +/-inf at the endpoints.
double normal_quantile(double p);

// 2 * (1 - Phi(|t|)); stays meaningful for |t| ~ 40 where naive 1-cdf is 0.
double two_sided_p(double t);

}  // namespace evfact::stats

#endif
