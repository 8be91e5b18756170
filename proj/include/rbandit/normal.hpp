#pragma once

namespace rbandit {

class RandomStream;

/// Standard normal CDF, computed through the complementary error function so
/// both tails keep full relative precision.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1). Wichura's AS241 (PPND16) rational
/// approximation, relative error about 1e-16 across the whole range.
double normal_quantile(double p);

/// One N(0, 1) draw per uniform: inverse transform of a 53-bit uniform in (0, 1).
double standard_normal(RandomStream& rng);

}  // namespace rbandit
