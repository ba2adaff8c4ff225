#pragma once

namespace execlab {

/// Principal branch W0 of the Lambert W function: the w >= -1 with
/// w * exp(w) = z, for z >= -1/e. Halley iteration from a logarithmic
/// starting guess; throws std::domain_error for z < -1/e or NaN.
double lambert_w0(double z);

/// W0(exp(log_z)) without forming exp(log_z); usable when log_z is far beyond
/// the overflow threshold of exp.
double lambert_w0_of_exp(double log_z);

}  // namespace execlab
