#ifndef MISOLAB_NUMERICS_HPP
#define MISOLAB_NUMERICS_HPP

#include "misolab/types.hpp"

namespace misolab::numerics {

/// Unit-norm w minimizing ||g w||^2 over unit vectors, i.e. the right singular
/// vector of g for its smallest singular value. g must have >= 1 row and
/// >= 2 columns. Global phase is unspecified.
CVec smallest_right_singular_vector(const CMat& g);

/// Unit-norm w maximizing |h^H w|^2 / (w^H b w) for Hermitian positive-definite
/// b. The numerator matrix h h^H has rank one, so the maximizer is collinear
/// with b^{-1} h; the function solves b x = h and normalizes.
CVec dominant_rayleigh_vector(const CVec& h, const CMat& b);

/// Upper incomplete gamma Gamma(s, x) = integral_x^inf t^{s-1} e^{-t} dt for
/// x > 0 and |s| <= 64. Non-positive s is evaluated by the downward recurrence
/// Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s anchored at Gamma(0, x) = E1(x)
/// (integer s) or at the fractional anchor in (0, 1] (non-integer s).
double upper_incomplete_gamma(double s, double x);

/// Exponential integral E1(x) for x > 0.
double exponential_integral_e1(double x);

/// e^x x^{-s} Gamma(s, x): the overflow-free combination needed when Gamma
/// appears next to e^x and power terms. Uses the continued fraction directly
/// for large x, the plain product otherwise.
double upper_incomplete_gamma_scaled(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s) for
/// s > 0, x >= 0. Used for chi-square CDFs.
double regularized_lower_gamma(double s, double x);

/// Chi-square density with `dof` degrees of freedom (dof even, >= 2).
double chi_square_pdf(int dof, double x);

/// Chi-square CDF with `dof` degrees of freedom.
double chi_square_cdf(int dof, double x);

} // namespace misolab::numerics

#endif
