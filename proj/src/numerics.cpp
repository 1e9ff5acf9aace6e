#include "misolab/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace misolab::numerics {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// E1 by power series, valid for small x.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k <= 80; ++k) {
        term *= -x / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

// E1 by the standard continued fraction (modified Lentz), valid for x >~ 1.
double e1_continued_fraction(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k <= 400; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f * std::exp(-x);
}

// Regularized lower gamma P(s, x) by series, for x < s + 1.
double lower_gamma_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double term = sum;
    for (int k = 0; k < 1000; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// The Legendre continued fraction evaluated by modified Lentz; returns
// e^x x^{-s} Gamma(s, x). Converges for x not small relative to s.
double gamma_cf_scaled(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k <= 1000; ++k) {
        const double a = -k * (k - s);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return f;
}

// Regularized upper gamma Q(s, x), for x >= s + 1 and s > 0.
double upper_gamma_cf(double s, double x) {
    return gamma_cf_scaled(s, x) * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Unnormalized Gamma(s, x) for s > 0.
double upper_gamma_positive(double s, double x) {
    if (x < s + 1.0) {
        return std::tgamma(s) * (1.0 - lower_gamma_series(s, x));
    }
    return std::tgamma(s) * upper_gamma_cf(s, x);
}

} // namespace

double exponential_integral_e1(double x) {
    require(std::isfinite(x) && x > 0.0, "exponential_integral_e1: x must be positive");
    return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double upper_incomplete_gamma(double s, double x) {
    require(std::isfinite(s) && std::isfinite(x), "upper_incomplete_gamma: non-finite input");
    require(x > 0.0, "upper_incomplete_gamma: x must be positive");
    require(std::abs(s) <= 64.0, "upper_incomplete_gamma: |s| must be <= 64");

    if (s > 0.0) return upper_gamma_positive(s, x);

    // Anchor of the downward recurrence: Gamma(0,x)=E1(x) for integer s,
    // otherwise the fractional point s + n in (0, 1].
    const double rounded = std::round(s);
    const bool integer_s = std::abs(s - rounded) < 1e-12;
    int steps;
    double anchor_s, value;
    if (integer_s) {
        steps = static_cast<int>(-rounded);
        anchor_s = 0.0;
        value = exponential_integral_e1(x);
    } else {
        steps = static_cast<int>(std::ceil(-s));
        anchor_s = s + steps;
        value = upper_gamma_positive(anchor_s, x);
    }
    // Gamma(t-1, x) = (Gamma(t, x) - x^{t-1} e^{-x}) / (t - 1)
    double t = anchor_s;
    for (int k = 0; k < steps; ++k) {
        t -= 1.0;
        value = (value - std::pow(x, t) * std::exp(-x)) / t;
    }
    return value;
}

double upper_incomplete_gamma_scaled(double s, double x) {
    require(std::isfinite(s) && std::isfinite(x), "upper_incomplete_gamma_scaled: non-finite input");
    require(x > 0.0, "upper_incomplete_gamma_scaled: x must be positive");
    require(std::abs(s) <= 64.0, "upper_incomplete_gamma_scaled: |s| must be <= 64");
    if (x >= std::abs(s) + 10.0) return gamma_cf_scaled(s, x);
    return std::exp(x) * std::pow(x, -s) * upper_incomplete_gamma(s, x);
}

double regularized_lower_gamma(double s, double x) {
    require(std::isfinite(s) && std::isfinite(x), "regularized_lower_gamma: non-finite input");
    require(s > 0.0, "regularized_lower_gamma: s must be positive");
    require(x >= 0.0, "regularized_lower_gamma: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return lower_gamma_series(s, x);
    return 1.0 - upper_gamma_cf(s, x);
}

double chi_square_pdf(int dof, double x) {
    require(dof >= 2 && dof % 2 == 0, "chi_square_pdf: dof must be even and >= 2");
    require(x >= 0.0, "chi_square_pdf: x must be non-negative");
    const int k = dof / 2;
    if (x == 0.0) return k == 1 ? 0.5 : 0.0;
    // x^{k-1} e^{-x/2} / (2^k (k-1)!)
    const double logpdf = (k - 1) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k);
    return std::exp(logpdf);
}

double chi_square_cdf(int dof, double x) {
    require(dof >= 2 && dof % 2 == 0, "chi_square_cdf: dof must be even and >= 2");
    if (x <= 0.0) return 0.0;
    return regularized_lower_gamma(dof / 2.0, x / 2.0);
}

CVec smallest_right_singular_vector(const CMat& g) {
    require(g.rows() >= 1, "smallest_right_singular_vector: matrix needs at least one row");
    require(g.cols() >= 2, "smallest_right_singular_vector: matrix needs at least two columns");
    require(is_finite(g), "smallest_right_singular_vector: non-finite input");

    Eigen::JacobiSVD<CMat> svd(g, Eigen::ComputeFullV);
    // Eigen orders singular values descending; the last right singular vector
    // minimizes ||g w||. Ties pick the decomposition's own ordering.
    CVec w = svd.matrixV().col(g.cols() - 1);
    return w / w.norm();
}

CVec dominant_rayleigh_vector(const CVec& h, const CMat& b) {
    require(b.rows() == b.cols(), "dominant_rayleigh_vector: b must be square");
    require(h.size() == b.rows(), "dominant_rayleigh_vector: dimension mismatch");
    require(is_finite(h) && is_finite(b), "dominant_rayleigh_vector: non-finite input");
    const double scale = b.norm();
    require((b - b.adjoint()).norm() <= 1e-10 * (scale > 0 ? scale : 1.0),
            "dominant_rayleigh_vector: b is not Hermitian");

    Eigen::LLT<CMat> llt(b);
    require(llt.info() == Eigen::Success, "dominant_rayleigh_vector: b is not positive definite");
    CVec x = llt.solve(h);
    const double nrm = x.norm();
    require(nrm > 0.0 && std::isfinite(nrm), "dominant_rayleigh_vector: degenerate solve");
    return x / nrm;
}

} // namespace misolab::numerics
