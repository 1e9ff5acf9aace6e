#ifndef MISOLAB_QUANTIZATION_HPP
#define MISOLAB_QUANTIZATION_HPP

#include <json.hpp>

#include <deque>
#include <mutex>
#include <vector>

namespace misolab::quantization {

/// Parameters of the analytic rate distribution: the desired gain of an
/// F-member beam is chi-square with 2(n_t - alpha + 1) degrees of freedom, and
/// the rate is log2(1 + gain / n0).
struct RatePdfParams {
    int n_t = 2;
    int alpha = 1;
    double n0 = 1.0;

    void validate() const;
    int gain_dof() const { return 2 * (n_t - alpha + 1); }

    friend bool operator==(const RatePdfParams&, const RatePdfParams&) = default;
};

/// Density of the rate r = log2(1 + gain / n0) at t >= 0.
double rate_pdf(double t, const RatePdfParams& params);

/// CDF of the rate at t.
double rate_cdf(double t, const RatePdfParams& params);

/// Inverse CDF (bisection); q in [0, 1).
double rate_quantile(double q, const RatePdfParams& params);

/// MSE-optimal scalar quantizer for the rate distribution: 2^n_f centroids
/// (conditional means of their cells) interleaved with midpoint boundaries.
struct Codebook {
    RatePdfParams params;
    int n_f = 1;
    std::vector<double> levels;     ///< 2^n_f centroids, ascending
    std::vector<double> boundaries; ///< 2^n_f - 1 thresholds, ascending

    void validate() const;
    nlohmann::json to_json() const;
    static Codebook from_json(const nlohmann::json& j);
};

/// Lloyd iteration against the analytic pdf, initialized at equal-probability
/// quantiles. Converges when the largest centroid movement drops below 1e-9;
/// throws after 10^4 iterations without convergence.
Codebook train_lloyd_max(const RatePdfParams& params, int n_f);

/// Nearest-centroid index for r >= 0 (tails clamp to the extreme cells).
int quantize(double r, const Codebook& codebook);

/// Centroid value for an index.
double dequantize(int index, const Codebook& codebook);

/// Bits each BS sends for its table share: N_f = M * n_f.
long long exchange_bits_per_bs(long long m_rates, int n_f);

/// Expected squared quantization error of a codebook, by quadrature.
double codebook_mse(const Codebook& codebook);

/// Trains on first use and caches per (params, n_f); safe to share across
/// threads.
class CodebookCache {
  public:
    const Codebook& get(const RatePdfParams& params, int n_f) const;

  private:
    mutable std::mutex mutex_;
    mutable std::deque<Codebook> store_; // stable references across inserts
};

} // namespace misolab::quantization

#endif
