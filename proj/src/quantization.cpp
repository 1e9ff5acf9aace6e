#include "misolab/quantization.hpp"

#include "misolab/numerics.hpp"
#include "misolab/types.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace misolab::quantization {

using nlohmann::json;

void RatePdfParams::validate() const {
    require(n_t >= 2, "RatePdfParams: n_t must be >= 2");
    require(alpha >= 1 && alpha <= n_t, "RatePdfParams: alpha must lie in [1, n_t]");
    require(n0 > 0.0 && std::isfinite(n0), "RatePdfParams: n0 must be positive");
}

double rate_pdf(double t, const RatePdfParams& params) {
    params.validate();
    require(t >= 0.0, "rate_pdf: t must be non-negative");
    constexpr double ln2 = 0.69314718055994530941723212145818;
    const double gain = params.n0 * (std::exp2(t) - 1.0);
    return ln2 * params.n0 * std::exp2(t) * numerics::chi_square_pdf(params.gain_dof(), gain);
}

double rate_cdf(double t, const RatePdfParams& params) {
    params.validate();
    if (t <= 0.0) return 0.0;
    return numerics::chi_square_cdf(params.gain_dof(), params.n0 * (std::exp2(t) - 1.0));
}

double rate_quantile(double q, const RatePdfParams& params) {
    params.validate();
    require(q >= 0.0 && q < 1.0, "rate_quantile: q must lie in [0, 1)");
    if (q == 0.0) return 0.0;
    double hi = 1.0;
    while (rate_cdf(hi, params) < q) {
        hi *= 2.0;
        require(hi < 1e9, "rate_quantile: failed to bracket quantile");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (rate_cdf(mid, params) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Adaptive Simpson with absolute tolerance; the pdf is smooth so recursion
// stays shallow.
template <typename F>
double simpson_segment(const F& f, double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_segment(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           simpson_segment(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_segment(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double support_limit(const RatePdfParams& params) { return rate_quantile(1.0 - 1e-12, params); }

struct CellStats {
    double mean = 0.0;
    double mass = 0.0;
};

// Conditional mean of the rate over [a, b]: quadrature for the first moment,
// exact CDF difference for the mass. The tight tolerance keeps the centroid
// noise floor far below the 1e-9 movement stop.
CellStats cell_stats(const RatePdfParams& params, double a, double b) {
    CellStats out;
    out.mass = rate_cdf(b, params) - rate_cdf(a, params);
    if (out.mass <= 0.0) {
        out.mean = 0.5 * (a + b);
        out.mass = 0.0;
        return out;
    }
    const double moment =
        integrate([&](double t) { return t * rate_pdf(t, params); }, a, b, 1e-14);
    out.mean = moment / out.mass;
    return out;
}

} // namespace

void Codebook::validate() const {
    params.validate();
    require(n_f >= 1 && n_f <= 12, "Codebook: n_f must lie in [1, 12]");
    const std::size_t n_levels = std::size_t{1} << n_f;
    require(levels.size() == n_levels, "Codebook: wrong number of levels");
    require(boundaries.size() == n_levels - 1, "Codebook: wrong number of boundaries");
    for (std::size_t i = 1; i < levels.size(); ++i)
        require(levels[i] > levels[i - 1], "Codebook: levels must be strictly ascending");
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        require(boundaries[i] > levels[i] && boundaries[i] < levels[i + 1],
                "Codebook: boundaries must interleave levels");
        const double mid = 0.5 * (levels[i] + levels[i + 1]);
        require(std::abs(boundaries[i] - mid) <= 1e-6 * (1.0 + std::abs(mid)),
                "Codebook: boundary must be the midpoint of adjacent levels");
    }
}

namespace {

// Cell means and the nearest-neighbour residual G_k = b_k - (m_k + m_{k+1})/2
// for a boundary vector; cells are [b_{k-1}, b_k] with the support endpoints
// closing the first and last cell.
struct BoundaryState {
    std::vector<CellStats> cells;
    std::vector<double> residual;
    double max_residual = 0.0;
};

BoundaryState evaluate_boundaries(const RatePdfParams& params, const std::vector<double>& bd,
                                  double t_max) {
    const int n_levels = static_cast<int>(bd.size()) + 1;
    BoundaryState st;
    st.cells.resize(n_levels);
    for (int i = 0; i < n_levels; ++i) {
        const double a = i == 0 ? 0.0 : bd[i - 1];
        const double b = i == n_levels - 1 ? t_max : bd[i];
        st.cells[i] = cell_stats(params, a, b);
    }
    st.residual.resize(bd.size());
    for (std::size_t k = 0; k < bd.size(); ++k) {
        st.residual[k] = bd[k] - 0.5 * (st.cells[k].mean + st.cells[k + 1].mean);
        st.max_residual = std::max(st.max_residual, std::abs(st.residual[k]));
    }
    return st;
}

bool monotone_in_support(const std::vector<double>& bd, double t_max) {
    for (std::size_t k = 0; k < bd.size(); ++k) {
        if (!(bd[k] > 0.0 && bd[k] < t_max)) return false;
        if (k > 0 && !(bd[k] > bd[k - 1])) return false;
    }
    return true;
}

} // namespace

Codebook train_lloyd_max(const RatePdfParams& params, int n_f) {
    params.validate();
    require(n_f >= 1 && n_f <= 12, "train_lloyd_max: n_f must lie in [1, 12]");

    const int n_levels = 1 << n_f;
    const double t_max = support_limit(params);

    // Equal-probability quantile start.
    std::vector<double> bd(n_levels - 1);
    for (int k = 0; k + 1 < n_levels; ++k)
        bd[k] = rate_quantile(static_cast<double>(k + 1) / n_levels, params);

    // Newton iteration on the boundary fixed point. The Jacobian is
    // tridiagonal with closed-form entries (plain Lloyd sweeps crawl for large
    // codebooks: the iteration has many modes with ratios near one). A damped
    // step falls back to the plain Lloyd update when Newton overshoots the
    // support, so every iteration makes progress.
    BoundaryState st = evaluate_boundaries(params, bd, t_max);
    std::vector<double> last_means(n_levels, -1.0);
    const int max_iterations = 10000;
    for (int it = 0; it < max_iterations; ++it) {
        double movement = 0.0;
        for (int i = 0; i < n_levels; ++i)
            movement = std::max(movement, std::abs(st.cells[i].mean - last_means[i]));
        for (int i = 0; i < n_levels; ++i) last_means[i] = st.cells[i].mean;
        if (movement < 1e-9 && st.max_residual < 1e-9) {
            Codebook cb;
            cb.params = params;
            cb.n_f = n_f;
            cb.levels.resize(n_levels);
            for (int i = 0; i < n_levels; ++i) cb.levels[i] = st.cells[i].mean;
            cb.boundaries.resize(n_levels - 1);
            for (int i = 0; i + 1 < n_levels; ++i)
                cb.boundaries[i] = 0.5 * (cb.levels[i] + cb.levels[i + 1]);
            cb.validate();
            return cb;
        }

        // Tridiagonal Jacobian of G at the current boundaries.
        const int n = n_levels - 1;
        std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const double fk = rate_pdf(bd[k], params);
            const CellStats& left = st.cells[k];
            const CellStats& right = st.cells[k + 1];
            const double dmk_db = left.mass > 0.0 ? fk * (bd[k] - left.mean) / left.mass : 0.0;
            const double dmk1_da = right.mass > 0.0 ? fk * (right.mean - bd[k]) / right.mass : 0.0;
            diag[k] = 1.0 - 0.5 * (dmk_db + dmk1_da);
            if (k > 0) {
                const double fa = rate_pdf(bd[k - 1], params);
                lower[k] = left.mass > 0.0 ? -0.5 * fa * (left.mean - bd[k - 1]) / left.mass : 0.0;
            }
            if (k + 1 < n) {
                const double fb = rate_pdf(bd[k + 1], params);
                upper[k] = right.mass > 0.0 ? -0.5 * fb * (bd[k + 1] - right.mean) / right.mass : 0.0;
            }
        }
        // Thomas solve of J step = -G.
        std::vector<double> step(n), cprime(n), dprime(n);
        cprime[0] = upper[0] / diag[0];
        dprime[0] = -st.residual[0] / diag[0];
        for (int k = 1; k < n; ++k) {
            const double denom = diag[k] - lower[k] * cprime[k - 1];
            cprime[k] = k + 1 < n ? upper[k] / denom : 0.0;
            dprime[k] = (-st.residual[k] - lower[k] * dprime[k - 1]) / denom;
        }
        step[n - 1] = dprime[n - 1];
        for (int k = n - 2; k >= 0; --k) step[k] = dprime[k] - cprime[k] * step[k + 1];

        bool accepted = false;
        double damping = 1.0;
        for (int attempt = 0; attempt < 40; ++attempt) {
            std::vector<double> trial(bd);
            for (int k = 0; k < n; ++k) trial[k] += damping * step[k];
            if (monotone_in_support(trial, t_max)) {
                BoundaryState trial_st = evaluate_boundaries(params, trial, t_max);
                if (trial_st.max_residual < st.max_residual || st.max_residual == 0.0) {
                    bd = std::move(trial);
                    st = std::move(trial_st);
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if (!accepted) {
            // Plain Lloyd update: boundaries to midpoints of the current means.
            for (int k = 0; k < n; ++k)
                bd[k] = 0.5 * (st.cells[k].mean + st.cells[k + 1].mean);
            st = evaluate_boundaries(params, bd, t_max);
        }
    }
    throw std::runtime_error("train_lloyd_max: no convergence within 10000 iterations");
}

int quantize(double r, const Codebook& codebook) {
    require(r >= 0.0, "quantize: r must be non-negative");
    const auto it = std::upper_bound(codebook.boundaries.begin(), codebook.boundaries.end(), r);
    return static_cast<int>(it - codebook.boundaries.begin());
}

double dequantize(int index, const Codebook& codebook) {
    require(index >= 0 && index < static_cast<int>(codebook.levels.size()),
            "dequantize: index out of range");
    return codebook.levels[index];
}

long long exchange_bits_per_bs(long long m_rates, int n_f) {
    require(m_rates > 0, "exchange_bits_per_bs: M must be positive");
    require(n_f > 0, "exchange_bits_per_bs: n_f must be positive");
    return m_rates * n_f;
}

double codebook_mse(const Codebook& codebook) {
    codebook.validate();
    const double t_max = support_limit(codebook.params);
    double mse = 0.0;
    const int n_levels = static_cast<int>(codebook.levels.size());
    for (int i = 0; i < n_levels; ++i) {
        const double a = i == 0 ? 0.0 : codebook.boundaries[i - 1];
        const double b = i == n_levels - 1 ? t_max : codebook.boundaries[i];
        const double c = codebook.levels[i];
        mse += integrate(
            [&](double t) { return (t - c) * (t - c) * rate_pdf(t, codebook.params); }, a, b);
    }
    return mse;
}

json Codebook::to_json() const {
    return json{{"n_t", params.n_t},      {"alpha", params.alpha}, {"n0", params.n0},
                {"n_f", n_f},             {"levels", levels},      {"boundaries", boundaries}};
}

Codebook Codebook::from_json(const json& j) {
    Codebook cb;
    cb.params.n_t = j.at("n_t").get<int>();
    cb.params.alpha = j.at("alpha").get<int>();
    cb.params.n0 = j.at("n0").get<double>();
    cb.n_f = j.at("n_f").get<int>();
    cb.levels = j.at("levels").get<std::vector<double>>();
    cb.boundaries = j.at("boundaries").get<std::vector<double>>();
    cb.validate();
    return cb;
}

const Codebook& CodebookCache::get(const RatePdfParams& params, int n_f) const {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const Codebook& cb : store_)
        if (cb.params == params && cb.n_f == n_f) return cb;
    store_.push_back(train_lloyd_max(params, n_f));
    return store_.back();
}

} // namespace misolab::quantization
