// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "misolab/baselines.hpp"
#include "misolab/harness.hpp"
#include "misolab/numerics.hpp"
#include "misolab/protocol.hpp"
#include "misolab/quantization.hpp"
#include "misolab/selection.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace misolab;
using channel::ChannelRealization;
using channel::NetworkConfig;
using channel::generate_rayleigh;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s  criterion %d - %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

beamforming::Selection leading_cells(int alpha) {
    beamforming::Selection s;
    for (int m = 0; m < alpha; ++m) s.free_set.push_back(UserId{m, 0});
    return s;
}

std::pair<double, double> desired_and_interference(const ChannelRealization& r,
                                                   const beamforming::BeamformingSolution& sol,
                                                   UserId user) {
    const NetworkConfig& cfg = r.config();
    double desired = 0.0, interference = 0.0;
    for (int j = 0; j < cfg.n_c; ++j)
        for (int q = 0; q < cfg.n_u; ++q) {
            const double p = std::norm(r.h(j, user).dot(sol.beam(UserId{j, q})));
            if (j == user.cell && q == user.user)
                desired = p;
            else
                interference += p;
        }
    return {desired, interference};
}

void criterion_1_zero_interference() {
    const auto start = std::chrono::steady_clock::now();
    const NetworkConfig cfg{4, 7, 1, 1.0};
    double worst = 0.0;
    for (int alpha : {2, 3, 4}) {
        for (int d = 0; d < 500; ++d) {
            const auto r = generate_rayleigh(cfg, 101000 + alpha * 1000 + d);
            const auto sol = beamforming::design_beams(r, leading_cells(alpha));
            for (int m = 0; m < alpha; ++m) {
                const auto [desired, interference] = desired_and_interference(r, sol, UserId{m, 0});
                worst = std::max(worst, interference / desired);
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-12 && elapsed < 60.0, "zero-interference invariant",
           "worst ratio " + std::to_string(worst) + ", " + std::to_string(elapsed) + " s");
}

void criterion_2_accounting() {
    using namespace misolab::protocol;
    bool pass = true;
    pass &= proposed_exchange_bits(7, 4, 35) == 252 && bits_to_bytes(252) == 32;
    pass &= wmmse_exchange_bits(2, 2, 7) == 588 && bits_to_bytes(588) == 74;
    pass &= global_exchange_bits(2, 7) == 588;
    pass &= wmmse_exchange_bits(2, 5, 9) == 2430 && bits_to_bytes(2430) == 304;
    pass &= global_exchange_bits(5, 9) == 3240 && bits_to_bytes(3240) == 405;
    // General expression at (n_t=8, n_c=9, N_f=84).
    pass &= proposed_exchange_bits(9, 8, 84) == 744 && bits_to_bytes(744) == 93;
    report(2, pass, "information-exchange accounting", "proposed 252b/32B, wmmse 588b/74B, "
                                                       "global 588b/74B, 304B, 405B, 93B");
}

void criterion_3_global_rate_bound() {
    const auto start = std::chrono::steady_clock::now();
    const int drops = 20000;
    bool pass = true;
    std::string detail;
    for (int alpha : {1, 2, 3}) {
        for (double n0 : {10.0, 1.0, 0.1}) {
            const NetworkConfig cfg{4, 7, 1, n0};
            const beamforming::Selection sel = leading_cells(alpha);
            double acc = 0.0;
            for (int d = 0; d < drops; ++d) {
                const auto r = generate_rayleigh(cfg, 3000000 + d);
                const auto sol = beamforming::design_beams(r, sel);
                acc += beamforming::evaluate(r, sol).global_part;
            }
            const double empirical = acc / drops;
            const double bound = selection::rbar_global(4, 7, alpha, n0);
            const double gap_per_cell = (bound - empirical) / cfg.n_c;
            if (!(empirical <= bound) || !(gap_per_cell <= 0.06)) {
                pass = false;
                detail += " a=" + std::to_string(alpha) + ",n0=" + std::to_string(n0) +
                          " gap=" + std::to_string(gap_per_cell);
            }
        }
    }
    const double elapsed = seconds_since(start);
    pass = pass && elapsed < 300.0;
    report(3, pass, "analytic bound dominates the empirical mean",
           (detail.empty() ? "all 9 points within 0.06 bits/s/Hz per cell" : detail) + ", " +
               std::to_string(elapsed) + " s");
}

void criterion_4_case_ordering() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    const int drops = 2000;
    for (double snr_db : {-10.0, 30.0}) {
        NetworkConfig cfg{4, 7, 1, NetworkConfig::n0_from_snr_db(snr_db)};
        oracles::Random pick(2024);
        std::vector<double> diffs;
        diffs.reserve(drops);
        const beamforming::Selection sel = leading_cells(3);
        for (int d = 0; d < drops; ++d) {
            const auto r = generate_rayleigh(cfg, 4000000 + d);
            const auto case1 = beamforming::design_beams(r, sel);
            const int l = 3 + static_cast<int>(pick.uniform() * (cfg.n_c - 3));
            const auto case2 = beamforming::design_beams_extra_null(r, sel, UserId{l, 0});
            diffs.push_back(beamforming::evaluate(r, case1).sum_rate -
                            beamforming::evaluate(r, case2).sum_rate);
        }
        const auto stats = oracles::mean_stderr(diffs);
        const double lower_cl = stats.mean - 1.645 * stats.stderr_;
        if (!(stats.mean >= 0.0 && lower_cl > 0.0)) pass = false;
        detail += " " + std::to_string(snr_db) + "dB: mean=" + std::to_string(stats.mean) +
                  " cl=" + std::to_string(lower_cl);
    }
    const double elapsed = seconds_since(start);
    pass = pass && elapsed < 180.0;
    report(4, pass, "gain-matched beams beat the extra-null arm", detail + ", " +
                                                                      std::to_string(elapsed) + " s");
}

void criterion_5_rate_pdf() {
    using quantization::RatePdfParams;
    bool pass = true;
    std::string detail;

    // Normalization by quadrature.
    for (const RatePdfParams& p :
         {RatePdfParams{4, 4, 1.0}, RatePdfParams{4, 3, 1.0}, RatePdfParams{4, 2, 0.1}}) {
        const double mass = oracles::integrate_to_infinity(
            [&](double t) { return quantization::rate_pdf(t, p); }, 0.0, 1e-12);
        if (std::abs(mass - 1.0) > 1e-6) {
            pass = false;
            detail += " mass(a=" + std::to_string(p.alpha) + ")=" + std::to_string(mass);
        }
    }

    // KS of pipeline samples against the analytic CDF.
    const NetworkConfig base{4, 7, 1, 1.0};
    const int samples = 100000;
    for (int alpha : {2, 3, 4}) {
        beamforming::Selection cand = leading_cells(alpha);
        cand.candidate_index = 0;
        std::vector<double> rates;
        rates.reserve(samples);
        for (int d = 0; d < samples; ++d) {
            const auto r = generate_rayleigh(base, 5000000 + d);
            rates.push_back(
                beamforming::local_rate_terms(channel::local_csi(r, 0), {cand}, base.n0)[0].rate);
        }
        const RatePdfParams params{4, alpha, base.n0};
        const double d_stat = oracles::ks_statistic(
            rates, [&](double t) { return quantization::rate_cdf(t, params); });
        const double crit = oracles::ks_critical(samples, 0.01);
        if (d_stat >= crit) pass = false;
        detail += " ks(a=" + std::to_string(alpha) + ")=" + std::to_string(d_stat);
    }
    report(5, pass, "analytic rate distribution", detail + " crit=0.005147");
}

void criterion_6_quantizer() {
    using quantization::Codebook;
    using quantization::RatePdfParams;
    bool pass = true;
    std::string detail;

    // Fixed-point conditions within 1e-6 relative.
    const RatePdfParams p{4, 3, 1.0};
    const Codebook cb = quantization::train_lloyd_max(p, 3);
    for (std::size_t i = 0; i + 1 < cb.levels.size(); ++i) {
        const double mid = 0.5 * (cb.levels[i] + cb.levels[i + 1]);
        if (std::abs(cb.boundaries[i] - mid) > 1e-6 * (1.0 + std::abs(mid))) pass = false;
    }
    const double far = quantization::rate_quantile(1.0 - 1e-13, p);
    for (std::size_t i = 0; i < cb.levels.size(); ++i) {
        const double a = i == 0 ? 0.0 : cb.boundaries[i - 1];
        const double b = i + 1 == cb.levels.size() ? far : cb.boundaries[i];
        const double mass = quantization::rate_cdf(b, p) - quantization::rate_cdf(a, p);
        const double mean = oracles::romberg([&](double t) { return t * quantization::rate_pdf(t, p); },
                                             a, b, 1e-13) /
                            mass;
        if (std::abs(cb.levels[i] - mean) > 1e-6 * (1.0 + std::abs(mean))) pass = false;
    }

    // Strictly decreasing distortion over n_f in {2,3,4,5}.
    double last = 1e300;
    for (int n_f : {2, 3, 4, 5}) {
        const double mse = quantization::codebook_mse(quantization::train_lloyd_max(p, n_f));
        if (!(mse < last)) pass = false;
        last = mse;
        detail += " mse(" + std::to_string(n_f) + ")=" + std::to_string(mse);
    }

    // Quantized protocol reproduces the unquantized selection; the 90/100
    // threshold was pre-calibrated (the pilot run agreed on 100/100).
    const NetworkConfig small{2, 3, 1, 1.0};
    quantization::CodebookCache cache;
    int agree = 0;
    for (int d = 0; d < 100; ++d) {
        const auto r = generate_rayleigh(small, 6000000 + d);
        const auto fine = protocol::run_centralized(r, {1, 2}, 8, cache);
        const auto exact = protocol::run_centralized(r, {1, 2}, protocol::kUnquantized, cache);
        if (fine.chosen.candidate_index == exact.chosen.candidate_index) ++agree;
    }
    if (agree < 90) pass = false;
    report(6, pass, "lloyd-max quantizer and quantized selection",
           detail + " agreement=" + std::to_string(agree) + "/100");
}

void criterion_7_ordering() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    const int drops = 2000;
    quantization::CodebookCache cache;

    for (double snr_db : {15.0, 25.0}) {
        const NetworkConfig cfg{4, 7, 1, NetworkConfig::n0_from_snr_db(snr_db)};
        double proposed = 0.0, slnr = 0.0, snr = 0.0;
        for (int d = 0; d < drops; ++d) {
            const auto r = generate_rayleigh(cfg, 7000000 + d);
            const auto run =
                protocol::run_centralized(r, {1, 2, 3, 4}, protocol::kUnquantized, cache);
            proposed +=
                beamforming::evaluate(r, beamforming::design_beams(r, run.chosen)).sum_rate;
            slnr += beamforming::evaluate(r, baselines::max_slnr_beams(r)).sum_rate;
            snr += beamforming::evaluate(r, baselines::max_snr_beams(r)).sum_rate;
        }
        if (!(proposed >= slnr && slnr >= snr)) pass = false;
        detail += " " + std::to_string(snr_db) + "dB: " + std::to_string(proposed / drops / 7) +
                  ">=" + std::to_string(slnr / drops / 7) + ">=" + std::to_string(snr / drops / 7);
    }

    // Oracle dominance on small instances.
    const NetworkConfig small{2, 3, 1, 0.1};
    double worst_excess = 0.0;
    for (int d = 0; d < 100; ++d) {
        const auto r = generate_rayleigh(small, 7100000 + d);
        const auto run = protocol::run_centralized(r, {1, 2}, protocol::kUnquantized, cache);
        const double prop =
            beamforming::evaluate(r, beamforming::design_beams(r, run.chosen)).sum_rate;
        const double oracle = beamforming::evaluate(r, baselines::global_oracle(r, 20, 200)).sum_rate;
        worst_excess = std::max(worst_excess, prop - oracle);
    }
    if (!(worst_excess <= 1e-9)) pass = false;
    const double elapsed = seconds_since(start);
    report(7, pass, "baseline rate ordering",
           detail + " excess=" + std::to_string(worst_excess) + ", " + std::to_string(elapsed) +
               " s");
}

void criterion_8_alpha_adaptation() {
    bool pass = true;
    std::string detail;

    quantization::CodebookCache cache;
    std::vector<int> modes;
    for (double snr_db : {-5.0, 10.0, 25.0}) {
        const NetworkConfig cfg{4, 7, 1, NetworkConfig::n0_from_snr_db(snr_db)};
        std::map<int, int> hist;
        for (int d = 0; d < 2000; ++d) {
            const auto r = generate_rayleigh(cfg, 8000000 + d);
            const auto run =
                protocol::run_centralized(r, {2, 3, 4}, protocol::kUnquantized, cache);
            ++hist[run.chosen.alpha()];
        }
        int mode = -1, best = -1;
        for (const auto& [alpha, count] : hist)
            if (count > best) {
                best = count;
                mode = alpha;
            }
        modes.push_back(mode);
        detail += " mode(" + std::to_string(snr_db) + "dB)=" + std::to_string(mode);
    }
    for (std::size_t i = 0; i + 1 < modes.size(); ++i)
        if (modes[i] > modes[i + 1]) pass = false;

    const NetworkConfig small{2, 3, 1, 1.0};
    const auto fig1 = harness::fig1_experiment(small, {-20.0, 30.0}, 100, 16, 150, 424242);
    const double low = fig1.cells[0].iffree_mean;
    const double high = fig1.cells[1].iffree_mean;
    if (!(low <= 0.5 && high >= 1.0)) pass = false;
    report(8, pass, "alpha adapts with SNR",
           detail + " iffree(-20dB)=" + std::to_string(low) + " iffree(30dB)=" +
               std::to_string(high));
}

void criterion_9_numerics_kernels() {
    bool pass = true;
    std::string detail;

    // Recurrence residuals over the random grid.
    oracles::Random rng(31415);
    double worst_residual = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double s = -10.0 + 15.0 * rng.uniform();
        const double x = 1e-3 + (20.0 - 1e-3) * rng.uniform();
        const double lhs = numerics::upper_incomplete_gamma(s + 1.0, x);
        const double rhs =
            s * numerics::upper_incomplete_gamma(s, x) + std::pow(x, s) * std::exp(-x);
        worst_residual = std::max(worst_residual, std::abs(lhs - rhs) / std::abs(lhs));
    }
    if (worst_residual > 1e-10) pass = false;
    detail += "residual=" + std::to_string(worst_residual);

    // Singular-vector kernel against a million-sample sweep.
    const CMat g = rng.gaussian_matrix(3, 4);
    const CVec w = numerics::smallest_right_singular_vector(g);
    const double residual = (g * w).squaredNorm();
    double sweep_min = 1e300;
    for (int k = 0; k < 1000000; ++k)
        sweep_min = std::min(sweep_min, (g * rng.unit_vector(4)).squaredNorm());
    if (!(residual <= sweep_min + 1e-8)) pass = false;

    // Rayleigh kernel against a million-sample sweep.
    const CVec h = rng.gaussian_vector(4);
    CMat b = CMat::Identity(4, 4);
    for (int k = 0; k < 2; ++k) {
        const CVec v = rng.gaussian_vector(4);
        b += v * v.adjoint();
    }
    const CVec wr = numerics::dominant_rayleigh_vector(h, b);
    const auto quotient = [&](const CVec& v) {
        return std::norm(h.dot(v)) / std::real(v.dot(b * v));
    };
    double sweep_max = 0.0;
    for (int k = 0; k < 1000000; ++k) sweep_max = std::max(sweep_max, quotient(rng.unit_vector(4)));
    if (!(quotient(wr) >= sweep_max - 1e-8)) pass = false;

    report(9, pass, "numerics kernels beat their oracles", detail);
}

} // namespace

int main() {
    criterion_1_zero_interference();
    criterion_2_accounting();
    criterion_3_global_rate_bound();
    criterion_4_case_ordering();
    criterion_5_rate_pdf();
    criterion_6_quantizer();
    criterion_7_ordering();
    criterion_8_alpha_adaptation();
    criterion_9_numerics_kernels();
    std::printf("NOTE  criterion 10 - full-scale figure reproductions are provided as optional "
                "long-running specs under specs/, not asserted here\n");
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
