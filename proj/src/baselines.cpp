#include "misolab/baselines.hpp"

#include "misolab/numerics.hpp"
#include "misolab/rng.hpp"
#include "misolab/selection.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <vector>

namespace misolab::baselines {

using beamforming::BeamRegime;
using beamforming::RateReport;
using channel::NetworkConfig;

void WmmseConfig::validate() const {
    require(max_iterations >= 1, "WmmseConfig: max_iterations must be >= 1");
    require(power_budget > 0.0, "WmmseConfig: power_budget must be positive");
    require(tolerance > 0.0, "WmmseConfig: tolerance must be positive");
    require(bisection_tolerance > 0.0, "WmmseConfig: bisection_tolerance must be positive");
}

namespace {

std::vector<UserId> all_users(const NetworkConfig& cfg) {
    std::vector<UserId> users;
    users.reserve(cfg.num_users());
    for (int j = 0; j < cfg.n_c; ++j)
        for (int r = 0; r < cfg.n_u; ++r) users.push_back(UserId{j, r});
    return users;
}

std::vector<UserId> other_users(const NetworkConfig& cfg, UserId self) {
    std::vector<UserId> users;
    users.reserve(cfg.num_users() - 1);
    for (const UserId& u : all_users(cfg))
        if (!(u == self)) users.push_back(u);
    return users;
}

} // namespace

BeamformingSolution max_snr_beams(const ChannelRealization& realization) {
    const NetworkConfig& cfg = realization.config();
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        const CVec& h = realization.h(u.cell, u);
        sol.set_beam(u, h / h.norm(), BeamRegime::MatchedFilter);
    }
    return sol;
}

BeamformingSolution min_gi_beams(const ChannelRealization& realization) {
    const NetworkConfig& cfg = realization.config();
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        const channel::LocalCsi local = channel::local_csi(realization, u.cell);
        sol.set_beam(u, beamforming::min_wgi_beam(local, u, other_users(cfg, u)),
                     BeamRegime::MinWgi);
    }
    return sol;
}

BeamformingSolution max_slnr_beams(const ChannelRealization& realization) {
    const NetworkConfig& cfg = realization.config();
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        const channel::LocalCsi local = channel::local_csi(realization, u.cell);
        sol.set_beam(u, beamforming::max_wslnr_beam(local, u, other_users(cfg, u), cfg.n0),
                     BeamRegime::MaxWslnr);
    }
    return sol;
}

BeamformingSolution random_beams(const ChannelRealization& realization, std::uint64_t seed) {
    const NetworkConfig& cfg = realization.config();
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(u.cell * cfg.n_u + u.user) + 1));
        sol.set_beam(u, rng.unit_vector(cfg.n_t), BeamRegime::OtherBaseline);
    }
    return sol;
}

namespace {

struct BeamSet {
    // One vector per user, indexed cell * n_u + user; norms may be interior.
    std::vector<CVec> w;
};

BeamSet from_solution(const BeamformingSolution& sol) {
    const NetworkConfig& cfg = sol.config();
    BeamSet set;
    set.w.reserve(cfg.num_users());
    for (const UserId& u : all_users(cfg)) set.w.push_back(sol.beam(u));
    return set;
}

BeamformingSolution to_solution(const ChannelRealization& realization, const BeamSet& set,
                                BeamRegime tag) {
    const NetworkConfig& cfg = realization.config();
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        const CVec& w = set.w[u.cell * cfg.n_u + u.user];
        sol.set_beam(u, w, w.norm() == 0.0 ? BeamRegime::Muted : tag);
    }
    return sol;
}

double sum_rate_of(const ChannelRealization& realization, const BeamSet& set) {
    const NetworkConfig& cfg = realization.config();
    double total = 0.0;
    for (const UserId& u : all_users(cfg)) {
        double desired = 0.0, interference = 0.0;
        for (const UserId& v : all_users(cfg)) {
            const double p = std::norm(realization.h(v.cell, u).dot(set.w[v.cell * cfg.n_u + v.user]));
            if (v == u)
                desired = p;
            else
                interference += p;
        }
        total += std::log2(1.0 + desired / (interference + cfg.n0));
    }
    return total;
}

} // namespace

BeamformingSolution wmmse_beams(const ChannelRealization& realization, const WmmseConfig& cfg_w) {
    cfg_w.validate();
    const NetworkConfig& cfg = realization.config();
    const std::vector<UserId> users = all_users(cfg);
    const int nu = cfg.n_u;

    // Matched filters scaled to share the per-BS budget.
    BeamSet beams;
    beams.w.reserve(users.size());
    for (const UserId& u : users) {
        const CVec& h = realization.h(u.cell, u);
        beams.w.push_back(std::sqrt(cfg_w.power_budget / nu) * h / h.norm());
    }

    double last_rate = sum_rate_of(realization, beams);
    for (int iter = 0; iter < cfg_w.max_iterations; ++iter) {
        // Receive scalars and MSE weights.
        std::vector<cdbl> u_rx(users.size());
        std::vector<double> weight(users.size());
        for (std::size_t k = 0; k < users.size(); ++k) {
            const UserId& u = users[k];
            double total_power = cfg.n0;
            for (const UserId& v : users)
                total_power += std::norm(realization.h(v.cell, u).dot(beams.w[v.cell * nu + v.user]));
            const cdbl gain = realization.h(u.cell, u).dot(beams.w[k]); // h^H w
            u_rx[k] = std::conj(gain) / total_power;
            const double mse = std::norm(u_rx[k]) * total_power - 2.0 * std::real(u_rx[k] * gain) + 1.0;
            weight[k] = 1.0 / std::max(mse, 1e-14);
        }

        // Transmit update per BS with a bisected power multiplier.
        for (int i = 0; i < cfg.n_c; ++i) {
            CMat a = CMat::Zero(cfg.n_t, cfg.n_t);
            for (std::size_t k = 0; k < users.size(); ++k) {
                const CVec& h = realization.h(i, users[k]);
                a += weight[k] * std::norm(u_rx[k]) * (h * h.adjoint());
            }
            std::vector<CVec> rhs(nu);
            for (int p = 0; p < nu; ++p) {
                const std::size_t k = static_cast<std::size_t>(i * nu + p);
                rhs[p] = weight[k] * std::conj(u_rx[k]) * realization.h(i, users[k]);
            }
            const auto solve_norm = [&](double mu, std::vector<CVec>& out) {
                Eigen::LLT<CMat> llt(a + mu * CMat::Identity(cfg.n_t, cfg.n_t));
                require(llt.info() == Eigen::Success, "wmmse_beams: transmit solve failed");
                double norm_sq = 0.0;
                for (int p = 0; p < nu; ++p) {
                    out[p] = llt.solve(rhs[p]);
                    norm_sq += out[p].squaredNorm();
                }
                return norm_sq;
            };
            std::vector<CVec> candidate(nu);
            // The unregularized solve may be ill-posed when a is singular, so
            // probe from a tiny ridge.
            double mu_lo = 1e-12;
            if (solve_norm(mu_lo, candidate) > cfg_w.power_budget) {
                double mu_hi = 1.0;
                while (solve_norm(mu_hi, candidate) > cfg_w.power_budget) {
                    mu_hi *= 2.0;
                    require(mu_hi < 1e18, "wmmse_beams: bisection failed to bracket");
                }
                while (mu_hi - mu_lo > cfg_w.bisection_tolerance * (1.0 + mu_hi)) {
                    const double mid = 0.5 * (mu_lo + mu_hi);
                    (solve_norm(mid, candidate) > cfg_w.power_budget ? mu_lo : mu_hi) = mid;
                }
                solve_norm(mu_hi, candidate);
            }
            for (int p = 0; p < nu; ++p) beams.w[i * nu + p] = candidate[p];
        }

        const double rate = sum_rate_of(realization, beams);
        if (rate - last_rate < cfg_w.tolerance && iter > 0) {
            last_rate = rate;
            break;
        }
        last_rate = rate;
    }
    return to_solution(realization, beams, BeamRegime::OtherBaseline);
}

namespace {

// Gradient of the sum-rate (bits) with respect to conj(w) for one beam.
CVec sum_rate_gradient(const ChannelRealization& realization, const BeamSet& set, UserId served,
                       const std::vector<double>& total_power,
                       const std::vector<double>& interference_power) {
    const NetworkConfig& cfg = realization.config();
    constexpr double inv_ln2 = 1.4426950408889634073599246810019;
    CVec grad = CVec::Zero(cfg.n_t);
    const CVec& w = set.w[served.cell * cfg.n_u + served.user];
    for (const UserId& u : all_users(cfg)) {
        const CVec& h = realization.h(served.cell, u);
        const cdbl hw = h.dot(w);
        const int k = u.cell * cfg.n_u + u.user;
        double coeff = 1.0 / total_power[k];
        if (!(u == served)) coeff -= 1.0 / interference_power[k];
        grad += (inv_ln2 * coeff * hw) * h;
    }
    return grad;
}

BeamSet project_unit_balls(BeamSet set) {
    for (CVec& w : set.w) {
        const double n = w.norm();
        if (n > 1.0) w /= n;
    }
    return set;
}

BeamSet ascend(const ChannelRealization& realization, BeamSet set, int steps) {
    const NetworkConfig& cfg = realization.config();
    const std::vector<UserId> users = all_users(cfg);
    set = project_unit_balls(std::move(set));
    double rate = sum_rate_of(realization, set);
    double step = 0.1;
    for (int it = 0; it < steps; ++it) {
        // Current per-user powers.
        std::vector<double> total(users.size()), interf(users.size());
        for (std::size_t k = 0; k < users.size(); ++k) {
            const UserId& u = users[k];
            double desired = 0.0, other = 0.0;
            for (const UserId& v : users) {
                const double p =
                    std::norm(realization.h(v.cell, u).dot(set.w[v.cell * cfg.n_u + v.user]));
                if (v == u)
                    desired = p;
                else
                    other += p;
            }
            total[k] = desired + other + cfg.n0;
            interf[k] = other + cfg.n0;
        }
        BeamSet grad;
        grad.w.reserve(users.size());
        for (const UserId& u : users)
            grad.w.push_back(sum_rate_gradient(realization, set, u, total, interf));

        bool improved = false;
        for (int backtrack = 0; backtrack < 25; ++backtrack) {
            BeamSet trial = set;
            for (std::size_t k = 0; k < users.size(); ++k) trial.w[k] += step * grad.w[k];
            trial = project_unit_balls(std::move(trial));
            const double trial_rate = sum_rate_of(realization, trial);
            if (trial_rate > rate) {
                set = std::move(trial);
                rate = trial_rate;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return set;
}

} // namespace

BeamformingSolution global_oracle(const ChannelRealization& realization, int restarts, int steps) {
    require(restarts >= 1 && steps >= 1, "global_oracle: restarts and steps must be positive");
    const NetworkConfig& cfg = realization.config();

    std::vector<BeamSet> starts;
    starts.push_back(from_solution(max_snr_beams(realization)));
    starts.push_back(from_solution(min_gi_beams(realization)));
    starts.push_back(from_solution(max_slnr_beams(realization)));
    WmmseConfig wcfg;
    wcfg.max_iterations = 20;
    starts.push_back(from_solution(wmmse_beams(realization, wcfg)));
    if (cfg.n_u >= 2 && cfg.n_u <= cfg.n_t)
        starts.push_back(from_solution(zf_multiuser_beams(realization)));
    if (cfg.n_t < cfg.num_users()) {
        std::vector<int> alphas(cfg.n_t);
        for (int a = 1; a <= cfg.n_t; ++a) alphas[a - 1] = a;
        const selection::CandidateSet set = selection::enumerate_candidates(cfg, alphas);
        for (const beamforming::Selection& cand : set.candidates)
            starts.push_back(from_solution(beamforming::design_beams(realization, cand)));
    }
    const std::uint64_t seed = Rng::mix(realization.seed(), 0x6f7261636cULL);
    for (int k = static_cast<int>(starts.size()); k < restarts; ++k)
        starts.push_back(from_solution(random_beams(realization, Rng::mix(seed, k))));

    BeamSet best;
    double best_rate = -1.0;
    for (BeamSet& start : starts) {
        const double start_rate = sum_rate_of(realization, start);
        BeamSet refined = ascend(realization, std::move(start), steps);
        const double rate = sum_rate_of(realization, refined);
        if (rate >= best_rate) {
            best = std::move(refined);
            best_rate = rate;
        }
        require(rate >= start_rate - 1e-12, "global_oracle: ascent decreased the objective");
    }
    return to_solution(realization, best, BeamRegime::OtherBaseline);
}

BeamformingSolution zf_multiuser_beams(const ChannelRealization& realization) {
    const NetworkConfig& cfg = realization.config();
    require(cfg.n_u <= cfg.n_t, "zf_multiuser_beams: needs n_u <= n_t");
    BeamformingSolution sol(cfg);
    for (const UserId& u : all_users(cfg)) {
        std::vector<CVec> nulls;
        for (int q = 0; q < cfg.n_u; ++q)
            if (q != u.user) nulls.push_back(realization.h(u.cell, UserId{u.cell, q}));
        sol.set_beam(u,
                     beamforming::zero_forcing_matched_filter(realization.h(u.cell, u), nulls),
                     nulls.empty() ? BeamRegime::MatchedFilter : BeamRegime::OtherBaseline);
    }
    return sol;
}

} // namespace misolab::baselines
