#include "misolab/beamforming.hpp"

#include "misolab/numerics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>

namespace misolab::beamforming {

bool Selection::contains(UserId u) const {
    return std::binary_search(free_set.begin(), free_set.end(), u);
}

void Selection::validate(const NetworkConfig& cfg) const {
    require(alpha() >= 1, "Selection: F must be non-empty");
    require(alpha() <= cfg.n_t, "Selection: alpha must be <= n_t");
    for (std::size_t k = 0; k < free_set.size(); ++k) {
        const UserId u = free_set[k];
        require(u.cell >= 0 && u.cell < cfg.n_c && u.user >= 0 && u.user < cfg.n_u,
                "Selection: user out of range");
        if (k > 0) require(free_set[k - 1] < u, "Selection: free_set must be sorted and unique");
    }
    if (cfg.n_u > 1 && alpha() == cfg.n_t) {
        require(cfg.n_t % cfg.n_u == 0,
                "Selection: alpha == n_t needs n_t divisible by n_u in multiuser networks");
        std::set<int> cells;
        for (const UserId& u : free_set) cells.insert(u.cell);
        require(static_cast<int>(cells.size()) * cfg.n_u == cfg.n_t,
                "Selection: alpha == n_t must cover all users of exactly n_t/n_u cells");
    }
}

BeamformingSolution::BeamformingSolution(NetworkConfig cfg)
    : cfg_(cfg), beams_(cfg.num_users(), CVec::Zero(cfg.n_t)),
      regimes_(cfg.num_users(), BeamRegime::Muted) {
    cfg_.validate();
}

int BeamformingSolution::index(UserId served) const {
    require(served.cell >= 0 && served.cell < cfg_.n_c && served.user >= 0 && served.user < cfg_.n_u,
            "BeamformingSolution: user out of range");
    return served.cell * cfg_.n_u + served.user;
}

void BeamformingSolution::set_beam(UserId served, CVec w, BeamRegime regime) {
    require(w.size() == cfg_.n_t, "BeamformingSolution: wrong beam dimension");
    const int i = index(served);
    beams_[i] = std::move(w);
    regimes_[i] = regime;
}

const CVec& BeamformingSolution::beam(UserId served) const { return beams_[index(served)]; }

BeamRegime BeamformingSolution::regime(UserId served) const { return regimes_[index(served)]; }

void BeamformingSolution::validate() const {
    for (std::size_t i = 0; i < beams_.size(); ++i) {
        const double n = beams_[i].norm();
        if (regimes_[i] == BeamRegime::Muted) {
            require(n == 0.0, "BeamformingSolution: muted beam must be exactly zero");
        } else {
            require(std::abs(n - 1.0) <= 1e-12, "BeamformingSolution: beam must be unit-norm");
        }
    }
}

namespace {

CMat stack_channel_rows(const LocalCsi& local, const std::vector<UserId>& targets) {
    CMat g(targets.size(), local.config().n_t);
    for (std::size_t k = 0; k < targets.size(); ++k) g.row(k) = local.h(targets[k]).adjoint();
    return g;
}

std::vector<CVec> gather_channels(const LocalCsi& local, const std::vector<UserId>& targets) {
    std::vector<CVec> out;
    out.reserve(targets.size());
    for (const UserId& u : targets) out.push_back(local.h(u));
    return out;
}

std::vector<UserId> erase_user(const std::vector<UserId>& set, UserId u) {
    std::vector<UserId> out;
    out.reserve(set.size());
    for (const UserId& v : set)
        if (!(v == u)) out.push_back(v);
    return out;
}

} // namespace

CVec min_wgi_beam(const LocalCsi& local, UserId serving_user,
                  const std::vector<UserId>& null_targets) {
    require(!null_targets.empty(), "min_wgi_beam: empty null target set (use a matched filter)");
    for (const UserId& u : null_targets)
        require(!(u == serving_user), "min_wgi_beam: serving user cannot be a null target");
    return numerics::smallest_right_singular_vector(stack_channel_rows(local, null_targets));
}

CVec max_wslnr_beam(const LocalCsi& local, UserId serving_user,
                    const std::vector<UserId>& leak_set, double n0) {
    require(n0 > 0.0, "max_wslnr_beam: n0 must be positive");
    for (const UserId& u : leak_set)
        require(!(u == serving_user), "max_wslnr_beam: serving user cannot be in the leak set");
    const CVec& h = local.h(serving_user);
    require(is_finite(h), "max_wslnr_beam: non-finite desired channel");
    if (leak_set.empty()) return h / h.norm();
    const int n = local.config().n_t;
    CMat b = n0 * CMat::Identity(n, n);
    for (const UserId& u : leak_set) {
        const CVec& g = local.h(u);
        require(is_finite(g), "max_wslnr_beam: non-finite leak channel");
        b += g * g.adjoint();
    }
    return numerics::dominant_rayleigh_vector(h, b);
}

CVec zero_forcing_matched_filter(const CVec& desired, const std::vector<CVec>& null_channels) {
    require(is_finite(desired) && desired.norm() > 0.0,
            "zero_forcing_matched_filter: degenerate desired channel");
    if (null_channels.empty()) return desired / desired.norm();

    const int n = static_cast<int>(desired.size());
    CMat span(n, null_channels.size());
    for (std::size_t k = 0; k < null_channels.size(); ++k) {
        require(null_channels[k].size() == n, "zero_forcing_matched_filter: dimension mismatch");
        span.col(k) = null_channels[k];
    }
    Eigen::ColPivHouseholderQR<CMat> qr(span);
    const int rank = static_cast<int>(qr.rank());
    require(rank < n, "zero_forcing_matched_filter: null channels span the whole space");
    CMat q = qr.householderQ();
    const CMat basis = q.leftCols(rank); // orthonormal basis of the channel span
    CVec w = desired - basis * (basis.adjoint() * desired);
    const double nrm = w.norm();
    if (nrm <= 1e-13 * desired.norm()) {
        // Desired channel (numerically) inside the span: fall back to any
        // direction of the orthogonal complement.
        w = q.col(n - 1);
        return w / w.norm();
    }
    return w / nrm;
}

namespace {

// F-member beam: exact null on F \ {m}, desired gain maximized in the leftover
// space. At alpha == n_t the leftover space has rank one, so this coincides
// with the minimum-leakage singular vector.
CVec f_member_beam(const LocalCsi& local, UserId m, const std::vector<UserId>& free_set) {
    return zero_forcing_matched_filter(local.h(m), gather_channels(local, erase_user(free_set, m)));
}

} // namespace

BeamformingSolution design_beams(const ChannelRealization& realization, const Selection& selection) {
    const NetworkConfig& cfg = realization.config();
    selection.validate(cfg);
    const int alpha = selection.alpha();

    BeamformingSolution sol(cfg);
    sol.set_selection(selection);

    for (int i = 0; i < cfg.n_c; ++i) {
        const LocalCsi local = channel::local_csi(realization, i);
        for (int p = 0; p < cfg.n_u; ++p) {
            const UserId served{i, p};
            if (selection.contains(served)) {
                const BeamRegime tag =
                    alpha == cfg.n_t ? BeamRegime::MinWgi : BeamRegime::MaxWslnr;
                sol.set_beam(served, f_member_beam(local, served, selection.free_set), tag);
            } else if (alpha == cfg.n_t) {
                // Only the F cells stay active; everything else transmits nothing.
                sol.set_beam(served, CVec::Zero(cfg.n_t), BeamRegime::Muted);
            } else if (alpha == cfg.n_t - 1) {
                sol.set_beam(served, min_wgi_beam(local, served, selection.free_set),
                             BeamRegime::MinWgi);
            } else {
                sol.set_beam(served,
                             zero_forcing_matched_filter(
                                 local.h(served), gather_channels(local, selection.free_set)),
                             BeamRegime::MaxWslnr);
            }
        }
    }
    return sol;
}

BeamformingSolution design_beams_extra_null(const ChannelRealization& realization,
                                            const Selection& selection, UserId extra_null) {
    const NetworkConfig& cfg = realization.config();
    selection.validate(cfg);
    require(selection.alpha() == cfg.n_t - 1,
            "design_beams_extra_null: only defined for alpha == n_t - 1");
    require(!selection.contains(extra_null), "design_beams_extra_null: extra user must be outside F");

    BeamformingSolution sol(cfg);
    sol.set_selection(selection);
    for (int i = 0; i < cfg.n_c; ++i) {
        const LocalCsi local = channel::local_csi(realization, i);
        for (int p = 0; p < cfg.n_u; ++p) {
            const UserId served{i, p};
            if (selection.contains(served)) {
                std::vector<UserId> targets = erase_user(selection.free_set, served);
                targets.push_back(extra_null);
                std::sort(targets.begin(), targets.end());
                sol.set_beam(served, min_wgi_beam(local, served, targets), BeamRegime::MinWgi);
            } else {
                sol.set_beam(served, min_wgi_beam(local, served, selection.free_set),
                             BeamRegime::MinWgi);
            }
        }
    }
    return sol;
}

RateReport evaluate(const ChannelRealization& realization, const BeamformingSolution& solution) {
    const NetworkConfig& cfg = realization.config();
    require(solution.config() == cfg, "evaluate: solution built for a different config");

    RateReport report;
    report.sinr.resize(cfg.num_users());
    report.rate.resize(cfg.num_users());

    for (int i = 0; i < cfg.n_c; ++i) {
        for (int p = 0; p < cfg.n_u; ++p) {
            const UserId user{i, p};
            double desired = 0.0;
            double interference = 0.0;
            for (int j = 0; j < cfg.n_c; ++j) {
                const CVec& hj = realization.h(j, user);
                for (int r = 0; r < cfg.n_u; ++r) {
                    const double power = std::norm(hj.dot(solution.beam(UserId{j, r})));
                    if (j == i && r == p)
                        desired = power;
                    else
                        interference += power;
                }
            }
            const double gamma = desired / (interference + cfg.n0);
            const int idx = i * cfg.n_u + p;
            report.sinr[idx] = gamma;
            report.rate[idx] = std::log2(1.0 + gamma);
            report.sum_rate += report.rate[idx];
            if (solution.selection() && solution.selection()->contains(user))
                report.local_part += report.rate[idx];
            else
                report.global_part += report.rate[idx];
        }
    }
    return report;
}

std::vector<LocalRateTerm> local_rate_terms(const LocalCsi& local,
                                            const std::vector<Selection>& candidates, double n0) {
    require(n0 > 0.0, "local_rate_terms: n0 must be positive");
    std::vector<LocalRateTerm> terms;
    for (const Selection& cand : candidates) {
        cand.validate(local.config());
        bool found = false;
        for (const UserId& m : cand.free_set) {
            if (m.cell != local.bs()) continue;
            found = true;
            const CVec w = f_member_beam(local, m, cand.free_set);
            const double gain = std::norm(local.h(m).dot(w));
            terms.push_back({cand.candidate_index, m, std::log2(1.0 + gain / n0)});
        }
        require(found, "local_rate_terms: candidate contains no user of this BS");
    }
    return terms;
}

} // namespace misolab::beamforming
