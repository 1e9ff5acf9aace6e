#include "misolab/selection.hpp"

#include "misolab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace misolab::selection {

using nlohmann::json;

void RateTable::set(int candidate_index, UserId user, double value) {
    for (Entry& e : entries_) {
        if (e.candidate_index == candidate_index && e.user == user) {
            e.value = value;
            return;
        }
    }
    entries_.push_back({candidate_index, user, value});
}

std::optional<double> RateTable::get(int candidate_index, UserId user) const {
    for (const Entry& e : entries_)
        if (e.candidate_index == candidate_index && e.user == user) return e.value;
    return std::nullopt;
}

bool RateTable::complete_for(const Selection& candidate) const {
    for (const UserId& m : candidate.free_set)
        if (!get(candidate.candidate_index, m)) return false;
    return true;
}

double RateTable::sum_for(const Selection& candidate) const {
    double sum = 0.0;
    for (const UserId& m : candidate.free_set) {
        const auto v = get(candidate.candidate_index, m);
        require(v.has_value(), "RateTable: incomplete row for candidate");
        sum += *v;
    }
    return sum;
}

json RateTable::to_json() const {
    json rows = json::array();
    for (const Entry& e : entries_) {
        rows.push_back(json{{"candidate", e.candidate_index},
                            {"cell", e.user.cell},
                            {"user", e.user.user},
                            {"value", e.value}});
    }
    return rows;
}

RateTable RateTable::from_json(const json& j) {
    RateTable t;
    for (const auto& row : j) {
        t.set(row.at("candidate").get<int>(),
              UserId{row.at("cell").get<int>(), row.at("user").get<int>()},
              row.at("value").get<double>());
    }
    return t;
}

namespace {

void emit_subsets(const std::vector<UserId>& universe, int k, std::size_t start,
                  std::vector<UserId>& current, std::vector<std::vector<UserId>>& out) {
    if (static_cast<int>(current.size()) == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i < universe.size(); ++i) {
        if (universe.size() - i < k - current.size()) break;
        current.push_back(universe[i]);
        emit_subsets(universe, k, i + 1, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<UserId>> subsets_of_users(const NetworkConfig& cfg, int k) {
    std::vector<UserId> universe;
    for (int j = 0; j < cfg.n_c; ++j)
        for (int r = 0; r < cfg.n_u; ++r) universe.push_back(UserId{j, r});
    std::vector<std::vector<UserId>> out;
    std::vector<UserId> current;
    emit_subsets(universe, k, 0, current, out);
    return out;
}

std::vector<std::vector<UserId>> cell_union_sets(const NetworkConfig& cfg, int cells) {
    std::vector<UserId> universe;
    for (int j = 0; j < cfg.n_c; ++j) universe.push_back(UserId{j, 0});
    std::vector<std::vector<UserId>> cell_choices;
    std::vector<UserId> current;
    emit_subsets(universe, cells, 0, current, cell_choices);
    std::vector<std::vector<UserId>> out;
    for (const auto& choice : cell_choices) {
        std::vector<UserId> members;
        for (const UserId& c : choice)
            for (int r = 0; r < cfg.n_u; ++r) members.push_back(UserId{c.cell, r});
        out.push_back(std::move(members));
    }
    return out;
}

} // namespace

CandidateSet enumerate_candidates(const NetworkConfig& cfg, const std::vector<int>& alphas) {
    cfg.validate();
    require(!alphas.empty(), "enumerate_candidates: A must be non-empty");
    require(cfg.n_t < cfg.num_users(),
            "enumerate_candidates: the selection scheme needs n_t < n_c * n_u");

    CandidateSet set;
    set.alphas = alphas;
    std::sort(set.alphas.begin(), set.alphas.end(), std::greater<int>());
    set.alphas.erase(std::unique(set.alphas.begin(), set.alphas.end()), set.alphas.end());

    for (int a : set.alphas) {
        require(a >= 1 && a <= cfg.n_t, "enumerate_candidates: alpha values must lie in [1, n_t]");
        std::vector<std::vector<UserId>> groups;
        if (cfg.n_u > 1 && a == cfg.n_t) {
            require(cfg.n_t % cfg.n_u == 0,
                    "enumerate_candidates: alpha == n_t needs n_u to divide n_t");
            groups = cell_union_sets(cfg, cfg.n_t / cfg.n_u);
        } else {
            groups = subsets_of_users(cfg, a);
        }
        for (auto& g : groups) {
            Selection s;
            s.candidate_index = set.n_g();
            s.free_set = std::move(g);
            set.candidates.push_back(std::move(s));
        }
    }
    return set;
}

int alpha_max(int n_t, int n_a, int n_u) {
    require(n_t >= 2, "alpha_max: n_t must be >= 2");
    require(n_a >= 1, "alpha_max: n_a must be >= 1");
    require(n_u >= 1, "alpha_max: n_u must be >= 1");
    if (n_a * n_u == n_t) return n_t;
    if (n_a * n_u > n_t) return n_t - 1;
    return n_a * n_u;
}

double rbar_global(int n_t, int n_c, int alpha, double n0, int n_u) {
    require(n_t >= 2 && n_c >= 2 && n_u >= 1, "rbar_global: invalid dimensions");
    require(alpha >= 1 && alpha <= n_t, "rbar_global: alpha must lie in [1, n_t]");
    require(n0 > 0.0 && std::isfinite(n0), "rbar_global: n0 must be positive");
    if (alpha == n_t) return 0.0;
    const int n = n_c * n_u;
    const double half = n0 / 2.0;
    // e^{n0/2} (n0/2)^{n-2} Gamma(2-n, n0/2), with the exponential folded into
    // the gamma evaluation so the extremes of n0 stay finite.
    const double mean_ratio =
        (n_t - alpha) * numerics::upper_incomplete_gamma_scaled(2.0 - n, half);
    return (n - alpha) * std::log2(1.0 + mean_ratio);
}

long long rates_per_bs(const NetworkConfig& cfg, const std::vector<int>& alphas) {
    const CandidateSet set = enumerate_candidates(cfg, alphas);
    long long count = 0;
    for (const Selection& c : set.candidates)
        for (const UserId& m : c.free_set)
            if (m.cell == 0) ++count; // symmetric across BSs
    return count;
}

Selection choose_selection(const CandidateSet& candidates, const RateTable& table,
                           const NetworkConfig& cfg) {
    require(candidates.n_g() > 0, "choose_selection: empty candidate set");
    int best = -1;
    double best_score = 0.0;
    for (int c = 0; c < candidates.n_g(); ++c) {
        const Selection& cand = candidates.candidates[c];
        require(table.complete_for(cand), "choose_selection: rate table incomplete");
        const double score =
            table.sum_for(cand) + rbar_global(cfg.n_t, cfg.n_c, cand.alpha(), cfg.n0, cfg.n_u);
        if (best < 0 || score > best_score) {
            best = c;
            best_score = score;
        }
    }
    return candidates.candidates[best];
}

} // namespace misolab::selection
