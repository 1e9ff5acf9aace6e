#ifndef MISOLAB_SELECTION_HPP
#define MISOLAB_SELECTION_HPP

#include "misolab/beamforming.hpp"
#include "misolab/channel.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace misolab::selection {

using beamforming::Selection;
using channel::NetworkConfig;

/// All interference-free-user hypotheses for the alpha values in A, in
/// canonical order: alpha descending, then free sets in lexicographic order.
struct CandidateSet {
    std::vector<int> alphas;           ///< the A set, descending
    std::vector<Selection> candidates; ///< candidate_index == position

    int n_g() const { return static_cast<int>(candidates.size()); }
};

/// Per-candidate, per-F-member rate entries (possibly quantized). A candidate
/// is scoreable only once all of its F members' entries are present.
class RateTable {
  public:
    void set(int candidate_index, UserId user, double value);
    std::optional<double> get(int candidate_index, UserId user) const;
    bool complete_for(const Selection& candidate) const;
    double sum_for(const Selection& candidate) const; ///< throws if incomplete

    nlohmann::json to_json() const;
    static RateTable from_json(const nlohmann::json& j);

  private:
    struct Entry {
        int candidate_index;
        UserId user;
        double value;
    };
    std::vector<Entry> entries_;
};

/// Candidate enumeration. A must be a subset of {1, ..., n_t}; in multiuser
/// networks alpha == n_t is only allowed when n_u divides n_t, and those
/// candidates take all users of every choice of n_t/n_u cells.
CandidateSet enumerate_candidates(const NetworkConfig& cfg, const std::vector<int>& alphas);

/// Largest feasible number of interference-free users when n_a BSs transmit
/// with non-zero power (n_u users per cell).
int alpha_max(int n_t, int n_a, int n_u = 1);

/// Analytic upper bound on the mean of the global-CSI rate part for one
/// candidate with the given alpha:
///   (N - alpha) * log2(1 + (n_t - alpha) e^{n0/2} (n0/2)^{N-2} Gamma(2-N, n0/2))
/// with N = n_c * n_u. Exactly zero when alpha == n_t.
double rbar_global(int n_t, int n_c, int alpha, double n0, int n_u = 1);

/// Number of rate scalars each BS contributes to the exchanged table, i.e. the
/// count of (candidate, own user) pairs under A. Identical for every BS.
long long rates_per_bs(const NetworkConfig& cfg, const std::vector<int>& alphas);

/// argmax_c sum_{m in F_c} table(c, m) + rbar_global(alpha_c); ties broken by
/// canonical candidate order (first wins). Throws if any candidate's row is
/// incomplete.
Selection choose_selection(const CandidateSet& candidates, const RateTable& table,
                           const NetworkConfig& cfg);

} // namespace misolab::selection

#endif
