#ifndef MISOLAB_BEAMFORMING_HPP
#define MISOLAB_BEAMFORMING_HPP

#include "misolab/channel.hpp"
#include "misolab/types.hpp"

#include <optional>
#include <vector>

namespace misolab::beamforming {

using channel::ChannelRealization;
using channel::LocalCsi;
using channel::NetworkConfig;

/// One interference-free-user hypothesis: the set F of users whose received
/// interference is forced to zero, with alpha = |F|.
struct Selection {
    int candidate_index = -1;
    std::vector<UserId> free_set; ///< sorted, unique

    int alpha() const { return static_cast<int>(free_set.size()); }
    bool contains(UserId u) const;

    /// Enforces 1 <= alpha <= n_t, in-range sorted-unique users, and the
    /// multiuser alpha == n_t structure (all users of exactly n_t/n_u cells).
    void validate(const NetworkConfig& cfg) const;
};

enum class BeamRegime { MinWgi, MaxWslnr, Muted, MatchedFilter, OtherBaseline };

/// One beam per (BS, served user). Every beam is unit-norm or exactly zero;
/// zero only under BeamRegime::Muted.
class BeamformingSolution {
  public:
    explicit BeamformingSolution(NetworkConfig cfg);

    const NetworkConfig& config() const { return cfg_; }

    void set_beam(UserId served, CVec w, BeamRegime regime);
    const CVec& beam(UserId served) const;
    BeamRegime regime(UserId served) const;

    void set_selection(Selection s) { selection_ = std::move(s); }
    const std::optional<Selection>& selection() const { return selection_; }

    /// Checks the unit-or-zero invariant (1e-12 tolerance on unit norms).
    void validate() const;

  private:
    int index(UserId served) const;

    NetworkConfig cfg_;
    std::vector<CVec> beams_;
    std::vector<BeamRegime> regimes_;
    std::optional<Selection> selection_;
};

/// Per-user SINRs and rates for one (realization, solution) pair. local_part /
/// global_part split the sum-rate by membership in the solution's Selection
/// (0 / sum_rate when the solution carries none).
struct RateReport {
    std::vector<double> sinr; ///< indexed cell * n_u + user
    std::vector<double> rate; ///< log2(1 + sinr)
    double sum_rate = 0.0;
    double local_part = 0.0;
    double global_part = 0.0;
};

/// A rate term a BS can compute on its own: candidate c, one of this BS's
/// users m in F_c, and r_m^[c] = log2(1 + |h^H w|^2 / n0).
struct LocalRateTerm {
    int candidate_index = 0;
    UserId user;
    double rate = 0.0;
};

/// Unit-norm w minimizing the summed leakage to `null_targets`, i.e. the
/// smallest-singular-value right singular vector of the stacked target
/// channels. Exact null (machine precision) whenever the targets span fewer
/// than n_t dimensions; best-effort minimum otherwise.
CVec min_wgi_beam(const LocalCsi& local, UserId serving_user,
                  const std::vector<UserId>& null_targets);

/// Unit-norm w maximizing |h_serving^H w|^2 / (sum_leak |h_k^H w|^2 + n0):
/// the dominant generalized Rayleigh direction (closed form b^{-1} h).
/// With an empty leak set this is the matched filter.
CVec max_wslnr_beam(const LocalCsi& local, UserId serving_user,
                    const std::vector<UserId>& leak_set, double n0);

/// Unit-norm beam that exactly nulls `null_channels` and maximizes the desired
/// gain inside that null space (the zero-leakage limit of the WSLNR maximizer:
/// project the desired channel onto the null space, then normalize). With no
/// null channels this is the matched filter.
CVec zero_forcing_matched_filter(const CVec& desired, const std::vector<CVec>& null_channels);

/// Beams for one Selection, dispatched on alpha:
///   alpha == n_t      : F beams null F \ {m} (rank-one null space, min-WGI);
///                       every BS outside F's cells is muted (exact zero).
///   alpha == n_t - 1  : F beams null F \ {m} and match the desired channel in
///                       the leftover space; non-F beams null F (min-WGI).
///   alpha <= n_t - 2  : F beams as above; non-F beams null F and match their
///                       own desired channel in the leftover space.
/// Every F user's received interference is exactly zero in all regimes.
BeamformingSolution design_beams(const ChannelRealization& realization, const Selection& selection);

/// Alternative arm for alpha == n_t - 1 where each F BS spends its spare
/// dimension nulling one extra user `extra_null` outside F instead of matching
/// its desired channel. Used for the two-strategy rate comparison experiment.
BeamformingSolution design_beams_extra_null(const ChannelRealization& realization,
                                            const Selection& selection, UserId extra_null);

/// SINRs, per-user and sum rates for a complete solution.
RateReport evaluate(const ChannelRealization& realization, const BeamformingSolution& solution);

/// The rate terms this BS can compute with local CSI only, for every candidate
/// whose F contains at least one of this BS's users (throws otherwise). Beams
/// are built with the same construction design_beams uses for F members.
std::vector<LocalRateTerm> local_rate_terms(const LocalCsi& local,
                                            const std::vector<Selection>& candidates, double n0);

} // namespace misolab::beamforming

#endif
