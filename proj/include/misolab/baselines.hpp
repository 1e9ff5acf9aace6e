#ifndef MISOLAB_BASELINES_HPP
#define MISOLAB_BASELINES_HPP

#include "misolab/beamforming.hpp"

#include <cstdint>

namespace misolab::baselines {

using beamforming::BeamformingSolution;
using channel::ChannelRealization;

/// Iterative weighted-MMSE sum-rate maximization settings. The per-BS power
/// budget is shared by all of a BS's beams.
struct WmmseConfig {
    int max_iterations = 2;            ///< outer iterations (kappa)
    double power_budget = 1.0;         ///< per BS
    double tolerance = 1e-8;           ///< stop when the sum-rate gain drops below
    double bisection_tolerance = 1e-12; ///< for the power-constraint multiplier

    void validate() const;
};

/// w_i = h_ii / ||h_ii|| for every served user.
BeamformingSolution max_snr_beams(const ChannelRealization& realization);

/// Each beam minimizes its total leakage to every other user (smallest right
/// singular vector of the stacked cross channels).
BeamformingSolution min_gi_beams(const ChannelRealization& realization);

/// Each beam maximizes its SLNR with unit weights over all other users.
BeamformingSolution max_slnr_beams(const ChannelRealization& realization);

/// Isotropic unit vectors, deterministic per seed.
BeamformingSolution random_beams(const ChannelRealization& realization, std::uint64_t seed);

/// Alternating WMMSE updates (MMSE receive scalar, weight 1/MSE, regularized
/// transmit solve with a bisected per-BS multiplier). Sum-rate is
/// non-decreasing across outer iterations.
BeamformingSolution wmmse_beams(const ChannelRealization& realization, const WmmseConfig& cfg);

/// Multi-start projected gradient ascent on the sum-rate over per-beam unit
/// balls: a lower-bound estimate of the jointly optimal solution. Warm starts
/// include the matched filter, min-GI, max-SLNR, WMMSE, and every
/// interference-free-user candidate; `restarts` additional random starts.
BeamformingSolution global_oracle(const ChannelRealization& realization, int restarts, int steps);

/// Per cell, each user's beam nulls its co-cell users' channels and matches
/// the desired channel inside that null space. Requires n_u <= n_t.
BeamformingSolution zf_multiuser_beams(const ChannelRealization& realization);

} // namespace misolab::baselines

#endif
