#ifndef MISOLAB_CHANNEL_HPP
#define MISOLAB_CHANNEL_HPP

#include "misolab/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace misolab::channel {

/// Static network dimensions and noise level. Channel entries have unit
/// variance per real component, so E||h||^2 = 2 n_t and SNR = 1/n0 under the
/// unit transmit power budget.
struct NetworkConfig {
    int n_t = 2;     ///< antennas per BS
    int n_c = 2;     ///< cells
    int n_u = 1;     ///< users per cell
    double n0 = 1.0; ///< noise variance (linear)

    void validate() const;
    int num_users() const { return n_c * n_u; }
    double snr_db() const;
    static double n0_from_snr_db(double snr_db);

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Geometry of the simplified pathloss drop: users fall uniformly on the
/// annulus [min_dist_m, cell_radius_m] around their serving BS, BSs sit on a
/// square grid with 2*cell_radius_m spacing, and the Rayleigh fading is scaled
/// by tx_power * d^{-pathloss_exponent} with d in meters.
struct PathlossParams {
    double cell_radius_m = 40.0;
    double pathloss_exponent = 3.7;
    double min_dist_m = 3.0;
    double tx_power_dbm = 24.0;

    void validate() const;
};

/// One drop: the complete set of channel vectors h_{i,j_r} from every BS i to
/// every user j_r. Immutable after construction.
class ChannelRealization {
  public:
    ChannelRealization(NetworkConfig cfg, std::vector<CVec> h, std::uint64_t seed = 0);

    const NetworkConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }

    /// Channel from BS `bs` to user `u`.
    const CVec& h(int bs, UserId u) const;

    /// Row-major flat index of (bs, user) pairs; exposed for serialization.
    int flat_index(int bs, UserId u) const;

  private:
    NetworkConfig cfg_;
    std::uint64_t seed_;
    std::vector<CVec> h_;
};

/// The channels a single BS is permitted to see: exactly the vectors rooted at
/// that BS. No other BS's channels are reachable through this view.
class LocalCsi {
  public:
    LocalCsi(int bs, NetworkConfig cfg, std::vector<CVec> rows);

    int bs() const { return bs_; }
    const NetworkConfig& config() const { return cfg_; }
    const CVec& h(UserId u) const;

  private:
    int bs_;
    NetworkConfig cfg_;
    std::vector<CVec> rows_;
};

/// i.i.d. Rayleigh drop: every entry has independent N(0,1) real and imaginary
/// parts. Deterministic for a fixed seed, independent of generation order.
ChannelRealization generate_rayleigh(const NetworkConfig& cfg, std::uint64_t seed);

/// Simplified geometric drop; see PathlossParams.
ChannelRealization generate_pathloss(const NetworkConfig& cfg, const PathlossParams& params,
                                     std::uint64_t seed);

/// Local-CSI view of BS i.
LocalCsi local_csi(const ChannelRealization& realization, int bs);

/// JSON fixture format: {"config": {...}, "seed": n, "h": [[[re, im], ...], ...]}.
nlohmann::json to_json(const ChannelRealization& realization);
ChannelRealization realization_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NetworkConfig& cfg);
NetworkConfig config_from_json(const nlohmann::json& j);

} // namespace misolab::channel

#endif
