#ifndef MISOLAB_HARNESS_HPP
#define MISOLAB_HARNESS_HPP

#include "misolab/baselines.hpp"
#include "misolab/channel.hpp"
#include "misolab/protocol.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace misolab::harness {

using channel::NetworkConfig;
using channel::PathlossParams;

/// One scheme entry of an experiment spec.
struct SchemeConfig {
    std::string name;             ///< proposed | max_snr | min_gi | max_slnr |
                                  ///< random | wmmse | global | zf
    std::string label;            ///< display name; derived from params if empty
    std::vector<int> alphas;      ///< proposed: the A set
    int n_f = 0;                  ///< proposed: bits per rate scalar, 0 = unquantized
    std::string protocol = "centralized"; ///< proposed: or "decentralized"
    int kappa = 2;                ///< wmmse outer iterations
    int acct_n_f = 0;             ///< wmmse/global: bits per scalar in the
                                  ///< exchange accounting (0 = not tracked)
    int restarts = 20;            ///< global
    int steps = 200;              ///< global

    std::string display_name() const;
};

/// A full experiment: scenario, sweep, drop count, schemes. Parsed from a
/// versioned JSON file; unknown keys are errors.
struct ExperimentSpec {
    std::string experiment = "sweep"; ///< "sweep" | "fig1"
    std::string scenario = "rayleigh"; ///< "rayleigh" | "pathloss"
    NetworkConfig network;
    std::vector<double> sweep;     ///< SNR (dB) or tx power (dBm) points
    int drops = 1;
    std::uint64_t seed = 1;
    std::vector<SchemeConfig> schemes;
    PathlossParams pathloss;      ///< used when scenario == "pathloss"
    int fig1_restarts = 20;       ///< fig1 oracle settings
    int fig1_steps = 200;

    void validate() const;
    static ExperimentSpec from_json(const nlohmann::json& j);
    static ExperimentSpec from_file(const std::string& path);
};

/// One (scheme, sweep point) aggregate.
struct ResultCell {
    std::string scheme;
    double x = 0.0; ///< the swept value (SNR dB or tx power dBm)
    double rate_mean = 0.0;   ///< per-cell average rate (sum-rate mean / n_c)
    double rate_stderr = 0.0;
    std::map<int, long long> alpha_hist; ///< chosen alpha -> drop count
    double exchange_bytes = 0.0;
    double iffree_mean = 0.0; ///< fig1 only: mean # of interference-free users
    std::string error;        ///< non-empty when the scheme was infeasible
};

struct ResultRecord {
    std::string build_id;
    std::string timestamp;
    std::uint64_t seed = 0;
    int drops = 0;
    std::string experiment = "sweep";
    std::vector<ResultCell> cells;
};

/// Runs every (scheme, sweep point) over `drops` seeded realizations.
/// Deterministic for a fixed seed regardless of the worker count
/// (MISOLAB_WORKERS, default: hardware concurrency).
ResultRecord run_experiment(const ExperimentSpec& spec);

/// Average optimal per-cell rate and average number of almost-interference-free
/// users (received interference below 1/100 of the per-drop maximum; every
/// user counts when all interference is exactly zero).
ResultRecord fig1_experiment(const NetworkConfig& base, const std::vector<double>& snr_db,
                             int drops, int restarts, int steps, std::uint64_t seed);

/// Users whose received interference is below max_interference / 100.
int count_interference_free(const channel::ChannelRealization& realization,
                            const beamforming::BeamformingSolution& solution);

/// Writes a record as "csv" or "jsonl". The CSV column schema is
/// scheme,snr_db,rate_mean,rate_stderr,alpha_hist,exchange_bytes,iffree_mean.
void emit_results(const ResultRecord& record, const std::string& path, const std::string& format);

/// Reads a results file back (format inferred from the extension unless given).
ResultRecord read_results(const std::string& path, const std::string& format = "");

/// Schema and invariant checks on a record; returns human-readable problems.
std::vector<std::string> validate_record(const ResultRecord& record);

/// Quick standing property checks; prints one line per check, returns true
/// when all pass.
bool selftest();

} // namespace misolab::harness

#endif
