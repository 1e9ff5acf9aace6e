#ifndef MISOLAB_PROTOCOL_HPP
#define MISOLAB_PROTOCOL_HPP

#include "misolab/quantization.hpp"
#include "misolab/selection.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace misolab::protocol {

using beamforming::Selection;
using channel::ChannelRealization;
using channel::NetworkConfig;
using quantization::CodebookCache;
using selection::CandidateSet;
using selection::RateTable;

enum class PayloadKind { QuantizedRates, SelectionIndex };

struct Message {
    int from = 0;
    int to = 0;
    PayloadKind kind = PayloadKind::QuantizedRates;
    long long bits = 0;
    nlohmann::json payload; ///< carried for traces only, not counted in bits
};

struct BitLedger {
    std::vector<Message> messages;

    long long total_bits() const;
    long long total_bytes() const; ///< ceil(total_bits / 8)
    void validate() const;         ///< every message carries > 0 bits
};

struct ProtocolOutcome {
    Selection chosen;
    BitLedger ledger;
    RateTable table; ///< the quantized table as seen by the decider(s)
};

/// Bits per rate scalar. n_f >= 1 quantizes through the trained codebooks;
/// n_f == 0 emulates unquantized exchange (payload counted as 64-bit scalars,
/// selection behaviour identical to scoring exact rates).
constexpr int kUnquantized = 0;

/// Every BS m != 0 sends its quantized table share (N_f = M * n_f bits) to
/// BS 0; BS 0 scores the candidates and sends the winning candidate index
/// (ceil(log2 of the number of possible selections) bits) back to each BS.
ProtocolOutcome run_centralized(const ChannelRealization& realization,
                                const std::vector<int>& alphas, int n_f,
                                const CodebookCache& codebooks);

/// Every BS broadcasts its N_f bits to all n_c - 1 peers and each BS scores
/// the same quantized table independently; the chosen Selections agree by
/// construction and the run checks that they do.
ProtocolOutcome run_decentralized(const ChannelRealization& realization,
                                  const std::vector<int>& alphas, int n_f,
                                  const CodebookCache& codebooks);

/// Index bits of the selection broadcast: ceil(log2 sum_{alpha=1}^{n_t}
/// C(n_c * n_u, alpha)) with the multiuser alpha == n_t term replaced by
/// C(n_c, n_t/n_u) when applicable.
int selection_index_bits(const NetworkConfig& cfg);

/// Closed-form totals for the comparison table.
long long proposed_exchange_bits(int n_c, int n_t, long long n_f_total);
long long wmmse_exchange_bits(int kappa, int n_f, int n_c);
long long global_exchange_bits(int n_f, int n_c);
long long bits_to_bytes(long long bits); ///< ceil(bits / 8)

/// Ordered JSON-lines trace of a ledger's messages.
std::string trace_jsonl(const BitLedger& ledger);

} // namespace misolab::protocol

#endif
