#include "misolab/protocol.hpp"

#include "misolab/beamforming.hpp"

#include <cmath>
#include <sstream>

namespace misolab::protocol {

using beamforming::LocalRateTerm;
using nlohmann::json;
using quantization::RatePdfParams;

long long BitLedger::total_bits() const {
    long long total = 0;
    for (const Message& m : messages) total += m.bits;
    return total;
}

long long BitLedger::total_bytes() const { return bits_to_bytes(total_bits()); }

void BitLedger::validate() const {
    for (const Message& m : messages) require(m.bits > 0, "BitLedger: message with zero bits");
}

long long bits_to_bytes(long long bits) { return (bits + 7) / 8; }

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

int ceil_log2(long long v) {
    require(v >= 1, "ceil_log2: value must be positive");
    int bits = 0;
    long long pow2 = 1;
    while (pow2 < v) {
        pow2 <<= 1;
        ++bits;
    }
    return bits;
}

long long num_possible_selections(const NetworkConfig& cfg) {
    long long total = 0;
    for (int a = 1; a <= cfg.n_t; ++a) {
        if (cfg.n_u > 1 && a == cfg.n_t) {
            if (cfg.n_t % cfg.n_u == 0) total += binomial(cfg.n_c, cfg.n_t / cfg.n_u);
        } else {
            total += binomial(cfg.num_users(), a);
        }
    }
    return total;
}

struct TableShare {
    int bs = 0;
    long long bits = 0;
    json payload;
    std::vector<LocalRateTerm> terms; ///< quantized (or exact) values
};

// The rate entries BS `bs` contributes, quantized through the per-alpha
// codebooks when n_f >= 1.
TableShare make_share(const ChannelRealization& realization, const CandidateSet& candidates,
                      int bs, int n_f, const CodebookCache& codebooks) {
    const NetworkConfig& cfg = realization.config();
    const channel::LocalCsi local = channel::local_csi(realization, bs);

    std::vector<Selection> own;
    for (const Selection& cand : candidates.candidates)
        for (const UserId& m : cand.free_set)
            if (m.cell == bs) {
                own.push_back(cand);
                break;
            }

    TableShare share;
    share.bs = bs;
    share.payload = json::array();
    std::vector<LocalRateTerm> terms = beamforming::local_rate_terms(local, own, cfg.n0);
    for (LocalRateTerm& term : terms) {
        json entry{{"candidate", term.candidate_index},
                   {"cell", term.user.cell},
                   {"user", term.user.user}};
        if (n_f >= 1) {
            const int alpha = candidates.candidates[term.candidate_index].alpha();
            const quantization::Codebook& cb =
                codebooks.get(RatePdfParams{cfg.n_t, alpha, cfg.n0}, n_f);
            const int idx = quantization::quantize(term.rate, cb);
            term.rate = quantization::dequantize(idx, cb);
            entry["index"] = idx;
            share.bits += n_f;
        } else {
            entry["value"] = term.rate;
            share.bits += 64;
        }
        share.payload.push_back(std::move(entry));
    }
    share.terms = std::move(terms);
    return share;
}

RateTable assemble_table(const std::vector<TableShare>& shares) {
    RateTable table;
    for (const TableShare& s : shares)
        for (const LocalRateTerm& t : s.terms) table.set(t.candidate_index, t.user, t.rate);
    return table;
}

} // namespace

int selection_index_bits(const NetworkConfig& cfg) {
    return ceil_log2(num_possible_selections(cfg));
}

ProtocolOutcome run_centralized(const ChannelRealization& realization,
                                const std::vector<int>& alphas, int n_f,
                                const CodebookCache& codebooks) {
    const NetworkConfig& cfg = realization.config();
    require(n_f >= 0, "run_centralized: n_f must be >= 0");
    const CandidateSet candidates = selection::enumerate_candidates(cfg, alphas);

    ProtocolOutcome out;
    std::vector<TableShare> shares;
    shares.reserve(cfg.n_c);
    for (int bs = 0; bs < cfg.n_c; ++bs)
        shares.push_back(make_share(realization, candidates, bs, n_f, codebooks));

    // Rate shares flow to the decider (BS 0); its own share stays local.
    for (int bs = 1; bs < cfg.n_c; ++bs) {
        out.ledger.messages.push_back(
            {bs, 0, PayloadKind::QuantizedRates, shares[bs].bits, shares[bs].payload});
    }

    out.table = assemble_table(shares);
    out.chosen = selection::choose_selection(candidates, out.table, cfg);

    const int idx_bits = selection_index_bits(cfg);
    for (int bs = 1; bs < cfg.n_c; ++bs) {
        out.ledger.messages.push_back({0, bs, PayloadKind::SelectionIndex, idx_bits,
                                       json{{"candidate", out.chosen.candidate_index}}});
    }
    out.ledger.validate();
    return out;
}

ProtocolOutcome run_decentralized(const ChannelRealization& realization,
                                  const std::vector<int>& alphas, int n_f,
                                  const CodebookCache& codebooks) {
    const NetworkConfig& cfg = realization.config();
    require(n_f >= 0, "run_decentralized: n_f must be >= 0");
    const CandidateSet candidates = selection::enumerate_candidates(cfg, alphas);

    ProtocolOutcome out;
    std::vector<TableShare> shares;
    shares.reserve(cfg.n_c);
    for (int bs = 0; bs < cfg.n_c; ++bs)
        shares.push_back(make_share(realization, candidates, bs, n_f, codebooks));

    for (int bs = 0; bs < cfg.n_c; ++bs) {
        for (int to = 0; to < cfg.n_c; ++to) {
            if (to == bs) continue;
            out.ledger.messages.push_back(
                {bs, to, PayloadKind::QuantizedRates, shares[bs].bits, shares[bs].payload});
        }
    }

    // Each BS assembles its own copy of the table from what it received plus
    // its own share, scores it, and must land on the same candidate; verified
    // rather than assumed.
    std::vector<Selection> picks;
    picks.reserve(cfg.n_c);
    for (int bs = 0; bs < cfg.n_c; ++bs) {
        RateTable view;
        for (const TableShare& s : shares)
            for (const LocalRateTerm& t : s.terms) view.set(t.candidate_index, t.user, t.rate);
        picks.push_back(selection::choose_selection(candidates, view, cfg));
        if (bs == 0) out.table = std::move(view);
    }
    for (int bs = 1; bs < cfg.n_c; ++bs) {
        require(picks[bs].candidate_index == picks[0].candidate_index,
                "run_decentralized: BSs disagreed on the selection");
    }
    out.chosen = picks[0];
    out.ledger.validate();
    return out;
}

long long proposed_exchange_bits(int n_c, int n_t, long long n_f_total) {
    require(n_c >= 2 && n_t >= 2 && n_f_total >= 1, "proposed_exchange_bits: invalid parameters");
    long long sum = 0;
    for (int a = 1; a <= n_t; ++a) sum += binomial(n_c, a);
    return static_cast<long long>(n_c - 1) * (n_f_total + ceil_log2(sum));
}

long long wmmse_exchange_bits(int kappa, int n_f, int n_c) {
    require(kappa >= 1 && n_f >= 1 && n_c >= 2, "wmmse_exchange_bits: invalid parameters");
    return 3LL * kappa * n_f * n_c * n_c;
}

long long global_exchange_bits(int n_f, int n_c) {
    require(n_f >= 1 && n_c >= 2, "global_exchange_bits: invalid parameters");
    return static_cast<long long>(n_f) * n_c * n_c * (n_c - 1);
}

std::string trace_jsonl(const BitLedger& ledger) {
    std::ostringstream os;
    for (const Message& m : ledger.messages) {
        json line{{"from", m.from},
                  {"to", m.to},
                  {"kind", m.kind == PayloadKind::QuantizedRates ? "quantized-rates"
                                                                 : "selection-index"},
                  {"bits", m.bits}};
        if (!m.payload.is_null()) line["payload"] = m.payload;
        os << line.dump() << "\n";
    }
    return os.str();
}

} // namespace misolab::protocol
