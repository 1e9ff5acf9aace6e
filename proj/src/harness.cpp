#include "misolab/harness.hpp"

#include "misolab/numerics.hpp"
#include "misolab/quantization.hpp"
#include "misolab/rng.hpp"
#include "misolab/selection.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace misolab::harness {

using beamforming::BeamformingSolution;
using beamforming::RateReport;
using channel::ChannelRealization;
using nlohmann::json;

namespace {

constexpr const char* kBuildId = "misolab-1.0.0";

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : allowed)
            if (item.key() == key) ok = true;
        require(ok, "unknown key '" + item.key() + "' in " + context);
    }
}

int worker_count() {
    if (const char* env = std::getenv("MISOLAB_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs tasks [0, n) across the worker pool; `fn` must only touch its own slot.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(worker_count(), n > 0 ? n : 1);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

struct DropResult {
    double sum_rate = 0.0;
    int chosen_alpha = -1;  ///< -1 when the scheme performs no selection
    long long bits = 0;
};

DropResult run_scheme_on_drop(const SchemeConfig& scheme, const ChannelRealization& realization,
                              const quantization::CodebookCache& codebooks,
                              std::uint64_t drop_seed) {
    DropResult out;
    if (scheme.name == "proposed") {
        const protocol::ProtocolOutcome run =
            scheme.protocol == "decentralized"
                ? protocol::run_decentralized(realization, scheme.alphas, scheme.n_f, codebooks)
                : protocol::run_centralized(realization, scheme.alphas, scheme.n_f, codebooks);
        const BeamformingSolution sol = beamforming::design_beams(realization, run.chosen);
        out.sum_rate = beamforming::evaluate(realization, sol).sum_rate;
        out.chosen_alpha = run.chosen.alpha();
        out.bits = run.ledger.total_bits();
        return out;
    }
    BeamformingSolution sol = [&]() -> BeamformingSolution {
        if (scheme.name == "max_snr") return baselines::max_snr_beams(realization);
        if (scheme.name == "min_gi") return baselines::min_gi_beams(realization);
        if (scheme.name == "max_slnr") return baselines::max_slnr_beams(realization);
        if (scheme.name == "random") return baselines::random_beams(realization, drop_seed);
        if (scheme.name == "wmmse") {
            baselines::WmmseConfig cfg;
            cfg.max_iterations = scheme.kappa;
            return baselines::wmmse_beams(realization, cfg);
        }
        if (scheme.name == "global")
            return baselines::global_oracle(realization, scheme.restarts, scheme.steps);
        if (scheme.name == "zf") return baselines::zf_multiuser_beams(realization);
        throw std::invalid_argument("unknown scheme '" + scheme.name + "'");
    }();
    out.sum_rate = beamforming::evaluate(realization, sol).sum_rate;
    if (scheme.name == "wmmse" && scheme.acct_n_f > 0)
        out.bits = protocol::wmmse_exchange_bits(scheme.kappa, scheme.acct_n_f,
                                                 realization.config().n_c);
    if (scheme.name == "global" && scheme.acct_n_f > 0)
        out.bits = protocol::global_exchange_bits(scheme.acct_n_f, realization.config().n_c);
    return out;
}

} // namespace

std::string SchemeConfig::display_name() const {
    if (!label.empty()) return label;
    if (name != "proposed") return name;
    // Comma-free so the name survives as a CSV field.
    std::ostringstream os;
    os << "proposed[a=";
    for (std::size_t i = 0; i < alphas.size(); ++i) os << (i ? "+" : "") << alphas[i];
    os << ";nf=" << n_f;
    if (protocol == "decentralized") os << ";decentralized";
    os << "]";
    return os.str();
}

void ExperimentSpec::validate() const {
    require(experiment == "sweep" || experiment == "fig1",
            "ExperimentSpec: experiment must be 'sweep' or 'fig1'");
    require(scenario == "rayleigh" || scenario == "pathloss",
            "ExperimentSpec: scenario must be 'rayleigh' or 'pathloss'");
    network.validate();
    require(!sweep.empty(), "ExperimentSpec: sweep must be non-empty");
    require(drops >= 1, "ExperimentSpec: drops must be >= 1");
    if (experiment == "sweep")
        require(!schemes.empty(), "ExperimentSpec: schemes must be non-empty");
    for (const SchemeConfig& s : schemes) {
        require(!s.name.empty(), "ExperimentSpec: scheme without a name");
        if (s.name == "proposed") {
            require(!s.alphas.empty(), "ExperimentSpec: proposed scheme needs an alphas list");
            require(s.n_f >= 0, "ExperimentSpec: n_f must be >= 0");
            require(s.protocol == "centralized" || s.protocol == "decentralized",
                    "ExperimentSpec: protocol must be centralized or decentralized");
        }
    }
    if (scenario == "pathloss") pathloss.validate();
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
    check_keys(j,
               {"version", "experiment", "scenario", "network", "sweep_snr_db", "sweep_tx_dbm",
                "drops", "seed", "schemes", "pathloss", "fig1_restarts", "fig1_steps"},
               "experiment spec");
    require(j.contains("version") && j.at("version").get<int>() == 1,
            "experiment spec: missing or unsupported version (expected 1)");

    ExperimentSpec spec;
    spec.experiment = j.value("experiment", "sweep");
    spec.scenario = j.value("scenario", "rayleigh");

    const json& net = j.at("network");
    check_keys(net, {"n_t", "n_c", "n_u", "n0", "snr_db"}, "network");
    spec.network.n_t = net.at("n_t").get<int>();
    spec.network.n_c = net.at("n_c").get<int>();
    spec.network.n_u = net.value("n_u", 1);
    if (net.contains("snr_db")) {
        require(!net.contains("n0"), "network: give n0 or snr_db, not both");
        spec.network.n0 = NetworkConfig::n0_from_snr_db(net.at("snr_db").get<double>());
    } else {
        spec.network.n0 = net.value("n0", 1.0);
    }

    if (spec.scenario == "rayleigh") {
        require(j.contains("sweep_snr_db"), "experiment spec: rayleigh needs sweep_snr_db");
        spec.sweep = j.at("sweep_snr_db").get<std::vector<double>>();
    } else {
        require(j.contains("sweep_tx_dbm"), "experiment spec: pathloss needs sweep_tx_dbm");
        spec.sweep = j.at("sweep_tx_dbm").get<std::vector<double>>();
    }
    spec.drops = j.value("drops", 1);
    spec.seed = j.value("seed", std::uint64_t{1});
    spec.fig1_restarts = j.value("fig1_restarts", 20);
    spec.fig1_steps = j.value("fig1_steps", 200);

    if (j.contains("pathloss")) {
        const json& pl = j.at("pathloss");
        check_keys(pl, {"cell_radius_m", "pathloss_exponent", "min_dist_m", "tx_power_dbm"},
                   "pathloss");
        spec.pathloss.cell_radius_m = pl.value("cell_radius_m", 40.0);
        spec.pathloss.pathloss_exponent = pl.value("pathloss_exponent", 3.7);
        spec.pathloss.min_dist_m = pl.value("min_dist_m", 3.0);
        spec.pathloss.tx_power_dbm = pl.value("tx_power_dbm", 24.0);
    }

    if (j.contains("schemes")) {
        for (const json& s : j.at("schemes")) {
            check_keys(s,
                       {"name", "label", "alphas", "n_f", "protocol", "kappa", "acct_n_f",
                        "restarts", "steps"},
                       "scheme");
            SchemeConfig sc;
            sc.name = s.at("name").get<std::string>();
            sc.label = s.value("label", "");
            if (s.contains("alphas")) sc.alphas = s.at("alphas").get<std::vector<int>>();
            sc.n_f = s.value("n_f", 0);
            sc.protocol = s.value("protocol", "centralized");
            sc.kappa = s.value("kappa", 2);
            sc.acct_n_f = s.value("acct_n_f", 0);
            sc.restarts = s.value("restarts", 20);
            sc.steps = s.value("steps", 200);
            spec.schemes.push_back(std::move(sc));
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open experiment spec: " + path);
    json j;
    in >> j;
    return from_json(j);
}

int count_interference_free(const ChannelRealization& realization,
                            const BeamformingSolution& solution) {
    const NetworkConfig& cfg = realization.config();
    std::vector<double> interference(cfg.num_users(), 0.0);
    double max_i = 0.0;
    for (int i = 0; i < cfg.n_c; ++i) {
        for (int p = 0; p < cfg.n_u; ++p) {
            const UserId user{i, p};
            double acc = 0.0;
            for (int j = 0; j < cfg.n_c; ++j)
                for (int r = 0; r < cfg.n_u; ++r) {
                    if (j == i && r == p) continue;
                    acc += std::norm(realization.h(j, user).dot(solution.beam(UserId{j, r})));
                }
            interference[i * cfg.n_u + p] = acc;
            max_i = std::max(max_i, acc);
        }
    }
    if (max_i == 0.0) return cfg.num_users(); // a silent network frees everyone
    int count = 0;
    for (double v : interference)
        if (v < max_i / 100.0) ++count;
    return count;
}

ResultRecord run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.experiment == "fig1")
        return fig1_experiment(spec.network, spec.sweep, spec.drops, spec.fig1_restarts,
                               spec.fig1_steps, spec.seed);

    ResultRecord record;
    record.build_id = kBuildId;
    record.timestamp = timestamp_now();
    record.seed = spec.seed;
    record.drops = spec.drops;
    record.experiment = spec.experiment;

    const quantization::CodebookCache codebooks;

    for (std::size_t point = 0; point < spec.sweep.size(); ++point) {
        const double x = spec.sweep[point];
        NetworkConfig cfg = spec.network;
        PathlossParams pl = spec.pathloss;
        if (spec.scenario == "rayleigh")
            cfg.n0 = NetworkConfig::n0_from_snr_db(x);
        else
            pl.tx_power_dbm = x;

        // Realizations are shared across schemes for a fair comparison.
        std::vector<ChannelRealization> drops;
        drops.reserve(spec.drops);
        for (int d = 0; d < spec.drops; ++d) {
            const std::uint64_t drop_seed = Rng::mix(Rng::mix(spec.seed, point + 1), d + 1);
            drops.push_back(spec.scenario == "rayleigh"
                                ? channel::generate_rayleigh(cfg, drop_seed)
                                : channel::generate_pathloss(cfg, pl, drop_seed));
        }

        for (const SchemeConfig& scheme : spec.schemes) {
            ResultCell cell;
            cell.scheme = scheme.display_name();
            cell.x = x;
            try {
                std::vector<DropResult> results(spec.drops);
                std::atomic<bool> failed{false};
                std::string failure;
                std::mutex failure_mutex;
                parallel_for(spec.drops, [&](int d) {
                    if (failed.load()) return;
                    try {
                        const std::uint64_t drop_seed =
                            Rng::mix(Rng::mix(spec.seed, point + 1), d + 1);
                        results[d] = run_scheme_on_drop(scheme, drops[d], codebooks, drop_seed);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        failed.store(true);
                        failure = e.what();
                    }
                });
                if (failed.load()) throw std::runtime_error(failure);

                double sum = 0.0, sum_sq = 0.0, bits = 0.0;
                for (const DropResult& r : results) {
                    const double per_cell = r.sum_rate / cfg.n_c;
                    sum += per_cell;
                    sum_sq += per_cell * per_cell;
                    bits += static_cast<double>(r.bits);
                    if (r.chosen_alpha >= 0) ++cell.alpha_hist[r.chosen_alpha];
                }
                const double n = spec.drops;
                cell.rate_mean = sum / n;
                const double var = std::max(0.0, sum_sq / n - cell.rate_mean * cell.rate_mean);
                cell.rate_stderr = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
                cell.exchange_bytes = bits / n / 8.0;
            } catch (const std::exception& e) {
                cell.error = e.what();
                cell.rate_mean = std::nan("");
            }
            record.cells.push_back(std::move(cell));
        }
    }
    return record;
}

ResultRecord fig1_experiment(const NetworkConfig& base, const std::vector<double>& snr_db,
                             int drops, int restarts, int steps, std::uint64_t seed) {
    require(drops >= 1, "fig1_experiment: drops must be >= 1");
    ResultRecord record;
    record.build_id = kBuildId;
    record.timestamp = timestamp_now();
    record.seed = seed;
    record.drops = drops;
    record.experiment = "fig1";

    for (std::size_t point = 0; point < snr_db.size(); ++point) {
        NetworkConfig cfg = base;
        cfg.n0 = NetworkConfig::n0_from_snr_db(snr_db[point]);

        std::vector<double> rates(drops), counts(drops);
        parallel_for(drops, [&](int d) {
            const std::uint64_t drop_seed = Rng::mix(Rng::mix(seed, point + 1), d + 1);
            const ChannelRealization realization = channel::generate_rayleigh(cfg, drop_seed);
            const BeamformingSolution sol = baselines::global_oracle(realization, restarts, steps);
            rates[d] = beamforming::evaluate(realization, sol).sum_rate / cfg.n_c;
            counts[d] = count_interference_free(realization, sol);
        });

        ResultCell cell;
        cell.scheme = "global-oracle";
        cell.x = snr_db[point];
        double sum = 0.0, sum_sq = 0.0, csum = 0.0;
        for (int d = 0; d < drops; ++d) {
            sum += rates[d];
            sum_sq += rates[d] * rates[d];
            csum += counts[d];
        }
        cell.rate_mean = sum / drops;
        const double var = std::max(0.0, sum_sq / drops - cell.rate_mean * cell.rate_mean);
        cell.rate_stderr = drops > 1 ? std::sqrt(var / (drops - 1.0)) : 0.0;
        cell.iffree_mean = csum / drops;
        record.cells.push_back(std::move(cell));
    }
    return record;
}

namespace {

std::string hist_to_string(const std::map<int, long long>& hist) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [alpha, count] : hist) {
        if (!first) os << "|";
        os << alpha << ":" << count;
        first = false;
    }
    return os.str();
}

std::map<int, long long> hist_from_string(const std::string& s) {
    std::map<int, long long> hist;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, '|')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) continue;
        hist[std::stoi(item.substr(0, colon))] = std::stoll(item.substr(colon + 1));
    }
    return hist;
}

json record_meta(const ResultRecord& r) {
    return json{{"build_id", r.build_id}, {"timestamp", r.timestamp}, {"seed", r.seed},
                {"drops", r.drops},       {"experiment", r.experiment}};
}

} // namespace

void emit_results(const ResultRecord& record, const std::string& path, const std::string& format) {
    require(format == "csv" || format == "jsonl", "emit_results: format must be csv or jsonl");
    std::ofstream out(path);
    require(out.good(), "emit_results: cannot open " + path);

    if (format == "csv") {
        out << "# " << record_meta(record).dump() << "\n";
        out << "scheme,snr_db,rate_mean,rate_stderr,alpha_hist,exchange_bytes,iffree_mean\n";
        out.precision(17);
        for (const ResultCell& c : record.cells) {
            out << c.scheme << "," << c.x << "," << c.rate_mean << "," << c.rate_stderr << ","
                << hist_to_string(c.alpha_hist) << "," << c.exchange_bytes << "," << c.iffree_mean
                << "\n";
        }
    } else {
        out << json{{"meta", record_meta(record)}}.dump() << "\n";
        for (const ResultCell& c : record.cells) {
            json row{{"scheme", c.scheme},
                     {"snr_db", c.x},
                     {"rate_mean", c.rate_mean},
                     {"rate_stderr", c.rate_stderr},
                     {"alpha_hist", hist_to_string(c.alpha_hist)},
                     {"exchange_bytes", c.exchange_bytes},
                     {"iffree_mean", c.iffree_mean}};
            if (!c.error.empty()) row["error"] = c.error;
            out << row.dump() << "\n";
        }
    }
    require(out.good(), "emit_results: write failed for " + path);
}

ResultRecord read_results(const std::string& path, const std::string& format_hint) {
    std::string format = format_hint;
    if (format.empty()) {
        if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
            format = "csv";
        else
            format = "jsonl";
    }
    std::ifstream in(path);
    require(in.good(), "read_results: cannot open " + path);
    ResultRecord record;

    std::string line;
    if (format == "csv") {
        require(static_cast<bool>(std::getline(in, line)) && line.rfind("# ", 0) == 0,
                "read_results: missing metadata line");
        const json meta = json::parse(line.substr(2));
        record.build_id = meta.value("build_id", "");
        record.timestamp = meta.value("timestamp", "");
        record.seed = meta.value("seed", std::uint64_t{0});
        record.drops = meta.value("drops", 0);
        record.experiment = meta.value("experiment", "sweep");
        require(static_cast<bool>(std::getline(in, line)) &&
                    line == "scheme,snr_db,rate_mean,rate_stderr,alpha_hist,exchange_bytes,"
                            "iffree_mean",
                "read_results: unexpected CSV header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream is(line);
            std::string field;
            ResultCell c;
            std::getline(is, c.scheme, ',');
            std::getline(is, field, ',');
            c.x = std::stod(field);
            std::getline(is, field, ',');
            c.rate_mean = std::stod(field);
            std::getline(is, field, ',');
            c.rate_stderr = std::stod(field);
            std::getline(is, field, ',');
            c.alpha_hist = hist_from_string(field);
            std::getline(is, field, ',');
            c.exchange_bytes = std::stod(field);
            std::getline(is, field, ',');
            c.iffree_mean = std::stod(field);
            record.cells.push_back(std::move(c));
        }
    } else {
        require(static_cast<bool>(std::getline(in, line)), "read_results: empty file");
        const json meta = json::parse(line).at("meta");
        record.build_id = meta.value("build_id", "");
        record.timestamp = meta.value("timestamp", "");
        record.seed = meta.value("seed", std::uint64_t{0});
        record.drops = meta.value("drops", 0);
        record.experiment = meta.value("experiment", "sweep");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json row = json::parse(line);
            ResultCell c;
            c.scheme = row.at("scheme").get<std::string>();
            c.x = row.at("snr_db").get<double>();
            c.rate_mean = row.at("rate_mean").get<double>();
            c.rate_stderr = row.at("rate_stderr").get<double>();
            c.alpha_hist = hist_from_string(row.value("alpha_hist", ""));
            c.exchange_bytes = row.value("exchange_bytes", 0.0);
            c.iffree_mean = row.value("iffree_mean", 0.0);
            c.error = row.value("error", "");
            record.cells.push_back(std::move(c));
        }
    }
    return record;
}

std::vector<std::string> validate_record(const ResultRecord& record) {
    std::vector<std::string> problems;
    if (record.drops < 1) problems.push_back("drops must be >= 1");
    if (record.build_id.empty()) problems.push_back("missing build id");
    for (std::size_t i = 0; i < record.cells.size(); ++i) {
        const ResultCell& c = record.cells[i];
        const std::string tag = "cell " + std::to_string(i) + " (" + c.scheme + ")";
        if (c.scheme.empty()) problems.push_back(tag + ": empty scheme name");
        if (!c.error.empty()) continue;
        if (!std::isfinite(c.rate_mean)) problems.push_back(tag + ": non-finite rate_mean");
        if (c.rate_stderr < 0.0) problems.push_back(tag + ": negative rate_stderr");
        if (!c.alpha_hist.empty()) {
            long long total = 0;
            for (const auto& [alpha, count] : c.alpha_hist) {
                total += count;
                if (count < 0) problems.push_back(tag + ": negative histogram count");
            }
            if (total != record.drops)
                problems.push_back(tag + ": alpha histogram does not sum to drops");
        }
    }
    return problems;
}

namespace {

bool check(bool ok, const char* name, bool& all_ok) {
    std::cout << (ok ? "ok   - " : "FAIL - ") << name << "\n";
    if (!ok) all_ok = false;
    return ok;
}

} // namespace

bool selftest() {
    bool all_ok = true;

    // Seeded generation is reproducible.
    {
        NetworkConfig cfg{4, 7, 1, 1.0};
        const auto a = channel::generate_rayleigh(cfg, 7);
        const auto b = channel::generate_rayleigh(cfg, 7);
        bool same = true;
        for (int i = 0; i < cfg.n_c && same; ++i)
            for (int j = 0; j < cfg.n_c && same; ++j)
                same = (a.h(i, UserId{j, 0}) - b.h(i, UserId{j, 0})).squaredNorm() == 0.0;
        check(same, "channel generation determinism", all_ok);
    }

    // Incomplete gamma recurrence.
    {
        bool ok = true;
        Rng rng(11);
        for (int k = 0; k < 50 && ok; ++k) {
            const double s = -10.0 + 15.0 * rng.uniform();
            const double x = 0.05 + 19.95 * rng.uniform();
            const double lhs = numerics::upper_incomplete_gamma(s + 1.0, x);
            const double rhs = s * numerics::upper_incomplete_gamma(s, x) +
                               std::pow(x, s) * std::exp(-x);
            ok = std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs);
        }
        check(ok, "incomplete gamma downward recurrence", all_ok);
    }

    // Exact interference nulls in all three regimes.
    {
        NetworkConfig cfg{4, 7, 1, 1.0};
        bool ok = true;
        for (int alpha : {2, 3, 4}) {
            for (int d = 0; d < 20 && ok; ++d) {
                const auto realization = channel::generate_rayleigh(cfg, 1000 + d);
                beamforming::Selection sel;
                for (int m = 0; m < alpha; ++m) sel.free_set.push_back(UserId{m, 0});
                const auto sol = beamforming::design_beams(realization, sel);
                const auto report = beamforming::evaluate(realization, sol);
                for (int m = 0; m < alpha; ++m) {
                    const double desired =
                        std::norm(realization.h(m, UserId{m, 0}).dot(sol.beam(UserId{m, 0})));
                    const double interference = desired / report.sinr[m] - cfg.n0;
                    ok = ok && interference <= 1e-12 * desired;
                }
            }
        }
        check(ok, "zero-interference invariant", all_ok);
    }

    // Ledger totals match the closed forms.
    {
        NetworkConfig cfg{4, 7, 1, 1.0};
        const auto realization = channel::generate_rayleigh(cfg, 5);
        quantization::CodebookCache cache;
        const auto run = protocol::run_centralized(realization, {3, 4}, 1, cache);
        const long long expect =
            protocol::proposed_exchange_bits(cfg.n_c, cfg.n_t,
                                             selection::rates_per_bs(cfg, {3, 4}) * 1);
        check(run.ledger.total_bits() == expect, "centralized ledger closed form", all_ok);
    }

    // Lloyd-Max fixed point at n_f=2.
    {
        const quantization::RatePdfParams params{4, 3, 1.0};
        const auto cb = quantization::train_lloyd_max(params, 2);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < cb.levels.size(); ++i) {
            const double mid = 0.5 * (cb.levels[i] + cb.levels[i + 1]);
            ok = ok && std::abs(cb.boundaries[i] - mid) <= 1e-9 * (1.0 + mid);
        }
        check(ok, "lloyd-max boundary midpoints", all_ok);
    }

    return all_ok;
}

} // namespace misolab::harness
