#include "misolab/channel.hpp"

#include "misolab/rng.hpp"

#include <cmath>
#include <utility>

namespace misolab::channel {

using nlohmann::json;

void NetworkConfig::validate() const {
    require(n_t >= 2, "NetworkConfig: n_t must be >= 2");
    require(n_c >= 2, "NetworkConfig: n_c must be >= 2");
    require(n_u >= 1, "NetworkConfig: n_u must be >= 1");
    require(n0 > 0.0 && std::isfinite(n0), "NetworkConfig: n0 must be positive and finite");
}

double NetworkConfig::snr_db() const { return -10.0 * std::log10(n0); }

double NetworkConfig::n0_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

void PathlossParams::validate() const {
    require(cell_radius_m > 0.0, "PathlossParams: cell_radius_m must be positive");
    require(min_dist_m > 0.0 && min_dist_m < cell_radius_m,
            "PathlossParams: need 0 < min_dist_m < cell_radius_m");
    require(std::isfinite(pathloss_exponent) && pathloss_exponent >= 0.0,
            "PathlossParams: pathloss_exponent must be >= 0");
    require(std::isfinite(tx_power_dbm), "PathlossParams: tx_power_dbm must be finite");
}

ChannelRealization::ChannelRealization(NetworkConfig cfg, std::vector<CVec> h, std::uint64_t seed)
    : cfg_(cfg), seed_(seed), h_(std::move(h)) {
    cfg_.validate();
    require(static_cast<int>(h_.size()) == cfg_.n_c * cfg_.num_users(),
            "ChannelRealization: wrong number of channel vectors");
    for (const CVec& v : h_) {
        require(v.size() == cfg_.n_t, "ChannelRealization: wrong channel dimension");
        require(is_finite(v), "ChannelRealization: non-finite channel entry");
    }
}

int ChannelRealization::flat_index(int bs, UserId u) const {
    require(bs >= 0 && bs < cfg_.n_c, "ChannelRealization: BS index out of range");
    require(u.cell >= 0 && u.cell < cfg_.n_c && u.user >= 0 && u.user < cfg_.n_u,
            "ChannelRealization: user out of range");
    return (bs * cfg_.n_c + u.cell) * cfg_.n_u + u.user;
}

const CVec& ChannelRealization::h(int bs, UserId u) const { return h_[flat_index(bs, u)]; }

LocalCsi::LocalCsi(int bs, NetworkConfig cfg, std::vector<CVec> rows)
    : bs_(bs), cfg_(cfg), rows_(std::move(rows)) {
    require(static_cast<int>(rows_.size()) == cfg_.num_users(),
            "LocalCsi: wrong number of rows");
}

const CVec& LocalCsi::h(UserId u) const {
    require(u.cell >= 0 && u.cell < cfg_.n_c && u.user >= 0 && u.user < cfg_.n_u,
            "LocalCsi: user out of range");
    return rows_[u.cell * cfg_.n_u + u.user];
}

namespace {

// One stream per (seed, bs, user); generation order never matters.
CVec draw_vector(const NetworkConfig& cfg, std::uint64_t seed, int bs, int cell, int user) {
    const std::uint64_t key =
        Rng::mix(seed, static_cast<std::uint64_t>((bs * cfg.n_c + cell) * cfg.n_u + user) + 1);
    Rng rng(key);
    CVec v(cfg.n_t);
    for (int a = 0; a < cfg.n_t; ++a) v(a) = rng.cnormal();
    return v;
}

} // namespace

ChannelRealization generate_rayleigh(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::vector<CVec> h;
    h.reserve(static_cast<std::size_t>(cfg.n_c) * cfg.num_users());
    for (int i = 0; i < cfg.n_c; ++i)
        for (int j = 0; j < cfg.n_c; ++j)
            for (int r = 0; r < cfg.n_u; ++r) h.push_back(draw_vector(cfg, seed, i, j, r));
    return ChannelRealization(cfg, std::move(h), seed);
}

ChannelRealization generate_pathloss(const NetworkConfig& cfg, const PathlossParams& params,
                                     std::uint64_t seed) {
    cfg.validate();
    params.validate();

    // BS grid, 2R spacing; deterministic given n_c.
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_c))));
    std::vector<std::pair<double, double>> bs_pos(cfg.n_c);
    for (int i = 0; i < cfg.n_c; ++i) {
        bs_pos[i] = {2.0 * params.cell_radius_m * (i % cols),
                     2.0 * params.cell_radius_m * (i / cols)};
    }

    // User positions: uniform over the annulus area around the serving BS.
    std::vector<std::pair<double, double>> user_pos(cfg.num_users());
    for (int j = 0; j < cfg.n_c; ++j) {
        for (int r = 0; r < cfg.n_u; ++r) {
            Rng rng(Rng::mix(seed ^ 0x706f73ULL, static_cast<std::uint64_t>(j * cfg.n_u + r) + 1));
            const double u = rng.uniform();
            const double rad = std::sqrt(params.min_dist_m * params.min_dist_m +
                                         u * (params.cell_radius_m * params.cell_radius_m -
                                              params.min_dist_m * params.min_dist_m));
            const double th = 6.283185307179586 * rng.uniform();
            user_pos[j * cfg.n_u + r] = {bs_pos[j].first + rad * std::cos(th),
                                         bs_pos[j].second + rad * std::sin(th)};
        }
    }

    const double tx_lin = std::pow(10.0, params.tx_power_dbm / 10.0);
    std::vector<CVec> h;
    h.reserve(static_cast<std::size_t>(cfg.n_c) * cfg.num_users());
    for (int i = 0; i < cfg.n_c; ++i) {
        for (int j = 0; j < cfg.n_c; ++j) {
            for (int r = 0; r < cfg.n_u; ++r) {
                const double dx = user_pos[j * cfg.n_u + r].first - bs_pos[i].first;
                const double dy = user_pos[j * cfg.n_u + r].second - bs_pos[i].second;
                const double d = std::sqrt(dx * dx + dy * dy);
                const double gain = tx_lin * std::pow(d, -params.pathloss_exponent);
                h.push_back(std::sqrt(gain) * draw_vector(cfg, seed, i, j, r));
            }
        }
    }
    return ChannelRealization(cfg, std::move(h), seed);
}

LocalCsi local_csi(const ChannelRealization& realization, int bs) {
    const NetworkConfig& cfg = realization.config();
    require(bs >= 0 && bs < cfg.n_c, "local_csi: BS index out of range");
    std::vector<CVec> rows;
    rows.reserve(cfg.num_users());
    for (int j = 0; j < cfg.n_c; ++j)
        for (int r = 0; r < cfg.n_u; ++r) rows.push_back(realization.h(bs, UserId{j, r}));
    return LocalCsi(bs, cfg, std::move(rows));
}

json to_json(const NetworkConfig& cfg) {
    return json{{"n_t", cfg.n_t}, {"n_c", cfg.n_c}, {"n_u", cfg.n_u}, {"n0", cfg.n0}};
}

NetworkConfig config_from_json(const json& j) {
    NetworkConfig cfg;
    cfg.n_t = j.at("n_t").get<int>();
    cfg.n_c = j.at("n_c").get<int>();
    cfg.n_u = j.value("n_u", 1);
    cfg.n0 = j.at("n0").get<double>();
    cfg.validate();
    return cfg;
}

json to_json(const ChannelRealization& realization) {
    const NetworkConfig& cfg = realization.config();
    json hs = json::array();
    for (int i = 0; i < cfg.n_c; ++i) {
        for (int j = 0; j < cfg.n_c; ++j) {
            for (int r = 0; r < cfg.n_u; ++r) {
                json vec = json::array();
                const CVec& v = realization.h(i, UserId{j, r});
                for (int a = 0; a < cfg.n_t; ++a)
                    vec.push_back(json::array({v(a).real(), v(a).imag()}));
                hs.push_back(std::move(vec));
            }
        }
    }
    return json{{"config", to_json(cfg)}, {"seed", realization.seed()}, {"h", std::move(hs)}};
}

ChannelRealization realization_from_json(const json& j) {
    const NetworkConfig cfg = config_from_json(j.at("config"));
    const auto& hs = j.at("h");
    require(static_cast<int>(hs.size()) == cfg.n_c * cfg.num_users(),
            "realization_from_json: wrong number of channel vectors");
    std::vector<CVec> h;
    h.reserve(hs.size());
    for (const auto& vec : hs) {
        require(static_cast<int>(vec.size()) == cfg.n_t,
                "realization_from_json: wrong channel dimension");
        CVec v(cfg.n_t);
        for (int a = 0; a < cfg.n_t; ++a) v(a) = cdbl(vec[a][0].get<double>(), vec[a][1].get<double>());
        h.push_back(std::move(v));
    }
    return ChannelRealization(cfg, std::move(h), j.value("seed", std::uint64_t{0}));
}

} // namespace misolab::channel
