// Command-line front end: experiment runner, results validation, codebook
// training, and exchange-bit accounting.

#include "misolab/harness.hpp"
#include "misolab/protocol.hpp"
#include "misolab/quantization.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

int fail(const std::string& message) {
    std::cerr << json{{"error", message}}.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"misolab - multicell MISO coordinated beamforming laboratory"};
    app.require_subcommand(1);

    // run
    std::string spec_path, out_path = "results.csv", out_format = "csv";
    CLI::App* run = app.add_subcommand("run", "run an experiment spec and emit results");
    run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    run->add_option("--out", out_path, "output file");
    run->add_option("--format", out_format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // validate
    std::string results_path, results_format;
    CLI::App* validate = app.add_subcommand("validate", "re-read a results file and check it");
    validate->add_option("results", results_path, "results file")->required();
    validate->add_option("--format", results_format, "csv or jsonl (default: by extension)");

    // codebook train | show
    CLI::App* codebook = app.add_subcommand("codebook", "train or inspect rate codebooks");
    codebook->require_subcommand(1);
    int cb_nt = 4, cb_alpha = 3, cb_nf = 2;
    double cb_n0 = 1.0;
    std::string cb_out = "codebook.json", cb_in;
    CLI::App* cb_train = codebook->add_subcommand("train", "train a Lloyd-Max codebook");
    cb_train->add_option("--nt", cb_nt, "antennas per BS")->required();
    cb_train->add_option("--alpha", cb_alpha, "interference-free user count")->required();
    cb_train->add_option("--n0", cb_n0, "noise variance")->required();
    cb_train->add_option("--nf", cb_nf, "bits per rate scalar")->required();
    cb_train->add_option("--out", cb_out, "output JSON file");
    CLI::App* cb_show = codebook->add_subcommand("show", "print a codebook and its MSE");
    cb_show->add_option("codebook", cb_in, "codebook JSON file")->required();

    // account
    std::string acct_scheme;
    int acct_nc = 7, acct_nt = 4, acct_kappa = 2, acct_nf = 2;
    long long acct_nf_total = 35;
    CLI::App* account = app.add_subcommand("account", "print exchange bit/byte accounting");
    account->add_option("scheme", acct_scheme, "proposed | wmmse | global")
        ->required()
        ->check(CLI::IsMember({"proposed", "wmmse", "global"}));
    account->add_option("--nc", acct_nc, "number of cells");
    account->add_option("--nt", acct_nt, "antennas per BS (proposed)");
    account->add_option("--Nf", acct_nf_total, "total per-BS rate bits N_f (proposed)");
    account->add_option("--kappa", acct_kappa, "WMMSE iterations");
    account->add_option("--nf", acct_nf, "bits per scalar (wmmse/global)");

    // selftest
    app.add_subcommand("selftest", "run the quick property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto spec = misolab::harness::ExperimentSpec::from_file(spec_path);
            const auto record = misolab::harness::run_experiment(spec);
            misolab::harness::emit_results(record, out_path, out_format);
            int errors = 0;
            for (const auto& cell : record.cells) {
                if (!cell.error.empty()) {
                    ++errors;
                    std::cerr << json{{"scheme", cell.scheme},
                                      {"snr_db", cell.x},
                                      {"error", cell.error}}
                                     .dump()
                              << "\n";
                }
            }
            std::cout << json{{"written", out_path},
                              {"cells", record.cells.size()},
                              {"scheme_errors", errors}}
                             .dump()
                      << "\n";
            return 0;
        }
        if (validate->parsed()) {
            const auto record = misolab::harness::read_results(results_path, results_format);
            const auto problems = misolab::harness::validate_record(record);
            for (const auto& p : problems) std::cerr << json{{"problem", p}}.dump() << "\n";
            if (!problems.empty()) return fail("results file failed validation");
            std::cout << json{{"valid", true}, {"cells", record.cells.size()}}.dump() << "\n";
            return 0;
        }
        if (cb_train->parsed()) {
            const misolab::quantization::RatePdfParams params{cb_nt, cb_alpha, cb_n0};
            const auto cb = misolab::quantization::train_lloyd_max(params, cb_nf);
            std::ofstream out(cb_out);
            if (!out.good()) return fail("cannot open " + cb_out);
            out << cb.to_json().dump(2) << "\n";
            std::cout << json{{"written", cb_out},
                              {"levels", cb.levels.size()},
                              {"mse", misolab::quantization::codebook_mse(cb)}}
                             .dump()
                      << "\n";
            return 0;
        }
        if (cb_show->parsed()) {
            std::ifstream in(cb_in);
            if (!in.good()) return fail("cannot open " + cb_in);
            json j;
            in >> j;
            const auto cb = misolab::quantization::Codebook::from_json(j);
            json out = cb.to_json();
            out["mse"] = misolab::quantization::codebook_mse(cb);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (account->parsed()) {
            long long bits = 0;
            if (acct_scheme == "proposed")
                bits = misolab::protocol::proposed_exchange_bits(acct_nc, acct_nt, acct_nf_total);
            else if (acct_scheme == "wmmse")
                bits = misolab::protocol::wmmse_exchange_bits(acct_kappa, acct_nf, acct_nc);
            else
                bits = misolab::protocol::global_exchange_bits(acct_nf, acct_nc);
            std::cout << json{{"scheme", acct_scheme},
                              {"bits", bits},
                              {"bytes", misolab::protocol::bits_to_bytes(bits)}}
                             .dump()
                      << "\n";
            return 0;
        }
        // selftest
        return misolab::harness::selftest() ? 0 : fail("selftest found failures");
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}
