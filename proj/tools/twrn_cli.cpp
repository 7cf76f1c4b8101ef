#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twrn/pep_analysis.hpp"
#include "twrn/power_allocation.hpp"
#include "twrn/sim_harness.hpp"
#include "twrn/validate_suite.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void print_sweep_summary(const twrn::SweepResult& result) {
    std::printf("%8s  %-12s %12s %10s %12s\n", "snr_db", "receiver", "blocks",
                "errors", "bler");
    for (const twrn::SweepRow& r : result.rows)
        std::printf("%8.2f  %-12s %12llu %10llu %12.4e\n", r.snr_db,
                    twrn::receiver_name(r.receiver),
                    static_cast<unsigned long long>(r.blocks),
                    static_cast<unsigned long long>(r.block_errors), r.bler);
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 const std::string& out, std::int64_t seed_override,
                 std::int64_t target_override, std::int64_t max_blocks_override) {
    std::vector<twrn::PresetRun> runs;
    if (!preset.empty() && !config_path.empty()) {
        std::cerr << "error: --config and --preset are mutually exclusive\n";
        return kExitConfig;
    }
    if (!preset.empty()) {
        std::uint64_t seed = seed_override >= 0 ? std::uint64_t(seed_override) : 1;
        runs = twrn::preset_runs(preset, seed);
    } else if (!config_path.empty()) {
        twrn::SimConfig sc =
            twrn::SimConfig::from_config(twrn::Config::parse_file(config_path));
        if (seed_override >= 0) sc.seed = std::uint64_t(seed_override);
        runs.push_back({"sweep", sc});
    } else {
        std::cerr << "error: simulate needs --config or --preset\n";
        return kExitConfig;
    }
    for (twrn::PresetRun& run : runs) {
        if (target_override > 0)
            run.config.stop.target_block_errors = std::uint64_t(target_override);
        if (max_blocks_override > 0)
            run.config.stop.max_blocks = std::uint64_t(max_blocks_override);
    }

    for (const twrn::PresetRun& run : runs) {
        std::printf("== %s (codebook %s, seed %llu)\n", run.stem.c_str(),
                    run.config.codebook.c_str(),
                    static_cast<unsigned long long>(run.config.seed));
        twrn::SweepResult res = twrn::run_bler_sweep(run.config);
        print_sweep_summary(res);
        if (!out.empty()) {
            std::filesystem::path target;
            if (runs.size() > 1 || std::filesystem::is_directory(out)) {
                std::filesystem::create_directories(out);
                target = std::filesystem::path(out) / (run.stem + ".csv");
            } else {
                target = out;
            }
            twrn::emit_csv(res, target);
            std::printf("wrote %s\n", target.string().c_str());
        }
    }
    return kExitOk;
}

int cmd_pep(const std::string& codebook, double sigma_f_sq, double sigma_g_sq,
            bool use_opa, double alpha1, double alpha2,
            const std::vector<double>& snr_db, const std::string& out) {
    twrn::CodeSelection sel = twrn::select_code(codebook);
    const int n = sel.relay_set.n_relays;
    twrn::ChannelStats stats{sigma_f_sq, sigma_g_sq};
    stats.validate();

    double a1, a2;
    if (alpha1 > 0 || alpha2 > 0) {
        if (!(alpha1 > 0) || !(alpha2 > 0) || !(alpha1 + alpha2 < 1)) {
            std::cerr << "error: need alpha1 > 0, alpha2 > 0, alpha1 + alpha2 < 1\n";
            return kExitConfig;
        }
        a1 = alpha1;
        a2 = alpha2;
    } else if (use_opa) {
        twrn::AllocationResult alloc = twrn::solve_opa(sigma_f_sq, sigma_g_sq, n);
        a1 = alloc.alpha1;
        a2 = alloc.alpha2;
    } else {
        a1 = a2 = 1.0 / (n + 2);
    }

    // worst codeword pair at the reference block carries the curves
    const twrn::CMat s_prev =
        twrn::code_matrix(sel.relay_set, twrn::reference_vector(n));
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::string csv = "snr_db,pep_mgf,pep_simplified,pep_chernoff,bler_union_bound\n";
    for (double snr_point : snr_db) {
        const double gamma = std::pow(10.0, snr_point / 10.0);
        twrn::PowerConfig power = twrn::PowerConfig::split(1.0, a1, a2, 1.0 / gamma, n);
        double worst_mgf = 0, worst_simplified = nan, worst_chernoff = nan;
        for (int k = 0; k < sel.codebook.size(); ++k) {
            for (int j = 0; j < sel.codebook.size(); ++j) {
                if (k == j) continue;
                twrn::RVec lam =
                    twrn::singular_values_of_difference(sel.codebook, k, j, s_prev);
                twrn::PepParams params = twrn::PepParams::from_link(lam, power, stats);
                double v = twrn::pep_mgf(params);
                if (v > worst_mgf) {
                    worst_mgf = v;
                    try {
                        worst_simplified = twrn::pep_simplified(params);
                        worst_chernoff = twrn::pep_chernoff(params);
                    } catch (const std::domain_error&) {
                        worst_simplified = worst_chernoff = nan;  // out of regime
                    }
                }
            }
        }
        double union_bound =
            twrn::bler_union_bound(sel.relay_set, sel.codebook, power, stats);
        csv += fmt_double(snr_point) + ',' + fmt_double(worst_mgf) + ',' +
               fmt_double(worst_simplified) + ',' + fmt_double(worst_chernoff) + ',' +
               fmt_double(union_bound) + '\n';
    }
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f) {
            std::cerr << "error: cannot write " << out << "\n";
            return kExitConfig;
        }
        f << csv;
        std::printf("wrote %s\n", out.c_str());
    }
    return kExitOk;
}

int cmd_opa(double sigma_f_sq, double sigma_g_sq, int n_relays, double p_total) {
    twrn::AllocationResult a =
        twrn::solve_opa(sigma_f_sq, sigma_g_sq, n_relays, 1e-6, p_total);
    std::printf("alpha1        %.6f\n", a.alpha1);
    std::printf("alpha2        %.6f\n", a.alpha2);
    std::printf("alpha_relay   %.6f\n", 1.0 - a.alpha1 - a.alpha2);
    std::printf("p1            %.6g\n", a.p1);
    std::printf("p2            %.6g\n", a.p2);
    std::printf("p_relay_each  %.6g\n", a.p_relay_each);
    std::printf("cost          %.6g\n", a.cost);
    double epa = twrn::opa_cost(1.0 / (n_relays + 2), 1.0 / (n_relays + 2),
                                sigma_f_sq, sigma_g_sq, n_relays);
    std::printf("cost_epa      %.6g\n", epa);
    return kExitOk;
}

int cmd_validate() {
    std::vector<twrn::CheckResult> results = twrn::run_validate_suite();
    bool all = true;
    for (const twrn::CheckResult& r : results) {
        std::printf("[%s] %-34s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%zu checks, %s\n", results.size(), all ? "all passed" : "FAILURES");
    return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-way relay network simulator: distributed differential "
                 "space-time coding with analog network coding"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo BLER sweep");
    std::string sim_config, sim_preset, sim_out;
    std::int64_t sim_seed = -1, sim_target = 0, sim_max_blocks = 0;
    sim->add_option("--config", sim_config, "key = value sweep description");
    sim->add_option("--preset", sim_preset,
                    "canned sweep family: fig2_alamouti, fig3_gsm, fig5_sorc_opa");
    sim->add_option("--out", sim_out, "CSV output file (or directory for presets)");
    sim->add_option("--seed", sim_seed, "override the master seed");
    sim->add_option("--target-errors", sim_target, "override stop.target_errors");
    sim->add_option("--max-blocks", sim_max_blocks, "override stop.max_blocks");

    auto* pep = app.add_subcommand("pep", "analytical pairwise error / union bound curves");
    std::string pep_codebook = "alamouti-bpsk", pep_out;
    double pep_sf = 1.0, pep_sg = 1.0, pep_a1 = 0.0, pep_a2 = 0.0;
    bool pep_opa = false;
    std::vector<double> pep_snr;
    pep->add_option("--codebook", pep_codebook, "code configuration name");
    pep->add_option("--sigma-f-sq,--sigma-f", pep_sf, "variance of the T1-side links");
    pep->add_option("--sigma-g-sq,--sigma-g", pep_sg, "variance of the T2-side links");
    pep->add_flag("--opa", pep_opa, "use the optimized power split");
    pep->add_option("--alpha1", pep_a1, "explicit T1 power fraction");
    pep->add_option("--alpha2", pep_a2, "explicit T2 power fraction");
    pep->add_option("--snr-db", pep_snr, "SNR grid in dB")->required()->delimiter(',');
    pep->add_option("--out", pep_out, "CSV output file (stdout if omitted)");

    auto* opa = app.add_subcommand("opa", "solve the power allocation");
    double opa_sf = 1.0, opa_sg = 1.0, opa_pt = 1.0;
    int opa_n = 2;
    opa->add_option("--sigma-f-sq,--sigma-f", opa_sf, "variance of the T1-side links");
    opa->add_option("--sigma-g-sq,--sigma-g", opa_sg, "variance of the T2-side links");
    opa->add_option("--relays", opa_n, "number of relays");
    opa->add_option("--p-total", opa_pt, "total power budget");

    auto* val = app.add_subcommand("validate", "run the invariant check suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_config, sim_preset, sim_out, sim_seed, sim_target,
                                sim_max_blocks);
        if (pep->parsed())
            return cmd_pep(pep_codebook, pep_sf, pep_sg, pep_opa, pep_a1, pep_a2,
                           pep_snr, pep_out);
        if (opa->parsed()) return cmd_opa(opa_sf, opa_sg, opa_n, opa_pt);
        if (val->parsed()) return cmd_validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
