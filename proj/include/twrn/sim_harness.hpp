#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "twrn/channel_models.hpp"
#include "twrn/config.hpp"
#include "twrn/power_config.hpp"
#include "twrn/twrn_protocol.hpp"

namespace twrn {

enum class PowerMode { Explicit, EqualSplit, Optimized };

struct StoppingRule {
    std::uint64_t target_block_errors = 200;
    std::uint64_t max_blocks = 1'000'000;
};

struct SimConfig {
    std::string codebook = "alamouti-bpsk";
    ChannelStats stats{};
    FadingProcess fading{};
    PowerMode power_mode = PowerMode::EqualSplit;
    double alpha1 = 0.0;  // explicit mode only
    double alpha2 = 0.0;
    std::vector<double> snr_grid_db;
    int frame_symbols = 100;
    StoppingRule stop{};
    std::uint64_t seed = 1;
    std::vector<Receiver> receivers = {Receiver::Differential, Receiver::Genie,
                                       Receiver::Coherent};

    static SimConfig from_config(const Config& cfg);
    void validate() const;
    // the power split this run uses (solves the allocation in Optimized mode)
    std::pair<double, double> resolve_alphas() const;
};

struct SweepRow {
    double snr_db = 0;
    Receiver receiver = Receiver::Differential;
    std::uint64_t blocks = 0;
    std::uint64_t block_errors = 0;
    double bler = 0;
    double bler_ci_low = 0;   // 95% Wilson interval
    double bler_ci_high = 0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double wall_time_s = 0;  // in-memory only, not serialized
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// 95% Wilson score interval for x successes in n trials
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials);

// Deterministic Monte Carlo sweep: frames are indexed up front, grouped in
// fixed batches, and the stopping rule is evaluated on the ordered batch
// prefix, so equal seeds give equal results for any worker count
// (TWRN_THREADS, default 1).
SweepResult run_bler_sweep(const SimConfig& cfg);

// stable on-disk form; excludes wall time so equal seeds give equal bytes
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
std::string csv_string(const SweepResult& result);

struct PresetRun {
    std::string stem;  // output file stem
    SimConfig config;
};

// canned sweep families: fig2_alamouti, fig3_gsm, fig5_sorc_opa
std::vector<PresetRun> preset_runs(const std::string& name, std::uint64_t seed);
std::vector<std::string> known_presets();

}  // namespace twrn
