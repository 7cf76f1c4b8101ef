#include "twrn/sim_harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <thread>

#include "twrn/power_allocation.hpp"

namespace twrn {

namespace {

constexpr int kFramesPerBatch = 25;

int worker_count() {
    if (const char* env = std::getenv("TWRN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 256) return int(v);
        throw std::invalid_argument("TWRN_THREADS must be an integer in [1, 256]");
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

Receiver receiver_from_name(const std::string& s) {
    if (s == "differential") return Receiver::Differential;
    if (s == "genie") return Receiver::Genie;
    if (s == "coherent") return Receiver::Coherent;
    throw std::invalid_argument("unknown receiver: " + s);
}

}  // namespace

SimConfig SimConfig::from_config(const Config& cfg) {
    SimConfig sc;
    sc.codebook = cfg.get_string("codebook", sc.codebook);
    sc.stats.sigma_f_sq = cfg.get_double("channel.sigma_f_sq", 1.0);
    sc.stats.sigma_g_sq = cfg.get_double("channel.sigma_g_sq", 1.0);
    std::string kind = cfg.get_string("channel.kind", "quasi_static");
    if (kind == "quasi_static") {
        sc.fading.kind = FadingKind::QuasiStatic;
    } else if (kind == "jakes") {
        sc.fading.kind = FadingKind::Jakes;
        sc.fading.doppler_hz = cfg.get_double("channel.doppler_hz", 75.0);
        sc.fading.symbol_period_s = cfg.get_double("channel.symbol_period_s", 3.693e-6);
    } else {
        throw std::invalid_argument("channel.kind must be quasi_static or jakes");
    }
    std::string mode = cfg.get_string("power.mode", "epa");
    if (mode == "epa") {
        sc.power_mode = PowerMode::EqualSplit;
    } else if (mode == "opa") {
        sc.power_mode = PowerMode::Optimized;
    } else if (mode == "explicit") {
        sc.power_mode = PowerMode::Explicit;
        sc.alpha1 = cfg.get_double("power.alpha1", 0.0);
        sc.alpha2 = cfg.get_double("power.alpha2", 0.0);
    } else {
        throw std::invalid_argument("power.mode must be epa, opa or explicit");
    }
    sc.snr_grid_db = cfg.get_double_list("snr_db");
    sc.frame_symbols = int(cfg.get_int("frame.symbols", 100));
    sc.stop.target_block_errors = std::uint64_t(cfg.get_int("stop.target_errors", 200));
    sc.stop.max_blocks = std::uint64_t(cfg.get_int("stop.max_blocks", 1'000'000));
    sc.seed = std::uint64_t(cfg.get_int("seed", 1));
    if (cfg.has("receiver")) {
        sc.receivers.clear();
        for (const std::string& r : cfg.get_string_list("receiver"))
            sc.receivers.push_back(receiver_from_name(r));
    }
    auto unknown = cfg.untouched_keys();
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw std::invalid_argument(msg);
    }
    sc.validate();
    return sc;
}

void SimConfig::validate() const {
    select_code(codebook);  // throws on unknown name
    stats.validate();
    fading.validate();
    if (snr_grid_db.empty())
        throw std::invalid_argument("sim config: snr_db grid must be nonempty");
    if (frame_symbols < 2)
        throw std::invalid_argument("sim config: frame.symbols must be >= 2");
    if (stop.target_block_errors < 1 || stop.max_blocks < 1)
        throw std::invalid_argument("sim config: stopping thresholds must be >= 1");
    if (receivers.empty())
        throw std::invalid_argument("sim config: receiver list must be nonempty");
    for (size_t i = 0; i < receivers.size(); ++i)
        for (size_t j = i + 1; j < receivers.size(); ++j)
            if (receivers[i] == receivers[j])
                throw std::invalid_argument("sim config: duplicate receiver");
    if (power_mode == PowerMode::Explicit) {
        if (!(alpha1 > 0) || !(alpha2 > 0) || !(alpha1 + alpha2 < 1))
            throw std::invalid_argument(
                "sim config: explicit power split needs alpha1 > 0, alpha2 > 0, "
                "alpha1 + alpha2 < 1");
    }
}

std::pair<double, double> SimConfig::resolve_alphas() const {
    const int n = select_code(codebook).relay_set.n_relays;
    switch (power_mode) {
        case PowerMode::Explicit:
            return {alpha1, alpha2};
        case PowerMode::EqualSplit:
            return {1.0 / (n + 2), 1.0 / (n + 2)};
        case PowerMode::Optimized: {
            AllocationResult a = solve_opa(stats.sigma_f_sq, stats.sigma_g_sq, n);
            return {a.alpha1, a.alpha2};
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<double, double> wilson_interval(std::uint64_t errors,
                                          std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = double(trials);
    const double p = double(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, (center - half) / denom),
            std::min(1.0, (center + half) / denom)};
}

namespace {

struct PointTask {
    const SimConfig* cfg;
    const CodeSelection* sel;
    PowerConfig power;
    size_t point_index;
};

FrameErrorCounts run_batch(const PointTask& task, std::uint64_t batch) {
    FrameErrorCounts acc;
    for (int i = 0; i < kFramesPerBatch; ++i) {
        std::uint64_t frame = batch * kFramesPerBatch + i;
        RngStream rng =
            RngStream::substream(task.cfg->seed, {task.point_index, frame});
        acc += run_frame(*task.sel, task.power, task.cfg->stats, task.cfg->fading,
                         task.cfg->frame_symbols, rng);
    }
    return acc;
}

// Scheduling-independent stopped sum: batches are merged strictly in index
// order and the rule is evaluated at each batch boundary, so the included
// prefix depends only on the batch contents, never on which worker finished
// first.
FrameErrorCounts run_point(const PointTask& task, int n_workers) {
    const SimConfig& cfg = *task.cfg;
    const int n = task.sel->relay_set.n_relays;
    const std::uint64_t blocks_per_frame = 2ULL * (cfg.frame_symbols / n - 1);
    const std::uint64_t blocks_per_batch = blocks_per_frame * kFramesPerBatch;
    const std::uint64_t max_batches =
        (cfg.stop.max_blocks + blocks_per_batch - 1) / blocks_per_batch;

    auto satisfied = [&](const FrameErrorCounts& c) {
        if (c.data_blocks >= cfg.stop.max_blocks) return true;
        std::uint64_t least = UINT64_MAX;
        for (Receiver r : cfg.receivers)
            least = std::min(least, c.block_errors[size_t(r)]);
        return least >= cfg.stop.target_block_errors;
    };

    std::mutex mu;
    std::uint64_t next = 0;
    std::uint64_t bound = max_batches;
    std::uint64_t prefix_len = 0;
    FrameErrorCounts prefix;
    std::vector<std::optional<FrameErrorCounts>> done(max_batches);

    auto work = [&]() {
        for (;;) {
            std::uint64_t b;
            {
                std::lock_guard lk(mu);
                if (next >= bound) return;
                b = next++;
            }
            FrameErrorCounts c = run_batch(task, b);
            {
                std::lock_guard lk(mu);
                done[b] = c;
                while (prefix_len < bound && done[prefix_len]) {
                    prefix += *done[prefix_len];
                    ++prefix_len;
                    if (satisfied(prefix)) {
                        bound = std::min(bound, prefix_len);
                        break;
                    }
                }
            }
        }
    };

    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return prefix;
}

}  // namespace

SweepResult run_bler_sweep(const SimConfig& cfg) {
    cfg.validate();
    const CodeSelection sel = select_code(cfg.codebook);
    const int n = sel.relay_set.n_relays;
    if (cfg.frame_symbols % n != 0 || cfg.frame_symbols / n < 2)
        throw std::invalid_argument(
            "sim config: frame.symbols must give at least two blocks");
    const auto [a1, a2] = cfg.resolve_alphas();
    const int n_workers = worker_count();

    SweepResult out;
    for (size_t p = 0; p < cfg.snr_grid_db.size(); ++p) {
        const double snr = std::pow(10.0, cfg.snr_grid_db[p] / 10.0);
        PointTask task{&cfg, &sel, PowerConfig::split(1.0, a1, a2, 1.0 / snr, n), p};
        auto t0 = std::chrono::steady_clock::now();
        FrameErrorCounts counts = run_point(task, n_workers);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        for (Receiver r : cfg.receivers) {
            SweepRow row;
            row.snr_db = cfg.snr_grid_db[p];
            row.receiver = r;
            row.blocks = counts.data_blocks;
            row.block_errors = counts.block_errors[size_t(r)];
            row.bler = row.blocks ? double(row.block_errors) / double(row.blocks) : 0.0;
            std::tie(row.bler_ci_low, row.bler_ci_high) =
                wilson_interval(row.block_errors, row.blocks);
            row.frames = counts.frames;
            row.frame_errors = counts.frame_errors[size_t(r)];
            row.wall_time_s = secs;
            out.rows.push_back(row);
        }
    }
    // reporting order: snr ascending, then receiver name ascending
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                         return std::string_view(receiver_name(a.receiver)) <
                                std::string_view(receiver_name(b.receiver));
                     });
    return out;
}

namespace {

// shortest representation that parses back to the same double
std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string csv_string(const SweepResult& result) {
    std::string out =
        "snr_db,receiver,blocks,block_errors,bler,bler_ci_low,bler_ci_high,"
        "frames,frame_errors\n";
    for (const SweepRow& r : result.rows) {
        out += fmt_double(r.snr_db);
        out += ',';
        out += receiver_name(r.receiver);
        out += ',' + std::to_string(r.blocks);
        out += ',' + std::to_string(r.block_errors);
        out += ',' + fmt_double(r.bler);
        out += ',' + fmt_double(r.bler_ci_low);
        out += ',' + fmt_double(r.bler_ci_high);
        out += ',' + std::to_string(r.frames);
        out += ',' + std::to_string(r.frame_errors);
        out += '\n';
    }
    return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << csv_string(result);
}

std::vector<std::string> known_presets() {
    return {"fig2_alamouti", "fig3_gsm", "fig5_sorc_opa"};
}

std::vector<PresetRun> preset_runs(const std::string& name, std::uint64_t seed) {
    auto base = [&](const char* codebook) {
        SimConfig sc;
        sc.codebook = codebook;
        sc.stats = {1.0, 1.0};
        sc.power_mode = PowerMode::Optimized;
        sc.seed = seed;
        return sc;
    };
    std::vector<PresetRun> runs;
    if (name == "fig2_alamouti") {
        SimConfig sc = base("alamouti-bpsk");
        for (int s = 12; s <= 34; s += 2) sc.snr_grid_db.push_back(s);
        runs.push_back({"fig2_alamouti", sc});
    } else if (name == "fig3_gsm") {
        SimConfig qs = base("alamouti-bpsk");
        qs.receivers = {Receiver::Differential};
        for (int s = 12; s <= 30; s += 2) qs.snr_grid_db.push_back(s);
        SimConfig jk = qs;
        jk.seed = seed + 1;
        jk.fading.kind = FadingKind::Jakes;
        jk.fading.doppler_hz = 75.0;
        jk.fading.symbol_period_s = 3.693e-6;
        runs.push_back({"fig3_gsm_quasi_static", qs});
        runs.push_back({"fig3_gsm_jakes", jk});
    } else if (name == "fig5_sorc_opa") {
        int idx = 0;
        for (bool symmetric : {true, false}) {
            for (bool optimized : {false, true}) {
                SimConfig sc = base("sorc4-bpsk");
                sc.seed = seed + idx++;
                sc.receivers = {Receiver::Differential};
                sc.stats = symmetric ? ChannelStats{1.0, 1.0} : ChannelStats{1.0, 10.0};
                sc.power_mode =
                    optimized ? PowerMode::Optimized : PowerMode::EqualSplit;
                for (int s = 4; s <= 24; s += 4) sc.snr_grid_db.push_back(s);
                std::string stem = std::string("fig5_sorc_") +
                                   (symmetric ? "sym_" : "asym_") +
                                   (optimized ? "opa" : "epa");
                runs.push_back({stem, sc});
            }
        }
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return runs;
}

}  // namespace twrn
