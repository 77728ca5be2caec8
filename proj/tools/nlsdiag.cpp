#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlsdiag/nlsdiag.hpp"

namespace fs = std::filesystem;
using namespace nlsdiag;

namespace {

void print_result(const RunResult& r, const fs::path& dir) {
    std::printf("%s -> %s\n", r.scenario.c_str(), dir.string().c_str());
    for (const auto& i : r.invariants)
        std::printf("  %-4s %s%s%s\n", i.pass ? "ok" : "FAIL", i.name.c_str(), i.note.empty() ? "" : "  ", i.note.c_str());
    if (r.aborted) std::printf("  solver aborted: %s\n", r.abort_reason.c_str());
    for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
}

// summary.json files directly under dir or one level down.
std::vector<RunResult> collect(const fs::path& dir) {
    std::vector<RunResult> out;
    auto load = [&](const fs::path& p) { out.push_back(result_from_json(nlohmann::json::parse(read_text(p)))); };
    if (fs::exists(dir / "summary.json")) load(dir / "summary.json");
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_directory() && fs::exists(e.path() / "summary.json")) load(e.path() / "summary.json");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range NLS pairing diagnostics"};
    std::vector<std::string> configs;
    std::string out_dir = "out";
    std::optional<std::string> scenario;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    int max_threads = 1;
    bool report_only = false;
    app.add_option("--config", configs, "Config file; repeat to run several scenarios")->check(CLI::ExistingFile);
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--scenario", scenario, "Override the scenario named in the config");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_flag("--deterministic", deterministic, "Single-threaded, no wall-clock fields in outputs");
    app.add_option("--max-threads", max_threads, "Worker threads for per-time diagnostics")->check(CLI::PositiveNumber);
    app.add_flag("--report-only", report_only, "Rebuild report.md from summaries under --out-dir");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const fs::path root(out_dir);
        if (report_only) {
            const auto results = collect(root);
            if (results.empty()) throw Error("no summary.json found under " + root.string());
            write_text(root / "report.md", emit_report(results));
            std::printf("%s", emit_report(results).c_str());
            return 0;
        }
        if (configs.empty()) throw ConfigError("--config: at least one config file is required");
        if (scenario && configs.size() > 1) throw ConfigError("--scenario: only valid with a single --config");

        RunOptions opt;
        opt.threads = deterministic ? 1 : max_threads;
        opt.deterministic = deterministic;
        std::vector<RunResult> results;
        std::map<std::string, int> used;
        for (const auto& path : configs) {
            ScenarioConfig cfg = parse_config(read_text(path), scenario);
            if (seed) cfg.seed = *seed;
            fs::path dir = root;
            if (configs.size() > 1) {
                const std::string name = to_string(cfg.scenario);
                const int k = used[name]++;
                dir /= k == 0 ? name : name + "_" + std::to_string(k);
            }
            opt.out_dir = dir;
            results.push_back(run_scenario(cfg, opt));
            print_result(results.back(), dir);
        }
        const std::string report = emit_report(results);
        write_text(root / "report.md", report);
        std::printf("\n%s", report.c_str());
        for (const auto& r : results)
            if (!r.all_pass()) return 1;
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
