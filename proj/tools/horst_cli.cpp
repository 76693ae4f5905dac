// horst: run experiments and acceptance suites.
//
//   horst list-experiments
//   horst run --config cfg.json [--seed-override N] [--out DIR] [--check] [--jobs K]
//   horst check <suite|all> [--jobs K]
//
// Exit codes: 0 success, 1 assertion failure, 2 usage or config error.
// HORST_OUT_ROOT sets the output root when neither --out nor output_dir is given.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "horst/checks.hpp"
#include "horst/experiments.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace horst;

namespace {

constexpr int kOk = 0;
constexpr int kAssert = 1;
constexpr int kUsage = 2;

fs::path output_dir_for(const ExperimentConfig& c, const std::string& out_flag) {
    if (!out_flag.empty()) return out_flag;
    if (!c.output_dir.empty()) return c.output_dir;
    const char* root = std::getenv("HORST_OUT_ROOT");
    return fs::path(root && *root ? root : "runs") / to_string(c.experiment);
}

int cmd_list() {
    for (const auto& [kind, name] : experiment_names()) std::printf("%-20s %s\n", name.c_str(), experiment_description(kind).c_str());
    std::printf("\nsuites:");
    for (const auto& s : suites()) std::printf(" %s", s.name.c_str());
    std::printf(" all\n");
    return kOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out, bool check,
            std::size_t jobs) {
    ExperimentConfig c = parse_config(read_json(path));
    if (seed) c.seeds = {*seed};
    fs::path dir = output_dir_for(c, out);
    c.output_dir = dir;
    ExperimentOutput res = run_experiment(c, jobs);
    write_outputs(dir, res);
    std::printf("%s: %zu files in %s\n", to_string(c.experiment).c_str(), res.files.size(), dir.string().c_str());
    for (const auto& a : res.assertions)
        std::printf("  %s %s%s%s\n", a.pass ? "ok  " : "FAIL", a.name.c_str(), a.detail.empty() ? "" : ": ",
                    a.detail.c_str());
    return check && !res.all_pass() ? kAssert : kOk;
}

int cmd_check(const std::string& suite, std::size_t jobs) {
    CheckContext ctx;
    ctx.jobs = jobs;
    ctx.brute_force = [](const MarginProblem& p) -> std::optional<double> {
        auto b = oracle::brute_force_l1_margin(p);
        if (!b.feasible) return std::nullopt;
        return b.objective;
    };
    std::vector<SuiteInfo> todo;
    if (suite == "all") {
        todo = suites();
    } else if (auto s = find_suite(suite)) {
        todo.push_back(*s);
    } else {
        std::fprintf(stderr, "unknown suite '%s' (see list-experiments)\n", suite.c_str());
        return kUsage;
    }
    bool ok = true;
    for (const auto& s : todo) {
        CriterionResult r = run_suite(s, ctx);
        std::printf("%s\n", verdict_line(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? kOk : kAssert;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-composition optimizers: experiments and checks"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list-experiments", "list experiment names and check suites");

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    std::string config, out;
    std::optional<std::uint64_t> seed;
    bool check_mode = false;
    std::size_t jobs = 1;
    run->add_option("--config", config, "experiment config (JSON)")->required();
    run->add_option("--seed-override", seed, "run this single seed instead of the config's list");
    run->add_option("--out", out, "output directory");
    run->add_flag("--check", check_mode, "exit 1 when any experiment assertion fails");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* chk = app.add_subcommand("check", "run an acceptance suite");
    std::string suite;
    chk->add_option("suite", suite, "suite name or 'all'")->required();
    chk->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (list->parsed()) return cmd_list();
        if (run->parsed()) return cmd_run(config, seed, out, check_mode, jobs);
        if (chk->parsed()) return cmd_check(suite, jobs);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kAssert;
    }
    return kUsage;
}
