#include <gtest/gtest.h>

#include "horst/checks.hpp"
#include "horst/experiments.hpp"

using namespace horst;

namespace {
std::string config_error_message(const json& j) {
    try {
        parse_config(j);
    } catch (const config_error& e) {
        return e.what();
    }
    return "";
}
} // namespace

TEST(Config, ErrorsNameTheField) {
    EXPECT_NE(config_error_message({{"experiment", "implicit_bias_toy"}, {"bogus", 1}}).find("config.bogus"),
              std::string::npos);
    EXPECT_NE(config_error_message({{"experiment", "nope"}}).find("nope"), std::string::npos);
    EXPECT_NE(config_error_message({{"seeds", {0}}}).find("experiment"), std::string::npos);
    EXPECT_NE(config_error_message({{"experiment", "flow_convergence"}, {"seeds", json::array()}}).find("config.seeds"),
              std::string::npos);
    EXPECT_NE(config_error_message({{"experiment", "flow_convergence"}, {"seeds", {-1}}}).find("config.seeds"),
              std::string::npos);
    EXPECT_THROW(parse_config(json::array()), config_error);
}

TEST(Config, MergesOverDefaults) {
    auto c = parse_config({{"experiment", "implicit_bias_toy"}, {"problem", {{"D", 12}}}, {"seeds", {4}}});
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4}));
    EXPECT_EQ(c.settings["problem"]["D"], 12);
    EXPECT_EQ(c.settings["problem"]["N"], 80);
    EXPECT_EQ(c.settings["optimizers"].size(), 8u);
}

TEST(Config, BadNestedValueIsReportedAtRunTime) {
    auto c = parse_config({{"experiment", "implicit_bias_toy"},
                           {"optimizers", {{"x", {{"kind", "sgd"}, {"eta", -1.0}}}}},
                           {"T", 5}});
    try {
        run_experiment(c);
        FAIL() << "expected config_error";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("optimizers.x"), std::string::npos) << e.what();
    }
}

TEST(Experiments, NamesRoundTrip) {
    for (const auto& [kind, name] : experiment_names()) {
        EXPECT_EQ(parse_experiment_kind(name), kind);
        EXPECT_FALSE(experiment_description(kind).empty());
        EXPECT_EQ(default_config(kind)["experiment"], name);
    }
    EXPECT_THROW(parse_experiment_kind("nope"), config_error);
}

TEST(ParallelMap, KeepsIndexOrderAndPropagatesErrors) {
    std::function<int(std::size_t)> sq = [](std::size_t i) { return static_cast<int>(i * i); };
    auto a = parallel_map<int>(1, 50, sq);
    auto b = parallel_map<int>(4, 50, sq);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b[7], 49);
    std::function<int(std::size_t)> bad = [](std::size_t i) -> int {
        if (i == 3) throw argument_error("boom");
        return 0;
    };
    EXPECT_THROW(parallel_map<int>(3, 10, bad), argument_error);
}

TEST(Experiments, OutputsIndependentOfThreadCount) {
    for (const auto& j : checks::determinism_configs()) {
        if (j["experiment"] != "implicit_bias_toy" && j["experiment"] != "flow_convergence") continue;
        auto c = parse_config(j);
        auto x = run_experiment(c, 1);
        auto y = run_experiment(c, 3);
        EXPECT_EQ(x.files, y.files) << j["experiment"];
        EXPECT_TRUE(x.files.count("summary.json"));
    }
}

TEST(Experiments, OperatorPropertiesAllHold) {
    auto out = run_experiment(parse_config({{"experiment", "operator_properties"}, {"samples", 100}}));
    EXPECT_TRUE(out.all_pass());
    EXPECT_EQ(out.summary["experiment"], "operator_properties");
}

TEST(Suites, NineWithBudgets) {
    EXPECT_EQ(suites().size(), 9u);
    for (const auto& s : suites()) EXPECT_GT(s.budget, 0.0);
    EXPECT_TRUE(find_suite("determinism").has_value());
    EXPECT_FALSE(find_suite("nope").has_value());
}
