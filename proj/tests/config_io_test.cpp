#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "squidqed/config.hpp"
#include "squidqed/io.hpp"
#include "squidqed/runner.hpp"

using namespace squidqed;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("squidqed_config_io_" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const config_error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseConfig, EmptyDocumentGivesPairDefaults) {
    const RunConfig c = parse_config("");
    EXPECT_EQ(c.scenario, RunKind::pair_generation);
    const auto d = pair_generation_defaults();
    EXPECT_EQ(c.params.omega20_0, d.params.omega20_0);
    EXPECT_EQ(c.params.v1, d.params.v1);
    EXPECT_EQ(c.options.t_end, d.options.t_end);
    EXPECT_EQ(c.options.integrator.ode.rel_tol, d.options.integrator.ode.rel_tol);
    EXPECT_TRUE(c.write_csv);
    EXPECT_TRUE(c.write_json);
}

TEST(ParseConfig, TransferDerivesV1FromV2) {
    const RunConfig c = parse_config("scenario = transfer\nv2 = 0.001");
    EXPECT_EQ(c.scenario, RunKind::transfer);
    EXPECT_DOUBLE_EQ(c.params.v1, 0.002);
    EXPECT_DOUBLE_EQ(c.params.v2, 0.001);
    EXPECT_EQ(c.params.omega_b, transfer_defaults().params.omega_b);
}

TEST(ParseConfig, RateRelations) {
    EXPECT_DOUBLE_EQ(parse_config("scenario = transfer\nv1 = 0.004").params.v2, 0.002);
    EXPECT_DOUBLE_EQ(parse_config("v2 = 0.0003").params.v1, 0.0003);
    EXPECT_NE(config_error_message("scenario = transfer\nv1 = 0.001\nv2 = 0.001"), "");
    EXPECT_NE(config_error_message("v1 = 0"), "");
    // no relation for free-form runs
    const RunConfig c = parse_config("scenario = custom\nv1 = 0.001\nv2 = 0.0");
    EXPECT_EQ(c.params.v2, 0.0);
}

TEST(ParseConfig, NegativeTEndNamesTheKey) {
    const std::string m = config_error_message("t_end = -5");
    EXPECT_NE(m.find("t_end"), std::string::npos) << m;
    EXPECT_NE(m.find("> 0"), std::string::npos) << m;
    EXPECT_NE(m.find("line 1"), std::string::npos) << m;
}

TEST(ParseConfig, UnknownKeyIsFatal) {
    const std::string m = config_error_message("# typo below\nomega_bb = 3");
    EXPECT_NE(m.find("omega_bb"), std::string::npos) << m;
    EXPECT_NE(m.find("line 2"), std::string::npos) << m;
}

TEST(ParseConfig, SyntaxErrorsCarryLineNumbers) {
    EXPECT_NE(config_error_message("t_end = 10\n\nthis line has no equals").find("line 3"), std::string::npos);
    EXPECT_NE(config_error_message("[model\nv1 = 1").find("line 1"), std::string::npos);
    EXPECT_NE(config_error_message("[nosuch]").find("unknown section"), std::string::npos);
    EXPECT_NE(config_error_message("t_end = 1\nt_end = 2").find("duplicate"), std::string::npos);
    EXPECT_NE(config_error_message("t_end = ten").find("not a finite number"), std::string::npos);
    EXPECT_NE(config_error_message("t_end =").find("missing value"), std::string::npos);
}

TEST(ParseConfig, SectionsAndComments) {
    const RunConfig c = parse_config(
        "# run setup\n"
        "[run]\n"
        "scenario = transfer   # inline comment\n"
        "t_end = 900\n"
        "format = json\n"
        "[model]\n"
        "omega_b = 19.7\n"
        "[integrator]\n"
        "sample_interval = 0.25\n");
    EXPECT_EQ(c.options.t_end, 900.0);
    EXPECT_EQ(c.params.omega_b, 19.7);
    EXPECT_EQ(c.options.integrator.sample_interval, 0.25);
    EXPECT_FALSE(c.write_csv);
    EXPECT_TRUE(c.write_json);
    EXPECT_NE(config_error_message("[model]\nt_end = 4").find("belongs to section [run]"), std::string::npos);
}

TEST(ParseConfig, OutOfRangeValues) {
    EXPECT_NE(config_error_message("sample_interval = 0").find("sample_interval"), std::string::npos);
    EXPECT_NE(config_error_message("rel_tol = 0.5").find("<= 0.01"), std::string::npos);
    EXPECT_NE(config_error_message("scenario = nope").find("pair-generation"), std::string::npos);
    EXPECT_NE(config_error_message("format = xml").find("csv, json"), std::string::npos);
    EXPECT_NE(config_error_message("crossing_min_population = 2").find("[0, 1]"), std::string::npos);
}

TEST(ParseConfig, OverridesReplaceFileValues) {
    const RunConfig c = parse_config("t_end = 100", {parse_override("t_end=200"), parse_override("seed = 7")});
    EXPECT_EQ(c.options.t_end, 200.0);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_THROW(parse_override("t_end"), config_error);
    EXPECT_THROW(parse_config("", {parse_override("bogus=1")}), config_error);
}

TEST(ParseConfig, CustomInitialState) {
    const RunConfig c = parse_config("scenario = custom\nc1 = 0.6\nc4 = 0, 0.8");
    EXPECT_EQ(c.initial[0], complex(0.6, 0.0));
    EXPECT_EQ(c.initial[3], complex(0.0, 0.8));
    EXPECT_NE(config_error_message("scenario = custom\nc1 = 0.5").find("|c|^2"), std::string::npos);
    EXPECT_NE(config_error_message("c1 = 1").find("custom"), std::string::npos);
}

TEST(ParseConfig, LadderDefaultsToOneEffectivePeriod) {
    const RunConfig c = parse_config("scenario = ladder-compare\ng = 0.02\nDelta = 2\nomega = 10");
    EXPECT_DOUBLE_EQ(c.ladder.delta_a, 8.0);
    EXPECT_DOUBLE_EQ(c.ladder.delta_b, 12.0);
    EXPECT_DOUBLE_EQ(c.ladder_t_end, effective_rabi_period(c.ladder));
}

TEST(Csv, HeaderAndFormatting) {
    MeasureRow r;
    r.t = 0.5;
    r.P = {0.25, 0.25, 0.25, 0.25};
    r.EF1 = 1.0 / 3.0;
    r.EF_ab = -0.0;
    const std::string csv = timeseries_csv({r});
    std::istringstream is(csv);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "t,P1,P2,P3,P4,EF1,EF2,EF3,EF_squid,EF_ab,Cl1_squid,Cl1_ab,norm_drift");
    EXPECT_EQ(row, "0.5,0.25,0.25,0.25,0.25,0.333333333333,0,0,0,0,0,0,0");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.back(), '\n');
}

TEST(Csv, PopulationSumRevalidated) {
    MeasureRow r;
    r.P = {0.5, 0.5, 1e-7, 0.0};
    EXPECT_THROW(timeseries_csv({r}), numerical_error);
}

TEST(Json, DensityMatrixAsReImPairs) {
    const double h = 1.0 / std::sqrt(2.0);
    const auto rho = partial_trace(Amplitudes{{0.0, h, h, 0.0}}, {Factor::T, Factor::P});
    const json j = to_json(rho);
    ASSERT_EQ(j.size(), 4u);
    ASSERT_EQ(j[1].size(), 4u);
    EXPECT_NEAR(j[1][2][0].get<double>(), 0.5, 1e-15);
    EXPECT_EQ(j[1][2][1].get<double>(), 0.0);
    EXPECT_EQ(j[3][3], json::array({0.0, 0.0}));
}

TEST(Runner, ComputeIsDeterministic) {
    RunConfig c = parse_config("scenario = transfer\nt_end = 300");
    const auto a = compute(c);
    const auto b = compute(c);
    EXPECT_EQ(a.files, b.files);
    ASSERT_TRUE(a.files.count("report.json"));
    const json j = json::parse(a.files.at("report.json"));
    EXPECT_EQ(j["artifact_version"], artifact_version);
    EXPECT_EQ(j["config"]["scenario"], "transfer");
    EXPECT_TRUE(j["report"].contains("final_rho_ab"));
}

TEST(Runner, IncompleteRunKeepsPartialOutput) {
    const auto out = compute(parse_config("Omega_a = 0\nOmega_b = 0\nt_end = 100"));
    EXPECT_EQ(out.status, exit_incomplete);
    ASSERT_TRUE(out.files.count("report.json"));
    EXPECT_EQ(json::parse(out.files.at("report.json"))["complete"], false);
    EXPECT_EQ(out.error["error"]["kind"], "scenario_incomplete");
}

TEST(Runner, NumericalFailureHasNoFiles) {
    const auto out = compute(parse_config("max_steps = 5\nt_end = 100"));
    EXPECT_EQ(out.status, exit_numerical);
    EXPECT_TRUE(out.files.empty());
    EXPECT_EQ(out.error["error"]["kind"], "integration");
}

TEST(AtomicWrite, WritesAllFiles) {
    const fs::path dir = scratch("ok");
    write_files_atomically(dir, {{"a.txt", "alpha\n"}, {"b.txt", "beta\n"}});
    std::ifstream a(dir / "a.txt");
    std::string s;
    std::getline(a, s);
    EXPECT_EQ(s, "alpha");
    EXPECT_TRUE(fs::exists(dir / "b.txt"));
    EXPECT_FALSE(fs::exists(dir / ".a.txt.tmp"));
    fs::remove_all(dir);
}

TEST(AtomicWrite, UnwritableDirectoryLeavesNothing) {
    const fs::path base = scratch("blocked");
    fs::create_directories(base);
    std::ofstream(base / "plain_file") << "x";
    const fs::path dir = base / "plain_file" / "out";
    EXPECT_THROW(write_files_atomically(dir, {{"a.txt", "alpha\n"}}), error);
    EXPECT_FALSE(fs::exists(dir));
    fs::remove_all(base);
}
