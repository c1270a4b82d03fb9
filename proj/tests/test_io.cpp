#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "evsched/evsched.hpp"
#include "oracles.hpp"

using namespace evsched;
namespace fs = std::filesystem;

TEST(BlocksJsonl, RoundTrip) {
  oracle::Rng rng(61);
  BlockGenOptions g;
  g.n_blocks = 12;
  const auto blocks = random_blocks(g, rng);
  std::stringstream ss;
  write_blocks_jsonl(ss, blocks);
  const auto back = read_blocks_jsonl(ss);
  ASSERT_EQ(back.size(), blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    EXPECT_EQ(back[k].id, blocks[k].id);
    EXPECT_EQ(back[k].trip_ids, blocks[k].trip_ids);
    EXPECT_EQ(back[k].consumption, blocks[k].consumption);
    EXPECT_EQ(back[k].revenue_time, blocks[k].revenue_time);
  }
  std::istringstream bad("{\"block_id\": 1,\n");
  EXPECT_THROW(read_blocks_jsonl(bad), DataError);
}

TEST(SolutionJson, RoundTripPreservesValidation) {
  oracle::Rng rng(62);
  const auto inst = oracle::bench_instance(10, rng);
  ExactOptions full;
  full.assume_full_initial = true;
  const auto sol = solve_exact(inst, full);
  const auto back = solution_from_json(json::parse(solution_to_json(sol).dump()));
  EXPECT_EQ(back.runs, sol.runs);
  EXPECT_EQ(back.next_day, sol.next_day);
  EXPECT_EQ(back.objective, sol.objective);
  EXPECT_EQ(back.optimal, sol.optimal);
  EXPECT_EQ(back.day_charge.size(), sol.day_charge.size());
  EXPECT_TRUE(validate(inst, back, true).feasible());
}

TEST(SolutionJson, RejectsMalformed) {
  EXPECT_THROW(solution_from_json(json::parse(R"({"objective": 1})")), DataError);
  EXPECT_THROW(solution_from_json(json::parse(R"({"runs": [[1]], "objective": 1, "soc": {"x": 1}})")), DataError);
  EXPECT_THROW(parse_arc_key("12"), DataError);
  EXPECT_EQ(parse_arc_key("3-t"), (ArcKey{3, kDepotId}));
  EXPECT_EQ(arc_key({4, 5}), "4-5");
}

TEST(Params, ChargerPowersGiveRates) {
  EnergyParams p;
  EXPECT_NEAR(p.rate_day, 2.0455, 1e-3);
  EXPECT_NEAR(p.rate_night, 0.5682, 1e-3);
  EXPECT_DOUBLE_EQ(p.battery_kwh(), 440.0);
  const auto j = params_to_json(p);
  EXPECT_DOUBLE_EQ(j.at("battery_kwh").get<double>(), 440.0);
  EXPECT_TRUE(j.at("layover_max_s").is_null());
}

TEST(Config, KeysAndAliases) {
  RunConfig c;
  apply_setting(c, "--battery-min", "90");
  EXPECT_DOUBLE_EQ(c.energy.battery_cap, 5400.0);
  apply_setting(c, "range_miles", "60");
  EXPECT_DOUBLE_EQ(c.energy.battery_cap, 7200.0);
  apply_setting(c, "power-day-kw", "220");
  EXPECT_DOUBLE_EQ(c.energy.rate_day, 1.0);
  apply_setting(c, "layover_max_s", "3600");
  EXPECT_EQ(c.energy.layover_max, Seconds{3600});
  apply_setting(c, "layover_max_s", "inf");
  EXPECT_FALSE(c.energy.layover_max.has_value());
  apply_setting(c, "method", "dac");
  EXPECT_EQ(c.method, Method::kDac);
  apply_setting(c, "full_initial", "yes");
  EXPECT_TRUE(c.assume_full_initial);
  apply_setting(c, "overnight-window", "preceding-block");
  EXPECT_EQ(c.overnight_window, OvernightWindow::kPrecedingBlock);
  apply_setting(c, "K", "1000");
  EXPECT_DOUBLE_EQ(c.sdvsp.K, 1000.0);
  EXPECT_THROW(apply_setting(c, "colour", "blue"), DataError);
  EXPECT_THROW(apply_setting(c, "method", "simplex"), DataError);
  EXPECT_THROW(apply_setting(c, "full_initial", "maybe"), DataError);
  EXPECT_THROW(apply_setting(c, "seed", "x"), DataError);
}

TEST(Config, FileAppliesSpeedBeforeRange) {
  const fs::path path = fs::temp_directory_path() / "evsched_test.conf";
  std::ofstream(path) << "# fixture\nrange_miles = 60\nspeed_mph = 20   # slower buses\n\nseed = 7\n";
  RunConfig c;
  apply_config_file(c, path);
  EXPECT_DOUBLE_EQ(c.energy.battery_cap, 10800.0);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.range_limit_s(), 10800);
  EXPECT_THROW(parse_config_text("just words\n", "x.conf"), DataError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/x.conf"), DataError);
}

TEST(Config, SmallFixtureParses) {
  RunConfig c;
  apply_config_file(c, fs::path(EVSCHED_DATA_DIR) / "small.conf");
  EXPECT_DOUBLE_EQ(c.sdvsp.K, 1000.0);
}
