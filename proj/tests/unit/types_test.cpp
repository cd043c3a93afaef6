#include <gtest/gtest.h>

#include <set>

#include "lgs/explorer.hpp"
#include "lgs/state.hpp"

using namespace lgs;

TEST(Types, NamesRoundTrip) {
  for (auto s : kAllSensors) EXPECT_EQ(parse_sensor(to_string(s)), s);
  for (auto d : kAllDoors) EXPECT_EQ(parse_door(to_string(d)), d);
  for (auto g : kAllGears) EXPECT_EQ(parse_gear(to_string(g)), g);
  for (auto m : kAllMutants) {
    EXPECT_EQ(parse_mutant(to_string(m)), m);
    EXPECT_EQ(parse_mutant(mutant_flag(m)), m);
  }
  EXPECT_FALSE(parse_mutant("no-such-mutant"));
}

TEST(Types, StrongIdsRejectOutOfRange) {
  EXPECT_THROW(ChannelId(0), std::out_of_range);
  EXPECT_THROW(ChannelId(4), std::out_of_range);
  EXPECT_THROW(ModuleId(3), std::out_of_range);
  EXPECT_EQ(ChannelId(3).index(), 2);
}

TEST(FaultSpec, ParseAndPrint) {
  const auto f = parse_fault("door_open:2:LD:StuckWrong@3");
  EXPECT_EQ(f.sensor, SensorName::door_open);
  EXPECT_EQ(f.channel.value(), 2);
  EXPECT_EQ(std::get<DoorId>(f.device), DoorId::LD);
  EXPECT_EQ(f.mode, FaultMode::StuckWrong);
  EXPECT_EQ(f.from_step, 3u);
  EXPECT_EQ(to_string(f), "door_open:2:LD:StuckWrong@3");
  EXPECT_EQ(to_string(parse_fault("handle:1:StuckTrue")), "handle:1:StuckTrue");
}

TEST(FaultSpec, RejectsMalformed) {
  for (const char* bad : {"", "door_open:2:StuckWrong", "handle:1:FD:StuckWrong", "gear_extended:4:FG:StuckWrong",
                          "gear_extended:1:FD:StuckWrong", "handle:1:Sideways", "handle:1:StuckWrong@x"})
    EXPECT_THROW(parse_fault(bad), std::invalid_argument) << bad;
}

TEST(FaultSpec, SetSemantics) {
  PlantState p;
  const auto f = parse_fault("gear_extended:1:FG:StuckWrong");
  p.add_fault(f);
  p.add_fault(f);
  p.add_fault(parse_fault("handle:3:StuckFalse"));
  ASSERT_EQ(p.faults.size(), 2u);
  EXPECT_TRUE(std::is_sorted(p.faults.begin(), p.faults.end()));
}

// 2 single-device families x 3 channels + 4 per-device families x 3 channels x 3 devices.
TEST(FaultSpec, EnumeratesEveryChannel) {
  const auto all = explorer::all_single_channel_faults(FaultMode::StuckWrong);
  EXPECT_EQ(all.size(), 2u * 3u + 4u * 3u * 3u);
  std::set<std::string> names;
  for (const auto& f : all) names.insert(to_string(f));
  EXPECT_EQ(names.size(), all.size());
}
