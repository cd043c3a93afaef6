#include <gtest/gtest.h>

#include "lgs/controller.hpp"
#include "lgs/plant.hpp"

using namespace lgs;
using namespace lgs::controller;

namespace {

// Reference voter written from first principles: count the valid readings and
// accept a value only if strictly more than half of the valid channels say so.
struct Expected {
  bool decided;
  Raw value;
  std::array<bool, 3> dissent;
};

Expected reference(std::array<Raw, 3> v, std::array<bool, 3> valid) {
  int n = 0, ones = 0;
  for (int i = 0; i < 3; ++i)
    if (valid[i]) ++n, ones += v[i];
  Expected e{false, 0, {}};
  if (n == 0) return e;
  const int zeros = n - ones;
  if (2 * ones > n) e = {true, 1, {}};
  else if (2 * zeros > n) e = {true, 0, {}};
  for (int i = 0; i < 3; ++i) {
    if (!valid[i]) continue;
    if (!e.decided) e.dissent[i] = true;
    else e.dissent[i] = v[i] != e.value;
  }
  return e;
}

}  // namespace

TEST(Vote, MatchesReferenceOnEveryInputAndValidityMask) {
  for (int bits = 0; bits < 8; ++bits)
    for (int mask = 0; mask < 8; ++mask) {
      const std::array<Raw, 3> v{Raw(bits & 1), Raw((bits >> 1) & 1), Raw((bits >> 2) & 1)};
      const std::array<bool, 3> valid{bool(mask & 1), bool(mask & 2), bool(mask & 4)};
      const auto got = vote3(v[0], v[1], v[2], valid);
      const auto want = reference(v, valid);
      SCOPED_TRACE(testing::Message() << "bits=" << bits << " mask=" << mask);
      if (mask == 0) {
        EXPECT_EQ(got.status, VoteStatus::AllChannelsInvalid);
        continue;
      }
      EXPECT_EQ(got.status == VoteStatus::Decided, want.decided);
      if (want.decided) EXPECT_EQ(got.value, want.value);
      EXPECT_EQ(got.dissent, want.dissent);
      EXPECT_EQ(got.valid_channels, valid);
    }
}

TEST(Vote, ChannelInvalidatedAfterThresholdDisagreements) {
  ControllerInternals in = initial_state().internals;
  DissentFlags d{};
  d[idx(SensorName::door_open)][1] = true;
  in = update_channel_health(in, d, 2);
  EXPECT_TRUE(in.channel_valid[idx(SensorName::door_open)][1]);
  in = update_channel_health(in, d, 2);
  EXPECT_FALSE(in.channel_valid[idx(SensorName::door_open)][1]);
  EXPECT_EQ(in.valid_count(SensorName::door_open), 2);
  EXPECT_FALSE(in.anomaly_armed);
}

TEST(Vote, AgreementResetsTheCounter) {
  ControllerInternals in = initial_state().internals;
  DissentFlags d{};
  d[0][2] = true;
  in = update_channel_health(in, d, 2);
  in = update_channel_health(in, DissentFlags{}, 2);
  in = update_channel_health(in, d, 2);
  EXPECT_TRUE(in.channel_valid[0][2]);
}

TEST(Vote, SecondLostChannelArmsAnomaly) {
  ControllerInternals in = initial_state().internals;
  in.channel_valid[idx(SensorName::gear_retracted)][0] = false;
  DissentFlags d{};
  d[idx(SensorName::gear_retracted)][2] = true;
  in = update_channel_health(in, d, 1);
  EXPECT_EQ(in.valid_count(SensorName::gear_retracted), 1);
  EXPECT_TRUE(in.anomaly_armed);
}

TEST(Vote, MaskedSensorsAreUntouched) {
  ControllerInternals in = initial_state().internals;
  DissentFlags d{};
  d[idx(SensorName::handle)][0] = true;
  SensorMask m{};
  m[idx(SensorName::door_open)] = true;
  const auto out = update_channel_health(in, d, 1, m);
  EXPECT_EQ(out, in);
}

TEST(Vote, SingleWrongChannelIsOutvoted) {
  SensedInputs in = plant::sense(initial_state().plant, 0);
  in.set(SensorName::gear_extended, 1, 0, 0);
  const auto out = vote_inputs(in, initial_state().internals);
  EXPECT_TRUE(out.view.gear_extended[0]);
  EXPECT_TRUE(out.dissent[idx(SensorName::gear_extended)][1]);
  EXPECT_FALSE(out.dissent[idx(SensorName::gear_extended)][0]);
}
