#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "lgs/monitor.hpp"

using namespace lgs;
using namespace lgs::monitor;

namespace {

using Log = ObservationLog;

// The cycle requirement evaluated by brute force, quantifier by quantifier:
//   for all dj: end in dom(ldate) and dj = ldate(end) and endCycle and dj < llc
//     => exists di: start in dom(ldate) and di = ldate(start) and di < dj and
//        for all ii in [di, dj): ldate^-1[{ii}] != {abort}
struct Literal {
  bool antecedent;
  bool holds;
};

Literal literal(const Log& log, ObsEvent start, ObsEvent end, ObsEvent abort) {
  auto preimage = [&](std::uint64_t ii) {
    std::set<ObsEvent> out;
    for (int e = 0; e < kObsEvents; ++e)
      if (log.ldate[e] && *log.ldate[e] == ii) out.insert(static_cast<ObsEvent>(e));
    return out;
  };
  Literal r{false, true};
  for (std::uint64_t dj = 0; dj <= log.llc + 1; ++dj) {
    const bool ante = log.ldate[idx(end)] && *log.ldate[idx(end)] == dj && log.endCycle && dj < log.llc;
    if (!ante) continue;
    r.antecedent = true;
    bool exists = false;
    for (std::uint64_t di = 0; di <= log.llc + 1 && !exists; ++di) {
      if (!(log.ldate[idx(start)] && *log.ldate[idx(start)] == di && di < dj)) continue;
      bool all = true;
      for (std::uint64_t ii = di; ii < dj; ++ii)
        if (preimage(ii) == std::set<ObsEvent>{abort}) all = false;
      exists = all;
    }
    if (!exists) r.holds = false;
  }
  return r;
}

// Random injective stamp assignment over a random subset of the events.
Log random_log(std::mt19937_64& rng) {
  Log log;
  std::vector<std::uint64_t> pool(12);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  for (int e = 0; e < kObsEvents; ++e)
    if (rng() % 4 != 0) log.ldate[e] = pool[e];
  log.llc = rng() % 14;
  log.endCycle = rng() % 3 != 0;
  return log;
}

}  // namespace

TEST(CycleRequirement, AgreesWithLiteralQuantifiersOnRandomLogs) {
  std::mt19937_64 rng(20240611);
  int violated = 0, vacuous = 0;
  for (int i = 0; i < 200000; ++i) {
    const Log log = random_log(rng);
    for (auto which : {Requirement::R11bis, Requirement::R12bis}) {
      const bool out = which == Requirement::R11bis;
      const auto want = out ? literal(log, ObsEvent::downH, ObsEvent::dcge, ObsEvent::upH)
                            : literal(log, ObsEvent::upH, ObsEvent::doge, ObsEvent::downH);
      const auto got = check_R1(log, which);
      ASSERT_EQ(got.holds, want.holds) << "iteration " << i;
      ASSERT_EQ(got.incomplete, !want.antecedent) << "iteration " << i;
      violated += !want.holds;
      vacuous += !want.antecedent;
    }
  }
  // make sure the generator covers both outcomes
  EXPECT_GT(violated, 1000);
  EXPECT_GT(vacuous, 1000);
}

TEST(CycleRequirement, HandPickedCases) {
  Log log;
  log.ldate[idx(ObsEvent::downH)] = 2;
  log.ldate[idx(ObsEvent::dcge)] = 9;
  log.llc = 10;
  log.endCycle = true;
  EXPECT_TRUE(check_R1(log).holds);
  EXPECT_FALSE(check_R1(log).incomplete);

  log.ldate[idx(ObsEvent::upH)] = 5;  // handle went up in between
  EXPECT_FALSE(check_R1(log).holds);

  log.ldate[idx(ObsEvent::upH)] = 1;  // before: harmless
  EXPECT_TRUE(check_R1(log).holds);

  log.endCycle = false;
  EXPECT_TRUE(check_R1(log).incomplete);
}

TEST(StatePredicates, InitialStateSatisfiesAll) {
  const auto s = initial_state();
  EXPECT_EQ(failing_mask(s), 0);
  for (const auto& v : check_safety(s)) EXPECT_TRUE(v.holds) << to_string(v.id);
}

TEST(StatePredicates, ValveConflictsAndHydraulicGating) {
  SystemState s = initial_state();
  s.orders.open_EV = s.orders.close_EV = true;
  EXPECT_FALSE(holds(Requirement::R41, s));
  EXPECT_FALSE(holds(Requirement::R51, s));
  s.orders.general_EV = true;
  EXPECT_TRUE(holds(Requirement::R51, s));

  s = initial_state();
  s.orders.general_EV = true;
  s.orders.extend_EV = true;  // doors are closed
  EXPECT_FALSE(holds(Requirement::R31, s));
  // the orders were set by hand, so they no longer match the modules either
  const auto mask = failing_mask(s);
  EXPECT_EQ(mask, (1u << idx(Requirement::R31)) | (1u << idx(Requirement::BIND)));
}

TEST(StatePredicates, ContradictoryViewNeedsAnomaly) {
  SystemState s = initial_state();
  s.internals.voted.gear_retracted[1] = true;  // also extended
  EXPECT_FALSE(holds(Requirement::ANO, s));
  s.outputs.anomaly = true;
  EXPECT_TRUE(holds(Requirement::ANO, s));
}

TEST(StatePredicates, HandleOrderMismatch) {
  SystemState s = initial_state();
  s.internals.voted.handle = HandleState::hUp;
  EXPECT_FALSE(holds(Requirement::R21, s));
  EXPECT_TRUE(holds(Requirement::R22, s));
}

TEST(Stamp, RecordsLogicalClock) {
  SystemState s = initial_state();
  s.llc = 17;
  s = stamp(ObsEvent::upH, s);
  EXPECT_EQ(s.stamp_of(ObsEvent::upH), 17u);
  EXPECT_FALSE(s.stamp_of(ObsEvent::downH));
}

TEST(Requirements, NamesRoundTrip) {
  for (auto r : kStateRequirements) EXPECT_EQ(parse_requirement(to_string(r)), r);
  EXPECT_EQ(parse_requirement("R11bis"), Requirement::R11bis);
  EXPECT_EQ(kind(Requirement::R12bis), RequirementKind::CyclePredicate);
}
