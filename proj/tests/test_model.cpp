#include <catch2/catch_amalgamated.hpp>

#include "bamsim/scenario.hpp"
#include "bamsim/types.hpp"

using namespace bamsim;

TEST_CASE("bandwidth lattice round-trips table values exactly") {
  CHECK(mbps(248.8) == 2488);
  CHECK(mbps(186.6) == 1866);
  CHECK(mbps(373.2) == 3732);
  CHECK(to_mbps(mbps(622)) == 622.0);
  CHECK(mbps(248.8) + mbps(186.6) + mbps(186.6) == mbps(622));
}

TEST_CASE("path_from_nodes chains consecutive links") {
  auto p = path_from_nodes({0, 2, 5, 11});
  REQUIRE(p.size() == 3);
  CHECK(p[0] == LinkId{0, 2});
  CHECK(p[1] == LinkId{2, 5});
  CHECK(p[2] == LinkId{5, 11});
  for (std::size_t i = 0; i + 1 < p.size(); ++i) CHECK(p[i].dst == p[i + 1].src);
  CHECK_THROWS_AS(path_from_nodes({7}), std::invalid_argument);
}

TEST_CASE("link config invariants") {
  GBamLinkConfig cfg;
  cfg.capacity = mbps(622);
  cfg.allot = {mbps(248.8), mbps(186.6), mbps(186.6)};
  cfg.priv = {0, 0, 0};
  CHECK(cfg.violations().empty());

  SECTION("private exceeding allotment") {
    cfg.priv[1] = mbps(200);
    auto v = cfg.violations();
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("priv[1]") != std::string::npos);
  }
  SECTION("allotments exceeding capacity") {
    cfg.allot[0] = mbps(400);
    REQUIRE_FALSE(cfg.violations().empty());
  }
  SECTION("negative bandwidth") {
    cfg.allot[2] = -1;
    REQUIRE_FALSE(cfg.violations().empty());
  }
}

TEST_CASE("paper scenario validates clean") {
  auto s = paper_scenario();
  CHECK(validate_scenario(s).empty());
  CHECK(s.route_nodes.size() == 4);
  CHECK(s.links.size() == 18);  // 12 shared-prefix links + two branch tails
}

TEST_CASE("validate_scenario flags broken inputs") {
  auto s = paper_scenario();

  SECTION("route over undeclared link") {
    s.route_nodes.push_back({0, 99});
    auto v = validate_scenario(s);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("0->99") != std::string::npos);
  }
  SECTION("private above allotment in a preset") {
    BehaviorPreset bad{"BAD", PresetKind::GRDM,
                       {mbps(622), mbps(373.2), mbps(186.6)},
                       {mbps(500), 0, 0},  // A_0 is 248.8, private 500 is too big
                       {}, false, false};
    s.presets.emplace("BAD", bad);
    auto v = validate_scenario(s);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("BAD") != std::string::npos);
  }
  SECTION("horizon not matching last phase end") {
    s.horizon = 4000;
    REQUIRE_FALSE(validate_scenario(s).empty());
  }
  SECTION("non-increasing phase ends") {
    s.phases.ends[3] = s.phases.ends[2];
    REQUIRE_FALSE(validate_scenario(s).empty());
  }
  SECTION("bad tuple string") {
    s.tuples.push_back("25-65");
    REQUIRE_FALSE(validate_scenario(s).empty());
  }
}

TEST_CASE("tuple parsing") {
  auto t = parse_tuple("25/65");
  REQUIRE(t);
  CHECK(t->first == 25);
  CHECK(t->second == Catch::Approx(0.65));
  CHECK_FALSE(parse_tuple("MAM"));
  CHECK_FALSE(parse_tuple("25/"));
  CHECK_FALSE(parse_tuple("/65"));
  CHECK_FALSE(parse_tuple("25/105"));
}
