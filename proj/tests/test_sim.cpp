#include <catch2/catch_amalgamated.hpp>

#include "bamsim/sim.hpp"

using namespace bamsim;

TEST_CASE("one generator per (route, class)") {
  auto s = paper_scenario();
  auto gens = make_generators(s);
  REQUIRE(gens.size() == 12);
  CHECK(gens[0].route == 0);
  CHECK(gens[0].cls == 0);
  CHECK(gens[1].cls == 1);
  CHECK(gens[3].route == 1);
  for (std::size_t i = 0; i < gens.size(); ++i) CHECK(gens[i].id == static_cast<int>(i));
}

TEST_CASE("exponential sampler hits its mean") {
  auto eng = rng::substream(7, 0, 2);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += rng::exponential(eng, 200.0);
  CHECK(sum / n == Catch::Approx(200.0).epsilon(0.02));
}

TEST_CASE("uniform bandwidth stays on the lattice and in range") {
  auto eng = rng::substream(7, 1, 1);
  for (int i = 0; i < 10000; ++i) {
    Bw b = rng::uniform_bw(eng, mbps(5), mbps(15));
    CHECK(b >= mbps(5));
    CHECK(b <= mbps(15));
  }
}

TEST_CASE("inactive phases produce no arrivals") {
  auto s = paper_scenario();
  auto eng = rng::substream(42, 8, 0);
  // TC2 is silent in the first two phases (up to t = 600).
  double t = 0.0;
  int count = 0;
  while (auto next = next_arrival(s.phases, 2, eng, t)) {
    t = *next;
    ++count;
    CHECK(t > 600.0);
    CHECK(t < s.horizon);
  }
  CHECK(count > 0);
}

TEST_CASE("request stream is a pure function of scenario and seed") {
  auto s = paper_scenario();
  auto a = generate_requests(s, 101);
  auto b = generate_requests(s, 101);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].arrival_time == b[i].arrival_time);
    CHECK(a[i].bandwidth == b[i].bandwidth);
    CHECK(a[i].holding_time == b[i].holding_time);
    CHECK(a[i].cls == b[i].cls);
  }
  auto c = generate_requests(s, 102);
  REQUIRE_FALSE(c.empty());
  CHECK(a[0].arrival_time != c[0].arrival_time);
}

TEST_CASE("request volume matches the phase table expectation") {
  auto s = paper_scenario();
  // closed form: TC0 4*3600/8, TC1 4*(1200/8 + 600/100 + 400/8 + 1100/50),
  // TC2 4*(300/8 + 900/100 + 700/8 + 1100/50) = 1800 + 912 + 624
  const double expected = 3336.0;
  for (std::uint64_t seed : {101ULL, 102ULL, 103ULL}) {
    auto reqs = generate_requests(s, seed);
    double n = static_cast<double>(reqs.size());
    CHECK(n > expected * 0.95);
    CHECK(n < expected * 1.05);
    long tc0 = std::count_if(reqs.begin(), reqs.end(),
                             [](const LspRequest& r) { return r.cls == 0; });
    CHECK(static_cast<double>(tc0) > 1800 * 0.93);
    CHECK(static_cast<double>(tc0) < 1800 * 1.07);
  }
}

TEST_CASE("arrival times are sorted and ids sequential") {
  auto reqs = generate_requests(paper_scenario(), 104);
  for (std::size_t i = 0; i + 1 < reqs.size(); ++i)
    CHECK(reqs[i].arrival_time <= reqs[i + 1].arrival_time);
  for (std::size_t i = 0; i < reqs.size(); ++i)
    CHECK(reqs[i].id == static_cast<LspId>(i + 1));
}

TEST_CASE("full static run: accounting and determinism") {
  auto s = paper_scenario();
  auto rc = resolve_run_config(s, "RDM");
  auto r1 = run(s, rc, 101);
  auto r2 = run(s, rc, 101);

  CHECK(r1.generated == r1.summary.generated);
  CHECK(r1.summary.generated == r1.summary.established + r1.summary.blocked);
  CHECK(r1.summary.established == r1.summary.departed + r1.summary.horizon_end +
                                      r1.summary.preemptions + r1.summary.devolutions);
  CHECK(r1.windows.size() == 12);  // 3600 / 300
  CHECK(r1.summary.preemptions > 0);  // RDM shares, so low classes get evicted
  CHECK(r1.summary.preemptions_by_class[2] == 0);

  REQUIRE(r1.log.size() == r2.log.size());
  for (std::size_t i = 0; i < r1.log.size(); ++i) {
    CHECK(r1.log[i].time == r2.log[i].time);
    CHECK(r1.log[i].kind == r2.log[i].kind);
    CHECK(r1.log[i].id == r2.log[i].id);
  }
  CHECK(r1.summary == r2.summary);
}

TEST_CASE("MAM run never preempts") {
  auto s = paper_scenario();
  auto r = run(s, resolve_run_config(s, "MAM"), 101);
  CHECK(r.summary.preemptions == 0);
  CHECK(r.summary.devolutions == 0);
  CHECK(r.summary.loans == 0);
  CHECK(r.summary.generated == r.summary.established + r.summary.blocked);
}

TEST_CASE("resolve_run_config distinguishes presets from tuples") {
  auto s = paper_scenario();
  CHECK(resolve_run_config(s, "MAM").static_preset == "MAM");
  CHECK_FALSE(resolve_run_config(s, "MAM").policy);
  auto rc = resolve_run_config(s, "25/65");
  REQUIRE(rc.policy);
  CHECK(rc.policy->p_max == 25);
  CHECK(rc.policy->u_min == Catch::Approx(0.65));
  CHECK(rc.policy->initial_mode == "RDM");
  CHECK_THROWS_AS(resolve_run_config(s, "bogus"), ScenarioError);
}
