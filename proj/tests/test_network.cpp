#include <catch2/catch_amalgamated.hpp>

#include "bamsim/network.hpp"

using namespace bamsim;

namespace {

const std::vector<Bw> kRdmBc{mbps(622), mbps(373.2), mbps(186.6)};

NetworkState chain_network() {
  // 0 -> 1 -> 2 -> 3, all RDM.
  auto cfg = build_preset({"RDM", PresetKind::RDM, kRdmBc, {}, {}, false, false}, mbps(622));
  NetworkState net;
  net.add_link({0, 1}, cfg);
  net.add_link({1, 2}, cfg);
  net.add_link({2, 3}, cfg);
  return net;
}

LspRequest request(LspId id, ClassId cls, double bw_mbps,
                   std::initializer_list<NodeId> nodes) {
  return {id, cls, mbps(bw_mbps), path_from_nodes(std::vector<NodeId>(nodes)), 0.0, 0.0};
}

bool same_links(const NetworkState& a, const NetworkState& b) {
  if (a.links.size() != b.links.size()) return false;
  for (const auto& [id, la] : a.links) {
    const auto& lb = b.links.at(id);
    if (la.version != lb.version) return false;
    if (la.active.size() != lb.active.size()) return false;
    for (const auto& [lsp, e] : la.active) {
      auto it = lb.active.find(lsp);
      if (it == lb.active.end() || it->second.funding.draw != e.funding.draw) return false;
    }
    if (la.grandfathered.size() != lb.grandfathered.size()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("multi-link setup admits on every link or nowhere") {
  auto net = chain_network();
  auto r1 = setup_lsp(net, request(1, 1, 100, {0, 1, 2}), 1.0);
  REQUIRE(r1.established);
  CHECK(net.links.at({0, 1}).active.count(1) == 1);
  CHECK(net.links.at({1, 2}).active.count(1) == 1);
  CHECK(net.links.at({2, 3}).active.count(1) == 0);
  CHECK(net.lsps.at(1).terminal == Terminal::active);
}

TEST_CASE("blocked setup leaves the network bit-identical") {
  auto net = chain_network();
  // TC2 holds the whole reachable band on the middle link; a TC0 request has
  // no one to preempt there and must be refused.
  REQUIRE(setup_lsp(net, request(1, 2, 186.6, {1, 2}), 1.0).established);
  REQUIRE(setup_lsp(net, request(2, 1, 186.6, {1, 2}), 2.0).established);
  REQUIRE(setup_lsp(net, request(3, 0, 248.8, {1, 2}), 3.0).established);

  NetworkState before = net;
  auto r = setup_lsp(net, request(4, 0, 5, {0, 1, 2, 3}), 4.0);
  CHECK_FALSE(r.established);
  REQUIRE(r.refused_link);
  CHECK(*r.refused_link == LinkId{1, 2});
  CHECK(same_links(net, before));
  CHECK(net.lsps.size() == before.lsps.size());
}

TEST_CASE("preemption releases the victim on every link of its path") {
  auto net = chain_network();
  REQUIRE(setup_lsp(net, request(1, 0, 600, {0, 1, 2}), 1.0).established);

  // TC1 over the middle link needs the TC0 LSP gone; the freed bandwidth
  // must also reappear on (0,1), which the new LSP does not even touch.
  auto r = setup_lsp(net, request(2, 1, 373.2, {1, 2, 3}), 2.0);
  REQUIRE(r.established);
  REQUIRE(r.victims.size() == 1);
  CHECK(r.victims[0].id == 1);
  CHECK_FALSE(r.victims[0].devolution);
  CHECK(net.links.at({0, 1}).active.empty());
  CHECK(net.links.at({1, 2}).active.count(2) == 1);
  CHECK(net.links.at({1, 2}).active.count(1) == 0);
  CHECK(net.lsps.at(1).terminal == Terminal::preempted);
  REQUIRE(net.lsps.at(1).terminal_time);
  CHECK(*net.lsps.at(1).terminal_time == 2.0);
}

TEST_CASE("freed bandwidth propagates within one setup") {
  auto net = chain_network();
  // Victim spans (0,1) and (1,2); the request spans both too, so releasing
  // the victim while planning (0,1) must already help at (1,2).
  REQUIRE(setup_lsp(net, request(1, 0, 600, {0, 1, 2}), 1.0).established);
  auto r = setup_lsp(net, request(2, 1, 300, {0, 1, 2}), 2.0);
  REQUIRE(r.established);
  REQUIRE(r.victims.size() == 1);
  CHECK(r.victims[0].id == 1);
}

TEST_CASE("teardown releases every link and records the terminal once") {
  auto net = chain_network();
  REQUIRE(setup_lsp(net, request(1, 1, 100, {0, 1, 2, 3}), 1.0).established);
  teardown_lsp(net, 1, Terminal::departed, 50.0);
  for (const auto& [id, link] : net.links) CHECK(link.active.empty());
  CHECK(net.lsps.at(1).terminal == Terminal::departed);
  CHECK(*net.lsps.at(1).terminal_time == 50.0);
  CHECK_THROWS_AS(teardown_lsp(net, 1, Terminal::departed, 60.0), std::logic_error);
  CHECK_THROWS_AS(teardown_lsp(net, 99, Terminal::departed, 60.0), std::logic_error);
}

TEST_CASE("setup over an unknown link throws without touching state") {
  auto net = chain_network();
  LspRequest bad{1, 0, mbps(10), {{0, 1}, {1, 9}}, 0.0, 0.0};
  CHECK_THROWS_AS(setup_lsp(net, bad, 1.0), std::invalid_argument);
  for (const auto& [id, link] : net.links) CHECK(link.active.empty());
  CHECK(net.lsps.empty());
}
