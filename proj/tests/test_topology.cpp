#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ivnsim/topology.hpp"

using namespace ivnsim;

namespace {

Document load_canonical() {
  return load_document_from_file(std::string(IVNSIM_TOPOLOGY_DIR) + "/sdivn_diamond.json");
}

}  // namespace

TEST_CASE("canonical diamond loads with 4 ECUs and 4 switches") {
  const Document doc = load_canonical();
  Topology topo(doc);
  CHECK(topo.ecu_ids().size() == 4);
  CHECK(topo.switch_ids().size() == 4);
  CHECK(doc.links.size() == 8);
  CHECK(doc.flows.size() == 2);
  CHECK(doc.duration == seconds(60));
  REQUIRE(doc.failures.size() == 1);
  CHECK(doc.failures[0].target == "PATH1_MID");
  CHECK(doc.failures[0].at == seconds(30));
  CHECK(topo.edge_switch_ids() == std::vector<std::string>{"SW_A", "SW_B"});
  CHECK(topo.attachment_switch_port("CAN3") == PortRef{"SW_A", "p2"});
  CHECK(topo.backbone_links().size() == 4);
}

TEST_CASE("empty node list is a schema error") {
  CHECK_THROWS_AS(load_document_from_text(R"({"nodes": [], "links": []})", "t"), ConfigError);
}

TEST_CASE("a link referencing an undefined node names the port in the error") {
  const char* text = R"({
    "nodes": [{"id":"A","kind":"switch"},{"id":"B","kind":"switch"}],
    "links": [
      {"id":"L1","a":"A.p1","b":"B.p1"},
      {"id":"L2","a":"A.p2","b":"SW_X.p9"}
    ]})";
  try {
    load_document_from_text(text, "t");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("SW_X.p9") != std::string::npos);
    CHECK(e.where() == "$.links[1]");
  }
}

TEST_CASE("duplicate ids are rejected with their path") {
  const char* dup_node = R"({
    "nodes": [{"id":"A","kind":"ecu"},{"id":"A","kind":"ecu"}],
    "links": [{"id":"L","a":"A.p","b":"A.q"}]})";
  CHECK_THROWS_AS(load_document_from_text(dup_node, "t"), ConfigError);

  const char* dup_link = R"({
    "nodes": [{"id":"A","kind":"switch"},{"id":"B","kind":"switch"}],
    "links": [{"id":"L","a":"A.p1","b":"B.p1"},{"id":"L","a":"A.p2","b":"B.p2"}]})";
  try {
    load_document_from_text(dup_link, "t");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.where() == "$.links[1].id");
  }
}

TEST_CASE("an ECU must attach through exactly one link") {
  const char* two_links = R"({
    "nodes": [{"id":"E","kind":"ecu"},{"id":"S","kind":"switch"},{"id":"T","kind":"switch"}],
    "links": [
      {"id":"L1","a":"E.e0","b":"S.p1"},
      {"id":"L2","a":"E.e1","b":"T.p1"},
      {"id":"L3","a":"S.p2","b":"T.p2"}
    ]})";
  const Document doc = load_document_from_text(two_links, "t");
  CHECK_THROWS_AS(Topology{doc}, ConfigError);
}

TEST_CASE("disconnected topologies are rejected") {
  const char* text = R"({
    "nodes": [{"id":"A","kind":"switch"},{"id":"B","kind":"switch"},
              {"id":"C","kind":"switch"},{"id":"D","kind":"switch"}],
    "links": [{"id":"L1","a":"A.p1","b":"B.p1"},{"id":"L2","a":"C.p1","b":"D.p1"}]})";
  const Document doc = load_document_from_text(text, "t");
  CHECK_THROWS_AS(Topology{doc}, ConfigError);
}

TEST_CASE("failure times must fall inside the run") {
  const char* text = R"({
    "nodes": [{"id":"A","kind":"switch"},{"id":"B","kind":"switch"}],
    "links": [{"id":"L","a":"A.p1","b":"B.p1"}],
    "scenario": {"duration_s": 10, "failures": [{"link":"L","at_s":10}]}})";
  CHECK_THROWS_AS(load_document_from_text(text, "t"), ConfigError);
}

TEST_CASE("path propagation delay sums a connected chain") {
  const Document doc = load_canonical();
  Topology topo(doc);

  CHECK(path_propagation_delay(topo, {}) == SimTime{0});

  const std::vector<std::string> p1{"PATH1_MID", "PATH1_OUT"};
  CHECK(path_propagation_delay(topo, p1) == microseconds(2));

  const std::vector<std::string> broken{"PATH1_MID", "PATH2_OUT"};
  CHECK_THROWS_AS(path_propagation_delay(topo, broken), ConfigError);
}

TEST_CASE("propagation delay of a chain equals the independent sum") {
  // delays 2us, 5us, 1us, 7us in a line -> 15us by explicit summation
  const char* text = R"({
    "nodes": [{"id":"S0","kind":"switch"},{"id":"S1","kind":"switch"},
              {"id":"S2","kind":"switch"},{"id":"S3","kind":"switch"},
              {"id":"S4","kind":"switch"}],
    "links": [
      {"id":"L0","a":"S0.p1","b":"S1.p1","delay_us":2},
      {"id":"L1","a":"S1.p2","b":"S2.p1","delay_us":5},
      {"id":"L2","a":"S2.p2","b":"S3.p1","delay_us":1},
      {"id":"L3","a":"S3.p2","b":"S4.p1","delay_us":7}
    ]})";
  const Document doc = load_document_from_text(text, "t");
  Topology topo(doc);

  std::int64_t oracle = 0;
  for (const auto& l : doc.links) oracle += l.delay.ns;
  CHECK(oracle == microseconds(15).ns);

  const std::vector<std::string> chain{"L0", "L1", "L2", "L3"};
  CHECK(path_propagation_delay(topo, chain) == SimTime{oracle});

  // Value is the unordered sum of member delays: reversing the chain keeps it.
  std::vector<std::string> rev(chain.rbegin(), chain.rend());
  CHECK(path_propagation_delay(topo, rev) == SimTime{oracle});
}

TEST_CASE("duplicate can_id across flows is rejected") {
  const char* text = R"({
    "nodes": [{"id":"E1","kind":"ecu"},{"id":"E2","kind":"ecu"},
              {"id":"S","kind":"switch"}],
    "links": [{"id":"L1","a":"E1.e","b":"S.p1"},{"id":"L2","a":"E2.e","b":"S.p2"}],
    "flows": [
      {"src":"E1","dst":"E2","period_ms":50,"can_id":256},
      {"src":"E2","dst":"E1","period_ms":50,"can_id":256}
    ]})";
  CHECK_THROWS_AS(load_document_from_text(text, "t"), ConfigError);
}

TEST_CASE("mixing links and segments is rejected") {
  const char* text = R"({
    "nodes": [{"id":"A","kind":"ecu"},{"id":"B","kind":"ecu"}],
    "links": [{"id":"L","a":"A.p","b":"B.p"}],
    "segments": [{"id":"BUS","attached":["A","B"]}]})";
  CHECK_THROWS_AS(load_document_from_text(text, "t"), ConfigError);
}
