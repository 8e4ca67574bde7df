#include <catch2/catch_amalgamated.hpp>

#include "slobench/discretize.hpp"

using namespace slobench;

TEST_CASE("metric bins use intervals closed from above") {
  REQUIRE(metric_bin(0.0) == 1);
  REQUIRE(metric_bin(0.2) == 1);
  REQUIRE(metric_bin(0.2000001) == 2);
  REQUIRE(metric_bin(0.4) == 2);
  REQUIRE(metric_bin(0.6) == 3);
  REQUIRE(metric_bin(0.8) == 4);
  REQUIRE(metric_bin(0.81) == 5);
  REQUIRE(metric_bin(100.0) == 5);
}

TEST_CASE("compliance bins use intervals closed from below plus the exact bin") {
  REQUIRE(compliance_bin(0.0) == 0);
  REQUIRE(compliance_bin(0.19) == 0);
  REQUIRE(compliance_bin(0.2) == 1);
  REQUIRE(compliance_bin(0.4) == 2);
  REQUIRE(compliance_bin(0.6) == 3);
  REQUIRE(compliance_bin(0.8) == 4);
  REQUIRE(compliance_bin(0.999) == 4);
  REQUIRE(compliance_bin(1.0) == 5);
}

TEST_CASE("bin representative compliance values") {
  REQUIRE(approx_compliance(0) == 0.1);
  REQUIRE(approx_compliance(1) == Catch::Approx(0.3));
  REQUIRE(approx_compliance(4) == Catch::Approx(0.9));
  REQUIRE(approx_compliance(5) == 1.0);
  REQUIRE_THROWS_AS(approx_compliance(-1), std::domain_error);
  REQUIRE_THROWS_AS(approx_compliance(6), std::domain_error);
}

TEST_CASE("discretize maps a sample and its breakdown to labels") {
  MetricsSample m;
  m.cpu = 0.2;
  m.mem = 0.85;
  ComplianceBreakdown b;
  b.s_rs = 0.8;
  b.s_sf = 1.0;
  b.s_lat = 0.55;
  b.s_tp = 0.1;
  b.s_ts = 1.0;
  auto o = discretize(m, b, 42);
  REQUIRE(o.cpu_bin == 1);
  REQUIRE(o.mem_bin == 5);
  REQUIRE(o.rs_bin == 4);
  REQUIRE(o.sf_bin == 5);
  REQUIRE(o.lat_bin == 2);
  REQUIRE(o.tp_bin == 0);
  REQUIRE(o.ts_bin == 5);
  REQUIRE(o.action == 42);
  REQUIRE_THROWS_AS(discretize(m, b, 200), std::domain_error);
}
