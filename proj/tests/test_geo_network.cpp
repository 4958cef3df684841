#include <doctest.h>

#include <cmath>
#include <random>

#include "roadq/geo.hpp"
#include "roadq/network.hpp"

using namespace roadq;
using geo::LatLon;

namespace {

RoadSegment make_segment(SegmentId id, NodeId from, NodeId to,
                         std::vector<LatLon> polyline, int lanes = 1,
                         double speed = 40.0) {
  RoadSegment s;
  s.id = id;
  s.from = from;
  s.to = to;
  s.polyline = std::move(polyline);
  s.lanes = lanes;
  s.speed_kmh = speed;
  return s;
}

AnomalyObservation make_obs(std::string id, LatLon pos) {
  AnomalyObservation o;
  o.report_id = std::move(id);
  o.pos = pos;
  o.type = AnomalyType::Pothole;
  o.severity = Severity::Severe;
  o.timestamp = "2025-06-10T10:00:00Z";
  o.timestamp_s = 1749549600;
  return o;
}

}  // namespace

TEST_CASE("haversine basics") {
  CHECK(geo::haversine_m({10.0, 20.0}, {10.0, 20.0}) == 0.0);
  CHECK(geo::haversine_m({0.0, 0.0}, {0.0, 1.0}) ==
        doctest::Approx(111194.9266).epsilon(1e-6));
  CHECK_THROWS_AS(geo::haversine_m({95.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(geo::haversine_m({0.0, 0.0}, {0.0, 181.0}), std::invalid_argument);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-179.0, 179.0);
  for (int i = 0; i < 200; ++i) {
    const LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    CHECK(geo::haversine_m(a, b) == geo::haversine_m(b, a));
    CHECK(geo::haversine_m(a, b) >= 0.0);
  }
}

TEST_CASE("offset_m round-trips through haversine") {
  const LatLon p{44.2334, -76.493};
  CHECK(geo::haversine_m(p, geo::offset_m(p, 100.0, 0.0)) ==
        doctest::Approx(100.0).epsilon(1e-6));
  CHECK(geo::haversine_m(p, geo::offset_m(p, 0.0, 250.0)) ==
        doctest::Approx(250.0).epsilon(1e-6));
}

TEST_CASE("point to segment distance") {
  const LatLon a{44.0, -76.0};
  const LatLon b = geo::offset_m(a, 0.0, 200.0);
  CHECK(geo::point_segment_distance_m(a, a, b) == doctest::Approx(0.0).epsilon(1e-9));
  // perpendicular from the middle
  const LatLon mid = geo::offset_m(a, 0.0, 100.0);
  const LatLon above = geo::offset_m(mid, 12.0, 0.0);
  CHECK(geo::point_segment_distance_m(above, a, b) == doctest::Approx(12.0).epsilon(1e-4));
  // beyond the end the distance is to the endpoint
  const LatLon past = geo::offset_m(a, 0.0, 260.0);
  CHECK(geo::point_segment_distance_m(past, a, b) == doctest::Approx(60.0).epsilon(1e-4));
}

TEST_CASE("polyline length is the sum of haversine legs") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> step(-300.0, 300.0);
  std::vector<LatLon> poly{{44.0, -76.0}};
  for (int i = 0; i < 6; ++i) {
    poly.push_back(geo::offset_m(poly.back(), step(rng), step(rng)));
  }
  double manual = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) {
    manual += geo::haversine_m(poly[i - 1], poly[i]);
  }
  CHECK(geo::polyline_length_m(poly) == manual);
}

TEST_CASE("network construction validates endpoints and declared lengths") {
  RoadNetwork net;
  net.add_node({1, {44.0, -76.0}});
  net.add_node({2, geo::offset_m({44.0, -76.0}, 0.0, 500.0)});
  CHECK_THROWS_AS(
      net.add_segment(make_segment(1, 1, 99, {{44.0, -76.0}, {44.001, -76.0}})),
      std::invalid_argument);

  RoadSegment ok = make_segment(1, 1, 2,
                                {{44.0, -76.0}, geo::offset_m({44.0, -76.0}, 0.0, 500.0)});
  const double len = geo::polyline_length_m(ok.polyline);
  RoadSegment dup = ok;
  net.add_segment(std::move(ok), len * 1.0005);  // within 0.1%
  CHECK(net.find_segment(1)->length_m == doctest::Approx(500.0).epsilon(1e-6));

  dup.id = 2;
  CHECK_THROWS_AS(net.add_segment(std::move(dup), len * 1.01), std::invalid_argument);
}

TEST_CASE("map_match finds the nearest segment and honors the threshold") {
  const LatLon a{44.2334, -76.493};
  const LatLon b = geo::offset_m(a, 0.0, 300.0);
  const LatLon c = geo::offset_m(a, 400.0, 0.0);
  RoadNetwork net;
  net.add_node({1, a});
  net.add_node({2, b});
  net.add_node({3, c});
  net.add_segment(make_segment(5, 1, 2, {a, b}));
  net.add_segment(make_segment(9, 1, 3, {a, c}));

  // a polyline vertex of segment 5 (but not of 9)
  CHECK(net.map_match(b) == SegmentId{5});

  // 20 m north of segment 5's midpoint, default threshold 15 m -> no match
  const LatLon mid = geo::offset_m(a, 0.0, 150.0);
  CHECK(net.map_match(geo::offset_m(mid, 20.0, 0.0)) == std::nullopt);
  CHECK(net.map_match(geo::offset_m(mid, 20.0, 0.0), 25.0) == SegmentId{5});
  CHECK_THROWS_AS(net.map_match({120.0, 0.0}), std::invalid_argument);
}

TEST_CASE("map_match ties break toward the lowest segment id") {
  // two parallel east-west segments, the probe exactly between them
  const LatLon base{44.0, -76.0};
  const LatLon north = geo::offset_m(base, 10.0, 0.0);
  const LatLon south = geo::offset_m(base, -10.0, 0.0);
  RoadNetwork forward, reversed;
  for (RoadNetwork* net : {&forward, &reversed}) {
    net->add_node({1, north});
    net->add_node({2, geo::offset_m(north, 0.0, 200.0)});
    net->add_node({3, south});
    net->add_node({4, geo::offset_m(south, 0.0, 200.0)});
  }
  const auto seg3 = [&] {
    return make_segment(3, 1, 2, {north, geo::offset_m(north, 0.0, 200.0)});
  };
  const auto seg7 = [&] {
    return make_segment(7, 3, 4, {south, geo::offset_m(south, 0.0, 200.0)});
  };
  forward.add_segment(seg3());
  forward.add_segment(seg7());
  reversed.add_segment(seg7());
  reversed.add_segment(seg3());

  const LatLon probe = geo::offset_m(base, 0.0, 90.0);
  CHECK(forward.map_match(probe) == SegmentId{3});
  // insertion order does not matter
  CHECK(reversed.map_match(probe) == SegmentId{3});
}

TEST_CASE("attach_anomaly stores, rejects, and deduplicates by report id") {
  const LatLon a{44.2334, -76.493};
  const LatLon b = geo::offset_m(a, 0.0, 300.0);
  RoadNetwork net;
  net.add_node({1, a});
  net.add_node({2, b});
  net.add_segment(make_segment(5, 1, 2, {a, b}));

  const StoreSnapshot before = net.snapshot();
  CHECK(before.version == 0);

  const LatLon on_road = geo::offset_m(geo::offset_m(a, 0.0, 120.0), 3.0, 0.0);
  const AttachResult stored = net.attach_anomaly(make_obs("r1", on_road));
  CHECK(stored.outcome == AttachOutcome::Stored);
  REQUIRE(stored.record.has_value());
  CHECK(stored.record->segment_id == 5);
  CHECK(stored.record->distance_to_segment_m == doctest::Approx(3.0).epsilon(1e-3));

  const StoreSnapshot after = net.snapshot();
  CHECK(after.version == 1);
  CHECK(after.for_segment(5).size() == 1);
  CHECK(before.for_segment(5).empty());  // old snapshot is untouched

  // same report id is a no-op
  const AttachResult dup = net.attach_anomaly(make_obs("r1", on_road));
  CHECK(dup.outcome == AttachOutcome::Duplicate);
  CHECK(net.snapshot().version == 1);

  // far away -> unmatched, version unchanged
  const AttachResult off = net.attach_anomaly(make_obs("r2", geo::offset_m(a, 500.0, 0.0)));
  CHECK(off.outcome == AttachOutcome::Unmatched);
  CHECK(net.snapshot().version == 1);

  // re-running map_match on a stored record returns its segment
  CHECK(net.map_match(stored.record->pos) == stored.record->segment_id);
}

TEST_CASE("attach versions increase strictly across distinct reports") {
  const LatLon a{44.2334, -76.493};
  const LatLon b = geo::offset_m(a, 0.0, 300.0);
  RoadNetwork net;
  net.add_node({1, a});
  net.add_node({2, b});
  net.add_segment(make_segment(1, 1, 2, {a, b}));
  std::uint64_t last = net.snapshot().version;
  for (int i = 0; i < 5; ++i) {
    const LatLon p = geo::offset_m(a, 1.0, 30.0 + 40.0 * i);
    const AttachResult r = net.attach_anomaly(make_obs("rep-" + std::to_string(i), p));
    CHECK(r.outcome == AttachOutcome::Stored);
    CHECK(net.snapshot().version == last + 1);
    last = net.snapshot().version;
  }
  CHECK(net.snapshot().for_segment(1).size() == 5);
}
