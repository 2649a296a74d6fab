#include "walkaudit/errors.hpp"
#include "walkaudit/guidance.hpp"
#include "walkaudit/io.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace walkaudit;
using namespace walkaudit::guidance;

namespace {

const labels::LabelTaxonomy& taxonomy() {
  static labels::LabelTaxonomy tax = labels::LabelTaxonomy::from_json(
      io::load_json(std::string(WALKAUDIT_DATA_DIR) + "/label_schema.json"));
  return tax;
}

GuidanceRequest request(const std::string& id, graph::RoadType type) {
  GuidanceRequest req;
  req.segment_id = id;
  req.road_type = type;
  req.start_pano = {"pano-" + id + "-start", ""};
  req.end_pano = {"pano-" + id + "-end", ""};
  return req;
}

std::vector<GuidanceRequest> three_segments() {
  return {request("s1", graph::RoadType::residential),
          request("s2", graph::RoadType::secondary),
          request("s3", graph::RoadType::tertiary)};
}

std::int64_t fixed_now() { return 1700000000; }

} // namespace

TEST_CASE("should_trigger: mission start, repeats, jumps") {
  MockVlmClient client;
  GuidanceSession session(three_segments(), taxonomy(), client, "mock", fixed_now);

  CHECK(session.should_trigger({EventKind::MissionStart, "s1"}));
  CHECK(session.on_event({EventKind::MissionStart, "s1"}).has_value());

  // Repeated events on the current segment never fire.
  CHECK_FALSE(session.should_trigger({EventKind::SegmentChange, "s1"}));
  CHECK_FALSE(session.on_event({EventKind::SegmentChange, "s1"}).has_value());
  CHECK_FALSE(session.should_trigger({EventKind::Jump, "s1"}));

  CHECK(session.should_trigger({EventKind::Jump, "s2"}));
  CHECK(session.on_event({EventKind::Jump, "s2"}).has_value());

  CHECK_THROWS_AS(session.should_trigger({EventKind::Jump, "nope"}),
                  ValidationError);
}

TEST_CASE("build_prompt: road-type clauses and vocabulary") {
  const auto residential =
      build_prompt(request("s1", graph::RoadType::residential), taxonomy());
  CHECK(residential.find("treat the road itself as the pedestrian path") !=
        std::string::npos);
  CHECK(residential.find("surface problems") != std::string::npos);

  const auto secondary =
      build_prompt(request("s2", graph::RoadType::secondary), taxonomy());
  CHECK(secondary.find("missing curb ramps") != std::string::npos);
  CHECK(secondary.find("crosswalk") != std::string::npos);
  const auto tertiary =
      build_prompt(request("s3", graph::RoadType::tertiary), taxonomy());
  CHECK(tertiary.find("constructed sidewalk") != std::string::npos);

  // The full current vocabulary rides along.
  for (const auto& type : taxonomy().types())
    CHECK(residential.find(type.name) != std::string::npos);
  CHECK(residential.find("3 sentences") != std::string::npos);
}

TEST_CASE("build_prompt: deterministic, independent of unrelated fields") {
  auto req = request("s1", graph::RoadType::residential);
  const auto prompt = build_prompt(req, taxonomy());
  CHECK(prompt == build_prompt(req, taxonomy()));

  // Permuting panorama references and the segment id leaves the prompt
  // unchanged: it depends only on (road_type, taxonomy).
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    auto permuted = req;
    permuted.segment_id = "other-" + std::to_string(rng());
    permuted.start_pano = {"p" + std::to_string(rng()), "img"};
    permuted.end_pano = {"q" + std::to_string(rng()), "img2"};
    CHECK(build_prompt(permuted, taxonomy()) == prompt);
  }
}

TEST_CASE("generate_guidance: passthrough, cache, fallback, truncation") {
  SUBCASE("mock echo") {
    MockVlmClient client;
    client.response = "Check the left side for parked carts.";
    GuidanceSession session(three_segments(), taxonomy(), client, "mock",
                            fixed_now);
    const auto msg = session.on_event({EventKind::MissionStart, "s1"});
    REQUIRE(msg.has_value());
    CHECK(msg->text == client.response);
    CHECK(msg->model_id == "mock");
    CHECK(msg->generated_at == 1700000000);
    CHECK_FALSE(msg->degraded);
  }

  SUBCASE("second trigger on the same segment reuses the cache") {
    MockVlmClient client;
    GuidanceSession session(three_segments(), taxonomy(), client, "mock",
                            fixed_now);
    session.on_event({EventKind::MissionStart, "s1"});
    session.on_event({EventKind::SegmentChange, "s2"});
    CHECK(client.calls() == 2);
    const auto back = session.on_event({EventKind::SegmentChange, "s1"});
    REQUIRE(back.has_value());
    CHECK(client.calls() == 2); // cached: zero extra client calls
    CHECK(session.client_calls() == 2);
  }

  SUBCASE("failing client falls back per road type with the degraded flag") {
    MockVlmClient client;
    client.fail = true;
    GuidanceSession session(three_segments(), taxonomy(), client, "mock",
                            fixed_now);
    const auto msg = session.on_event({EventKind::MissionStart, "s1"});
    REQUIRE(msg.has_value());
    CHECK(msg->degraded);
    CHECK(msg->text == fallback_message(graph::RoadType::residential));
    const auto msg2 = session.on_event({EventKind::SegmentChange, "s2"});
    CHECK(msg2->text == fallback_message(graph::RoadType::secondary));
    CHECK(!msg->text.empty());
    CHECK(msg->text.size() <= kMaxMessageChars);
  }

  SUBCASE("oversize reply truncates at a sentence boundary") {
    MockVlmClient client;
    std::string longtext;
    for (int i = 0; i < 40; ++i)
      longtext += "Inspect the crossing and note every broken slab here. ";
    client.response = longtext;
    GuidanceRequest req = request("s1", graph::RoadType::tertiary);
    const auto msg =
        generate_guidance(client, req, taxonomy(), "mock", fixed_now);
    CHECK(msg.text.size() <= kMaxMessageChars);
    CHECK(msg.text.back() == '.');
    CHECK_FALSE(msg.degraded);
  }

  SUBCASE("empty reply degrades to fallback") {
    MockVlmClient client;
    client.response = "";
    const auto msg = generate_guidance(
        client, request("s1", graph::RoadType::other), taxonomy(), "mock",
        fixed_now);
    CHECK(msg.degraded);
    CHECK_FALSE(msg.text.empty());
  }
}

TEST_CASE("session property: client calls bounded by distinct segments") {
  std::mt19937 rng(2025);
  std::vector<GuidanceRequest> segments;
  for (int i = 0; i < 12; ++i)
    segments.push_back(request("seg" + std::to_string(i),
                               static_cast<graph::RoadType>(i % 5)));

  for (int trial = 0; trial < 20; ++trial) {
    MockVlmClient client;
    GuidanceSession session(segments, taxonomy(), client, "mock", fixed_now);
    std::set<std::string> visited;
    std::optional<std::string> last_triggered;
    const int events = 500;
    for (int e = 0; e < events; ++e) {
      const auto kind = static_cast<EventKind>(rng() % 3);
      const std::string id = "seg" + std::to_string(rng() % 12);
      const bool fired = session.should_trigger({kind, id});
      const auto msg = session.on_event({kind, id});
      CHECK(fired == msg.has_value());
      if (fired) {
        // Never two consecutive triggers for the same segment.
        if (last_triggered)
          CHECK(*last_triggered != id);
        last_triggered = id;
        visited.insert(id);
      }
    }
    CHECK(client.calls() <= static_cast<int>(visited.size()));
    CHECK(session.client_calls() == client.calls());
  }
}

TEST_CASE("guidance log line carries the wire fields") {
  GuidanceMessage msg;
  msg.segment_id = "s9";
  msg.text = "Watch for drainage gaps.";
  msg.generated_at = 1700000000;
  msg.model_id = "mock";
  msg.degraded = false;
  const auto line = to_log_json(msg, graph::RoadType::tertiary);
  CHECK(line.at("segment_id") == "s9");
  CHECK(line.at("road_type") == "tertiary");
  CHECK(line.at("text") == msg.text);
  CHECK(line.at("degraded") == false);
  CHECK(line.at("model_id") == "mock");
}
