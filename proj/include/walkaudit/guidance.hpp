#pragma once

#include "walkaudit/labels.hpp"
#include "walkaudit/road_graph.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace walkaudit::guidance {

/// Opaque handle to a panorama image (id plus a payload reference the live
/// adapter resolves; the mock ignores it).
struct PanoramaRef {
  std::string pano_id;
  std::string image_ref;
};

/// Input for one segment's guidance: road type plus the segment's first and
/// last panoramas.
struct GuidanceRequest {
  std::string segment_id;
  graph::RoadType road_type = graph::RoadType::other;
  PanoramaRef start_pano;
  PanoramaRef end_pano;
};

/// Short natural-language instruction shown to the annotator.
struct GuidanceMessage {
  std::string segment_id;
  std::string text; ///< non-empty, at most kMaxMessageChars characters
  std::int64_t generated_at = 0;
  std::string model_id;
  bool degraded = false; ///< true when the static fallback was used
};

inline constexpr std::size_t kMaxMessageChars = 600;

enum class EventKind { MissionStart, SegmentChange, Jump };

EventKind event_kind_from_string(std::string_view s);
std::string_view to_string(EventKind kind);

struct SessionEvent {
  EventKind kind = EventKind::MissionStart;
  std::string segment_id;
};

class VlmClient {
public:
  virtual ~VlmClient() = default;
  virtual std::string generate(const std::string& prompt,
                               std::span<const PanoramaRef> images) = 0;
};

/// Deterministic test double. Returns `response` (or a per-segment canned
/// reply when configured), counts calls, and can be told to fail.
class MockVlmClient : public VlmClient {
public:
  std::string response = "Focus on the walkway and label what blocks it.";
  bool fail = false;
  std::string generate(const std::string& prompt,
                       std::span<const PanoramaRef> images) override;
  int calls() const { return calls_; }

private:
  int calls_ = 0;
};

/// Emphasis clause injected into the prompt for the given road type.
std::string road_type_emphasis(graph::RoadType type);

/// Static per-road-type message used when the model is unreachable.
std::string fallback_message(graph::RoadType type);

/// Deterministic prompt from road type and label vocabulary. Panorama
/// references and segment ids never appear in the text, so the prompt is a
/// pure function of (road_type, taxonomy).
std::string build_prompt(const GuidanceRequest& request,
                         const labels::LabelTaxonomy& taxonomy);

/// Single uncached generation: builds the prompt, calls the client, wraps
/// the reply. A failing or empty reply degrades to the road-type fallback;
/// an oversize reply is truncated at a sentence boundary.
GuidanceMessage generate_guidance(VlmClient& client,
                                  const GuidanceRequest& request,
                                  const labels::LabelTaxonomy& taxonomy,
                                  const std::string& model_id,
                                  const std::function<std::int64_t()>& now);

/// One annotation session: owns the trigger state machine and the
/// per-segment message cache, so a segment's guidance is generated at most
/// once per session no matter how many events land on it.
class GuidanceSession {
public:
  GuidanceSession(std::vector<GuidanceRequest> segments,
                  const labels::LabelTaxonomy& taxonomy, VlmClient& client,
                  std::string model_id,
                  std::function<std::int64_t()> now = nullptr);

  /// True when the event moves the session onto a segment it is not already
  /// on: any event on a fresh session, or a SegmentChange/Jump to a different
  /// segment. Throws ValidationError for an unknown segment.
  bool should_trigger(const SessionEvent& event) const;

  /// Applies the event; returns the (possibly cached) guidance message when
  /// it triggers.
  std::optional<GuidanceMessage> on_event(const SessionEvent& event);

  int client_calls() const { return client_calls_; }
  const std::optional<std::string>& current_segment() const {
    return current_segment_;
  }

private:
  std::map<std::string, GuidanceRequest> segments_;
  const labels::LabelTaxonomy& taxonomy_;
  VlmClient& client_;
  std::string model_id_;
  std::function<std::int64_t()> now_;
  std::optional<std::string> current_segment_;
  std::map<std::string, GuidanceMessage> cache_;
  int client_calls_ = 0;
};

/// JSON-lines record for the guidance log.
nlohmann::json to_log_json(const GuidanceMessage& msg, graph::RoadType road_type);

} // namespace walkaudit::guidance
