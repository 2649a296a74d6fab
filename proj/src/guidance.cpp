#include "walkaudit/guidance.hpp"

#include "walkaudit/errors.hpp"
#include "walkaudit/log.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <sstream>

namespace walkaudit::guidance {

EventKind event_kind_from_string(std::string_view s) {
  if (s == "MissionStart") return EventKind::MissionStart;
  if (s == "SegmentChange") return EventKind::SegmentChange;
  if (s == "Jump") return EventKind::Jump;
  throw SchemaError("unknown session event kind '" + std::string(s) + "'");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
  case EventKind::MissionStart: return "MissionStart";
  case EventKind::SegmentChange: return "SegmentChange";
  case EventKind::Jump: return "Jump";
  }
  return "MissionStart";
}

std::string MockVlmClient::generate(const std::string& prompt,
                                    std::span<const PanoramaRef> images) {
  (void)prompt;
  (void)images;
  ++calls_;
  if (fail)
    throw std::runtime_error("mock VLM client failure");
  return response;
}

std::string road_type_emphasis(graph::RoadType type) {
  switch (type) {
  case graph::RoadType::residential:
    return "This is a residential street, so treat the road itself as the "
           "pedestrian path; focus on obstacles and surface problems on the "
           "road surface and only check curbs at visible crossings.";
  case graph::RoadType::secondary:
  case graph::RoadType::tertiary:
  case graph::RoadType::primary:
    return "Expect a constructed sidewalk along this road; prioritize "
           "checking for missing curb ramps and the condition of crosswalks, "
           "and note obstacles blocking the walkway.";
  case graph::RoadType::other:
    return "Survey both sides for any walkable space and label obstacles, "
           "surface problems, curb transitions, and crossings as you find "
           "them.";
  }
  return "";
}

std::string fallback_message(graph::RoadType type) {
  switch (type) {
  case graph::RoadType::residential:
    return "Guidance is offline. On this residential street, treat the road "
           "itself as the pedestrian path and label obstacles and surface "
           "problems you encounter.";
  case graph::RoadType::secondary:
  case graph::RoadType::tertiary:
  case graph::RoadType::primary:
    return "Guidance is offline. Expect a constructed sidewalk here; check "
           "for missing curb ramps, crosswalk condition, and obstacles on "
           "the walkway.";
  case graph::RoadType::other:
    return "Guidance is offline. Label any obstacles, surface problems, curb "
           "transitions, and crossings you can see along the segment.";
  }
  return "Guidance is offline.";
}

std::string build_prompt(const GuidanceRequest& request,
                         const labels::LabelTaxonomy& taxonomy) {
  std::ostringstream os;
  os << "You are assisting a street-level sidewalk accessibility audit in an "
        "Indian city. The annotator is about to label one street segment "
        "from its start and end street-view panoramas.\n";
  os << "Road type: " << graph::to_string(request.road_type) << ".\n";
  os << "Context: " << road_type_emphasis(request.road_type) << "\n";
  os << "Label vocabulary:\n";
  for (const auto& type : taxonomy.types()) {
    os << "- " << type.name << " ("
       << labels::to_string(type.polarity) << ")";
    if (!type.allowed_tags.empty()) {
      os << ": tags ";
      bool first = true;
      for (const auto& tag : type.allowed_tags) {
        if (!first)
          os << ", ";
        os << tag;
        first = false;
      }
    }
    os << "\n";
  }
  os << "Give practical, India-aware annotation advice for this segment: "
        "what to look for first and which labels likely apply. Answer in at "
        "most 3 sentences.";
  return os.str();
}

namespace {

std::string truncate_at_sentence(const std::string& text, std::size_t limit) {
  if (text.size() <= limit)
    return text;
  const std::string head = text.substr(0, limit);
  const std::size_t cut = head.find_last_of(".!?");
  if (cut == std::string::npos)
    return head;
  return head.substr(0, cut + 1);
}

std::int64_t system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

} // namespace

GuidanceMessage generate_guidance(VlmClient& client,
                                  const GuidanceRequest& request,
                                  const labels::LabelTaxonomy& taxonomy,
                                  const std::string& model_id,
                                  const std::function<std::int64_t()>& now) {
  GuidanceMessage msg;
  msg.segment_id = request.segment_id;
  msg.model_id = model_id;
  msg.generated_at = now ? now() : system_now();

  const PanoramaRef images[] = {request.start_pano, request.end_pano};
  try {
    const std::string prompt = build_prompt(request, taxonomy);
    std::string text = client.generate(prompt, images);
    if (text.empty())
      throw ValidationError("model returned empty guidance");
    msg.text = truncate_at_sentence(text, kMaxMessageChars);
    if (msg.text.empty())
      throw ValidationError("guidance empty after truncation");
  } catch (const std::exception& e) {
    log::warn("guidance generation failed; using fallback",
              {{"segment_id", request.segment_id}, {"reason", e.what()}});
    msg.text = fallback_message(request.road_type);
    msg.degraded = true;
  }
  return msg;
}

GuidanceSession::GuidanceSession(std::vector<GuidanceRequest> segments,
                                 const labels::LabelTaxonomy& taxonomy,
                                 VlmClient& client, std::string model_id,
                                 std::function<std::int64_t()> now)
    : taxonomy_(taxonomy), client_(client), model_id_(std::move(model_id)),
      now_(std::move(now)) {
  for (auto& seg : segments) {
    const std::string id = seg.segment_id;
    if (!segments_.emplace(id, std::move(seg)).second)
      throw ValidationError("guidance session: duplicate segment '" + id + "'");
  }
}

bool GuidanceSession::should_trigger(const SessionEvent& event) const {
  if (!segments_.count(event.segment_id))
    throw ValidationError("guidance session: unknown segment '" +
                          event.segment_id + "'");
  // Repeated events on the segment the session is already on never fire.
  return !current_segment_ || *current_segment_ != event.segment_id;
}

std::optional<GuidanceMessage> GuidanceSession::on_event(const SessionEvent& event) {
  const bool fire = should_trigger(event);
  current_segment_ = event.segment_id;
  if (!fire)
    return std::nullopt;

  auto cached = cache_.find(event.segment_id);
  if (cached != cache_.end())
    return cached->second;

  ++client_calls_;
  GuidanceMessage msg = generate_guidance(
      client_, segments_.at(event.segment_id), taxonomy_, model_id_, now_);
  cache_[event.segment_id] = msg;
  return msg;
}

nlohmann::json to_log_json(const GuidanceMessage& msg, graph::RoadType road_type) {
  return {{"segment_id", msg.segment_id},
          {"road_type", std::string(graph::to_string(road_type))},
          {"text", msg.text},
          {"degraded", msg.degraded},
          {"model_id", msg.model_id},
          {"generated_at", msg.generated_at}};
}

} // namespace walkaudit::guidance
