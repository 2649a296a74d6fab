#pragma once

#include "walkaudit/coverage.hpp"
#include "walkaudit/guidance.hpp"
#include "walkaudit/poi.hpp"

#include <memory>
#include <string>

namespace walkaudit::http {

/// Google Places nearby-search adapter. Reads the API key from the
/// GOOGLE_MAPS_API_KEY environment variable when `api_key` is empty.
class HttpPlacesClient : public poi::PlacesClient {
public:
  explicit HttpPlacesClient(std::string api_key = {},
                            std::string host = "https://maps.googleapis.com");
  std::vector<poi::PoiRecord> nearby(const poi::PlacesQuery& query) override;

private:
  std::string api_key_;
  std::string host_;
};

/// Street View metadata adapter (no image download).
class HttpStreetViewClient : public coverage::StreetViewMetaClient {
public:
  explicit HttpStreetViewClient(std::string api_key = {},
                                std::string host = "https://maps.googleapis.com");
  std::optional<coverage::Panorama> query(const geo::GeoPoint& point) override;

private:
  std::string api_key_;
  std::string host_;
};

/// Generative VLM adapter targeting a Gemini-style generateContent endpoint.
/// Panorama image_refs are treated as local file paths and inlined base64;
/// unreadable refs are skipped. Key from VLM_API_KEY when `api_key` is empty.
class HttpVlmClient : public guidance::VlmClient {
public:
  HttpVlmClient(std::string model_id, std::string endpoint,
                std::string api_key = {});
  std::string generate(const std::string& prompt,
                       std::span<const guidance::PanoramaRef> images) override;

private:
  std::string model_id_;
  std::string endpoint_;
  std::string api_key_;
};

} // namespace walkaudit::http
