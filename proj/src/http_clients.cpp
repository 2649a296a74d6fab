#include "walkaudit/http_clients.hpp"

#include "walkaudit/errors.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace walkaudit::http {

namespace {

std::string env_or(const std::string& value, const char* var) {
  if (!value.empty())
    return value;
  const char* from_env = std::getenv(var);
  if (from_env == nullptr || *from_env == '\0')
    throw ValidationError(std::string("live client: API key missing; set ") + var);
  return from_env;
}

nlohmann::json get_json(const std::string& host, const std::string& path) {
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path);
  if (!res)
    throw poi::TransportError("HTTP request failed: " + host + path);
  if (res->status == 429)
    throw poi::QuotaError("HTTP 429 from " + host);
  if (res->status != 200)
    throw poi::TransportError("HTTP " + std::to_string(res->status) + " from " +
                              host);
  return nlohmann::json::parse(res->body);
}

std::string base64_encode(const std::string& data) {
  static const char alphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < data.size()) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8) |
                       static_cast<unsigned char>(data[i + 2]);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
    i += 3;
  }
  if (i + 1 == data.size()) {
    const unsigned v = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

} // namespace

HttpPlacesClient::HttpPlacesClient(std::string api_key, std::string host)
    : api_key_(env_or(api_key, "GOOGLE_MAPS_API_KEY")), host_(std::move(host)) {}

std::vector<poi::PoiRecord> HttpPlacesClient::nearby(const poi::PlacesQuery& query) {
  std::ostringstream path;
  path << "/maps/api/place/nearbysearch/json?location=" << query.center.lat
       << "," << query.center.lon << "&radius=" << query.radius_m
       << "&key=" << api_key_;
  const auto body = get_json(host_, path.str());
  const std::string status = body.value("status", "");
  if (status == "OVER_QUERY_LIMIT")
    throw poi::QuotaError("places API quota exhausted");
  if (status != "OK" && status != "ZERO_RESULTS")
    throw poi::TransportError("places API status " + status);

  std::vector<poi::PoiRecord> records;
  for (const auto& r : body.value("results", nlohmann::json::array())) {
    poi::PoiRecord rec;
    rec.provider_id = r.value("place_id", "");
    rec.location = {r.at("geometry").at("location").at("lat").get<double>(),
                    r.at("geometry").at("location").at("lng").get<double>()};
    for (const auto& t : r.value("types", nlohmann::json::array()))
      rec.raw_types.push_back(t.get<std::string>());
    if (rec.raw_types.empty())
      rec.raw_types.push_back("unknown");
    records.push_back(std::move(rec));
  }
  return records;
}

HttpStreetViewClient::HttpStreetViewClient(std::string api_key, std::string host)
    : api_key_(env_or(api_key, "GOOGLE_MAPS_API_KEY")), host_(std::move(host)) {}

std::optional<coverage::Panorama> HttpStreetViewClient::query(const geo::GeoPoint& point) {
  std::ostringstream path;
  path << "/maps/api/streetview/metadata?location=" << point.lat << ","
       << point.lon << "&key=" << api_key_;
  const auto body = get_json(host_, path.str());
  if (body.value("status", "") != "OK")
    return std::nullopt;
  return coverage::Panorama{body.value("pano_id", ""),
                            {body.at("location").at("lat").get<double>(),
                             body.at("location").at("lng").get<double>()}};
}

HttpVlmClient::HttpVlmClient(std::string model_id, std::string endpoint,
                             std::string api_key)
    : model_id_(std::move(model_id)), endpoint_(std::move(endpoint)),
      api_key_(env_or(api_key, "VLM_API_KEY")) {}

std::string HttpVlmClient::generate(const std::string& prompt,
                                    std::span<const guidance::PanoramaRef> images) {
  nlohmann::json parts = nlohmann::json::array();
  parts.push_back({{"text", prompt}});
  for (const auto& image : images) {
    if (image.image_ref.empty())
      continue;
    std::ifstream in(image.image_ref, std::ios::binary);
    if (!in)
      continue;
    std::ostringstream data;
    data << in.rdbuf();
    parts.push_back({{"inline_data",
                      {{"mime_type", "image/jpeg"},
                       {"data", base64_encode(data.str())}}}});
  }
  const nlohmann::json payload = {
      {"contents", nlohmann::json::array({{{"parts", parts}}})}};

  httplib::Client client(endpoint_);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  const std::string path =
      "/v1beta/models/" + model_id_ + ":generateContent?key=" + api_key_;
  auto res = client.Post(path, payload.dump(), "application/json");
  if (!res || res->status != 200)
    throw std::runtime_error("VLM endpoint error" +
                             (res ? " (HTTP " + std::to_string(res->status) + ")"
                                  : ""));
  const auto body = nlohmann::json::parse(res->body);
  return body.at("candidates").at(0).at("content").at("parts").at(0)
      .at("text").get<std::string>();
}

} // namespace walkaudit::http
