#include "walkaudit/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace walkaudit::log {

namespace {
std::atomic<Level> g_min_level{Level::info};
std::mutex g_emit_mutex;

const char* level_name(Level level) {
  switch (level) {
  case Level::debug: return "debug";
  case Level::info: return "info";
  case Level::warn: return "warn";
  case Level::error: return "error";
  }
  return "info";
}
} // namespace

void set_min_level(Level level) { g_min_level.store(level); }

Level min_level() { return g_min_level.load(); }

void emit(Level level, const std::string& msg, const nlohmann::json& fields) {
  if (level < g_min_level.load())
    return;
  nlohmann::json line = fields.is_object() ? fields : nlohmann::json::object();
  line["level"] = level_name(level);
  line["msg"] = msg;
  std::lock_guard<std::mutex> lock(g_emit_mutex);
  std::cerr << line.dump() << "\n";
}

} // namespace walkaudit::log
