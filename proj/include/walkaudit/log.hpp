#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace walkaudit::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

void set_min_level(Level level);
Level min_level();

/// Emits one JSON line to stderr: {"level":...,"msg":...,<fields>}.
void emit(Level level, const std::string& msg,
          const nlohmann::json& fields = nlohmann::json::object());

inline void info(const std::string& msg,
                 const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::info, msg, fields);
}

inline void warn(const std::string& msg,
                 const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::warn, msg, fields);
}

} // namespace walkaudit::log
