#include "amber/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace amber::log {

namespace {

Level parse_level(const char* text) noexcept {
  if (text == nullptr) return Level::Warn;
  const std::string s(text);
  if (s == "error") return Level::Error;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  return Level::Warn;
}

const char* label(Level level) noexcept {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() noexcept {
  static const Level level = parse_level(std::getenv("AMBER_LOG"));
  return level;
}

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  std::cerr << "[amber:" << label(level) << "] " << message << '\n';
}

}  // namespace amber::log
