#include "cando/log.hpp"

#include <cstdlib>
#include <string>

namespace cando::log {

namespace {

Level parse_level() {
  const char* env = std::getenv("CANDO_LOG");
  if (env == nullptr) return Level::Warn;
  const std::string v(env);
  if (v == "error" || v == "0") return Level::Error;
  if (v == "warn" || v == "1") return Level::Warn;
  if (v == "info" || v == "2") return Level::Info;
  if (v == "debug" || v == "3") return Level::Debug;
  return Level::Warn;
}

}  // namespace

Level threshold() {
  static const Level level = parse_level();
  return level;
}

}  // namespace cando::log
