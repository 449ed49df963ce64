#pragma once

#include <iostream>
#include <sstream>
#include <utility>

namespace cando::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Read once from CANDO_LOG (error|warn|info|debug or 0-3); defaults to warn.
Level threshold();

template <typename... Args>
void write(Level level, Args&&... args) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static const char* kTags[] = {"error", "warn", "info", "debug"};
  std::ostringstream line;
  line << "[cando " << kTags[static_cast<int>(level)] << "] ";
  (line << ... << std::forward<Args>(args));
  line << '\n';
  std::cerr << line.str();
}

template <typename... Args>
void info(Args&&... args) { write(Level::Info, std::forward<Args>(args)...); }
template <typename... Args>
void debug(Args&&... args) { write(Level::Debug, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { write(Level::Warn, std::forward<Args>(args)...); }

}  // namespace cando::log
