#pragma once

namespace promind::log {

enum class Level { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

// Current level; initialized once from the PROMIND_LOG environment variable
// (off|error|warn|info|debug or 0..4; default warn).
Level level();
void set_level(Level level);

void write(Level level, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

}  // namespace promind::log

#define PROMIND_ERROR(...) ::promind::log::write(::promind::log::Level::error, __VA_ARGS__)
#define PROMIND_WARN(...) ::promind::log::write(::promind::log::Level::warn, __VA_ARGS__)
#define PROMIND_INFO(...) ::promind::log::write(::promind::log::Level::info, __VA_ARGS__)
#define PROMIND_DEBUG(...) ::promind::log::write(::promind::log::Level::debug, __VA_ARGS__)
