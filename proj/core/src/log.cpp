#include "promind/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cctype>
#include <cstring>

namespace promind::log {
namespace {

Level parse_env() {
  const char* env = std::getenv("PROMIND_LOG");
  if (env == nullptr || *env == '\0') return Level::warn;
  if (std::strlen(env) == 1 && *env >= '0' && *env <= '4') {
    return static_cast<Level>(*env - '0');
  }
  auto matches = [env](const char* name) {
    const char* a = env;
    const char* b = name;
    while (*a != '\0' && *b != '\0' &&
           std::tolower(static_cast<unsigned char>(*a)) ==
               std::tolower(static_cast<unsigned char>(*b))) {
      ++a;
      ++b;
    }
    return *a == '\0' && *b == '\0';
  };
  if (matches("off")) return Level::off;
  if (matches("error")) return Level::error;
  if (matches("warn") || matches("warning")) return Level::warn;
  if (matches("info")) return Level::info;
  if (matches("debug")) return Level::debug;
  std::fprintf(stderr, "[promind] unknown PROMIND_LOG value '%s', using warn\n", env);
  return Level::warn;
}

Level g_level = parse_env();

const char* tag(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
    default: return "?";
  }
}

}  // namespace

Level level() { return g_level; }
void set_level(Level level) { g_level = level; }

void write(Level level, const char* fmt, ...) {
  if (static_cast<int>(level) > static_cast<int>(g_level) || level == Level::off) return;
  std::fprintf(stderr, "[promind %s] ", tag(level));
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace promind::log
