#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace dsm::log {

enum class Level : int { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the DSM_LOG environment variable (error|warn|info|debug),
// read once. Default is warn.
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("DSM_LOG");
        if (!env) return Level::Warn;
        if (std::strcmp(env, "error") == 0) return Level::Error;
        if (std::strcmp(env, "info") == 0) return Level::Info;
        if (std::strcmp(env, "debug") == 0) return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline void write(Level lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[dsm %s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace dsm::log
