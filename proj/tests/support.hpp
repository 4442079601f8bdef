#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

inline std::filesystem::path fixtures_dir() {
    if (const char* env = std::getenv("DELM_FIXTURES")) return env;
#ifdef DELM_SOURCE_FIXTURES
    return DELM_SOURCE_FIXTURES;
#else
    return "fixtures";
#endif
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace testsupport
