#pragma once

#include <fstream>
#include <map>
#include <string>

#include "mplx/common.hpp"

namespace mplx {

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

/// Minimal [section] key=value parser. '#' and ';' start comments.
inline IniSections parse_ini(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  IniSections out;
  std::string line, section;
  int line_no = 0;
  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(f, line)) {
    ++line_no;
    std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace mplx
