// SPDX-License-Identifier: Apache-2.0
#include <cctype>

#include "svabench/errors.hpp"
#include "svabench/verilog.hpp"

namespace svabench {

std::string strip_for_prompt(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  bool gap = false;
  auto emit = [&](char c) {
    if (gap && !out.empty()) out += ' ';
    gap = false;
    out += c;
  };
  std::size_t i = 0;
  while (i < source.size()) {
    char c = source[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      gap = true;
      ++i;
    } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') ++i;
      gap = true;
    } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
      std::size_t end = source.find("*/", i + 2);
      if (end == std::string_view::npos) throw UnterminatedComment(i);
      i = end + 2;
      gap = true;
    } else if (c == '"') {
      emit(c);
      ++i;
      while (i < source.size() && source[i] != '"') {
        if (source[i] == '\\' && i + 1 < source.size()) out += source[i++];
        out += source[i++];
      }
      if (i < source.size()) out += source[i++];
    } else {
      emit(c);
      ++i;
    }
  }
  return out;
}

}  // namespace svabench
