#include "efron/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "efron/error.hpp"

namespace efron {

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') {
      if (--depth < 0) throw Error(ErrorCode::BadParameter, "unbalanced ')' in '" + std::string(text) + "'");
    }
    if (c == sep && depth == 0) {
      out.emplace_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw Error(ErrorCode::BadParameter, "unbalanced '(' in '" + std::string(text) + "'");
  out.emplace_back(trim(text.substr(start)));
  return out;
}

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::BadParameter,
                "expected a finite number for " + std::string(what) + ", got '" + std::string(text) + "'");
  }
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Call parse_call(std::string_view text) {
  text = trim(text);
  Call call;
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    call.name = std::string(text);
  } else {
    if (text.back() != ')') throw Error(ErrorCode::BadParameter, "missing ')' in '" + std::string(text) + "'");
    call.name = std::string(trim(text.substr(0, open)));
    const std::string_view inner = trim(text.substr(open + 1, text.size() - open - 2));
    if (!inner.empty()) call.args = split_top_level(inner, ',');
  }
  if (call.name.empty()) throw Error(ErrorCode::BadParameter, "empty name in '" + std::string(text) + "'");
  return call;
}

}  // namespace efron
