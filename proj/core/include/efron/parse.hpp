#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace efron {

// Splits on `sep` outside parentheses; pieces are trimmed.
std::vector<std::string> split_top_level(std::string_view text, char sep);

std::string_view trim(std::string_view text);

// Whole-string parse; throws BadParameter naming `what` on junk.
double parse_number(std::string_view text, std::string_view what);

// Shortest text that reads back to the same double.
std::string format_number(double v);

// `name` or `name(arg, arg, ...)`.
struct Call {
  std::string name;
  std::vector<std::string> args;
};

Call parse_call(std::string_view text);

}  // namespace efron
