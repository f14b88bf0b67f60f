#include "tidy/geometry.hpp"

namespace tidy {

Heading parse_heading(const std::string& token) {
  static const std::array<std::string, 8> names = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (token == names[i]) return static_cast<Heading>(i);
  }
  fail(ErrorCode::ConfigError, "bad heading '" + token + "'");
}

Heading heading_from_delta(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    const Cell d = heading_delta(static_cast<Heading>(i));
    if (d.x == dx && d.y == dy) return static_cast<Heading>(i);
  }
  fail(ErrorCode::ConfigError, "delta is not a unit step");
}

}  // namespace tidy
