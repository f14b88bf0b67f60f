#pragma once

#include <string>

#ifndef TIDY_DATA_DIR
#error "TIDY_DATA_DIR must point at the repo data directory"
#endif

inline std::string data_path(const std::string& rel) {
  return std::string(TIDY_DATA_DIR) + "/" + rel;
}
