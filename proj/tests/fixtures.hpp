#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

inline const nlohmann::json& reference_fixture() {
  static const nlohmann::json doc = [] {
    std::ifstream in(std::string(STROKEFOREST_FIXTURE_DIR) + "/reference.json");
    return nlohmann::json::parse(in);
  }();
  return doc;
}
