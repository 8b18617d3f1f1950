// Copyright 2026 The nemaudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-protocol embedding server used by the tests. Usage:
//   fake_embed_server <dim> <mode> [ok_count]
// Modes: ok, bad_id, error, wrong_length, garbage, exit. Misbehaving modes
// answer the first ok_count requests correctly (default 0).

#include <cstdlib>
#include <iostream>
#include <string>

#include "nemaudit/embed.h"
#include "json.hpp"

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: fake_embed_server <dim> <mode> [ok_count]\n";
    return 2;
  }
  const int dim = std::atoi(argv[1]);
  const std::string mode = argv[2];
  long ok_left = argc > 3 ? std::atol(argv[3]) : 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto request = nlohmann::json::parse(line);
    const auto id = request.at("id").get<long long>();
    const std::string text = request.at("text").get<std::string>();
    nlohmann::json response = {{"id", id}};
    const auto vector = nemaudit::DeterministicTestEmbed(text, 7, dim).values;
    if (mode == "ok" || ok_left-- > 0) {
      response["vector"] = vector;
    } else if (mode == "bad_id") {
      response["id"] = id + 1;
      response["vector"] = vector;
    } else if (mode == "error") {
      response["error"] = "model not loaded";
    } else if (mode == "wrong_length") {
      response["vector"] = std::vector<double>(vector.begin(), vector.end() - 1);
    } else if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    } else {
      return 0;
    }
    std::cout << response.dump() << std::endl;
  }
  return 0;
}
