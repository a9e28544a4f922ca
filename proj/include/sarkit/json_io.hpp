// Copyright 2026 The sarkit Authors
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

#ifndef SARKIT_JSON_IO_HPP_
#define SARKIT_JSON_IO_HPP_

#include <fstream>
#include <string>

#include "nlohmann/json.hpp"
#include "sarkit/error.hpp"

namespace sarkit {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw_error(ErrorKind::kIo, "invalid JSON: " + path);
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

}  // namespace sarkit

#endif  // SARKIT_JSON_IO_HPP_
