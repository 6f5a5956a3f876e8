/*
 * Copyright 2026 The Moodsense Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "moodsense/learn/model.hpp"

namespace moodsense::learn {

struct Prediction {
  std::string label;
  int class_index = 0;
  ClassVector probabilities{};
  std::uint64_t version = 0;  // registration counter of the answering model
};

// Named model handles. Register swaps the model in one step; an Invoke that
// raced with it is answered entirely by the old or the new model.
class EndpointRegistry {
 public:
  // Returns the new version number for `name` (1 for the first model).
  std::uint64_t Register(const std::string& name, ModelParams model);
  // Throws NotFoundError for an unknown name.
  Prediction Invoke(const std::string& name, double gsr, double bpm) const;
  std::shared_ptr<const ModelParams> Get(const std::string& name) const;
  bool Contains(const std::string& name) const;
  std::vector<std::string> Names() const;

 private:
  struct Entry {
    std::shared_ptr<const ModelParams> model;
    std::uint64_t version = 0;
  };
  Entry Lookup(const std::string& name) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, Entry> endpoints_;
};

}  // namespace moodsense::learn
