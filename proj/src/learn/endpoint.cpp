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

#include "moodsense/learn/endpoint.hpp"

#include <mutex>

#include "moodsense/error.hpp"

namespace moodsense::learn {

std::uint64_t EndpointRegistry::Register(const std::string& name, ModelParams model) {
  auto ptr = std::make_shared<const ModelParams>(std::move(model));
  std::unique_lock lock(mu_);
  Entry& e = endpoints_[name];
  e.model = std::move(ptr);
  return ++e.version;
}

EndpointRegistry::Entry EndpointRegistry::Lookup(const std::string& name) const {
  std::shared_lock lock(mu_);
  auto it = endpoints_.find(name);
  if (it == endpoints_.end()) {
    throw NotFoundError("no endpoint named \"" + name + "\"");
  }
  return it->second;
}

Prediction EndpointRegistry::Invoke(const std::string& name, double gsr, double bpm) const {
  const Entry e = Lookup(name);
  Prediction p;
  p.probabilities = PredictProba(*e.model, gsr, bpm);
  for (int c = 1; c < kNumClasses; ++c) {
    if (p.probabilities[c] > p.probabilities[p.class_index]) p.class_index = c;
  }
  p.label = e.model->label_map[static_cast<std::size_t>(p.class_index)];
  p.version = e.version;
  return p;
}

std::shared_ptr<const ModelParams> EndpointRegistry::Get(const std::string& name) const {
  return Lookup(name).model;
}

bool EndpointRegistry::Contains(const std::string& name) const {
  std::shared_lock lock(mu_);
  return endpoints_.count(name) > 0;
}

std::vector<std::string> EndpointRegistry::Names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, e] : endpoints_) out.push_back(name);
  return out;
}

}  // namespace moodsense::learn
