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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "moodsense/etl/object_store.hpp"
#include "moodsense/learn/endpoint.hpp"
#include "moodsense/learn/metrics.hpp"
#include "moodsense/learn/model.hpp"

namespace moodsense::learn {

struct TrainingJobOptions {
  std::string participant_id;
  std::string data_bucket = "sensor-data";
  double test_fraction = 0.2;
  std::uint64_t split_seed = 42;
  int smote_k = 5;
  std::uint64_t smote_seed = 42;
  Hyperparams hyperparams;
  bool persist = true;  // model and metrics log to the store
};

struct TrainingReport {
  ModelParams model;
  std::uint64_t endpoint_version = 0;
  std::size_t rows = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t synthetic_rows = 0;
  std::size_t skipped_unlabeled = 0;
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;
  EvalReport train_eval;               // on the original (pre-SMOTE) training rows
  std::optional<EvalReport> test_eval;  // absent when the test split is empty
  std::string log_key;                 // empty when not persisted

  nlohmann::ordered_json ToJson() const;
};

// assemble -> split -> SMOTE (training rows only) -> train -> evaluate ->
// register endpoint `participant_id` -> persist model and metrics log.
TrainingReport RunTrainingJob(etl::ObjectStore& store, EndpointRegistry& registry,
                              const TrainingJobOptions& options);

// Same pipeline on an in-memory dataset, without registry or store.
TrainingReport TrainAndEvaluate(const Dataset& dataset, const TrainingJobOptions& options);

// logs/<stream>/train-<epoch ms>.json in kModelBucket
std::string TrainingLogKey(std::string_view participant_id, EpochMs at);

// Latest stored metrics log for a participant; throws NotFoundError if none.
nlohmann::ordered_json LoadLatestTrainingLog(const etl::ObjectStore& store,
                                             std::string_view participant_id);

}  // namespace moodsense::learn
