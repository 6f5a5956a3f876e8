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

#include "moodsense/learn/training_job.hpp"

#include <cstdio>

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"
#include "moodsense/learn/dataset.hpp"
#include "moodsense/learn/model_io.hpp"
#include "moodsense/learn/smote.hpp"

namespace moodsense::learn {

nlohmann::ordered_json TrainingReport::ToJson() const {
  nlohmann::ordered_json j;
  j["participant_id"] = model.participant_id;
  j["trained_at"] = model.trained_at;
  j["endpoint_version"] = endpoint_version;
  j["rows"] = rows;
  j["train_rows"] = train_rows;
  j["test_rows"] = test_rows;
  j["synthetic_rows"] = synthetic_rows;
  j["skipped_unlabeled"] = skipped_unlabeled;
  j["hyperparams"] = model.hyperparams.ToJson();
  j["initial_loss"] = initial_loss;
  j["epoch_loss"] = epoch_loss;
  j["train_eval"] = train_eval.ToJson();
  j["test_eval"] = test_eval ? test_eval->ToJson() : nlohmann::ordered_json(nullptr);
  return j;
}

TrainingReport TrainAndEvaluate(const Dataset& dataset, const TrainingJobOptions& options) {
  const auto train_x = dataset.TrainFeatures();
  const auto train_y = dataset.TrainLabels();
  if (train_x.empty()) throw EmptyDatasetError("training split is empty");

  const auto balanced = SmoteBalance(train_x, train_y, options.smote_k, options.smote_seed);
  auto trained = Train(balanced.features, balanced.labels, options.hyperparams,
                       dataset.participant_id);

  TrainingReport r;
  r.rows = dataset.features.size();
  r.train_rows = train_x.size();
  r.test_rows = dataset.test.size();
  r.synthetic_rows = balanced.synthetic.size();
  r.skipped_unlabeled = dataset.skipped_unlabeled;
  r.initial_loss = trained.initial_loss;
  r.epoch_loss = std::move(trained.epoch_loss);
  r.model = std::move(trained.model);
  r.train_eval = Evaluate(r.model, train_x, train_y);
  if (!dataset.test.empty()) {
    r.test_eval = Evaluate(r.model, dataset.TestFeatures(), dataset.TestLabels());
  }
  return r;
}

TrainingReport RunTrainingJob(etl::ObjectStore& store, EndpointRegistry& registry,
                              const TrainingJobOptions& options) {
  const Dataset ds = AssembleDataset(store, options.data_bucket, options.participant_id,
                                     options.test_fraction, options.split_seed);
  TrainingReport r = TrainAndEvaluate(ds, options);
  r.endpoint_version = registry.Register(options.participant_id, r.model);
  if (options.persist) {
    SaveModel(r.model, store);
    r.log_key = TrainingLogKey(options.participant_id, NowMs());
    store.Put(kModelBucket, r.log_key, r.ToJson().dump(2));
  }
  spdlog::info("trained {}: {} rows, held-out accuracy {}", options.participant_id, r.rows,
               r.test_eval ? std::to_string(r.test_eval->accuracy) : std::string("n/a"));
  return r;
}

std::string TrainingLogKey(std::string_view participant_id, EpochMs at) {
  char stamp[32];
  std::snprintf(stamp, sizeof stamp, "%013lld", static_cast<long long>(at));
  return "logs/" + etl::StreamNameFor(participant_id) + "/train-" + stamp + ".json";
}

nlohmann::ordered_json LoadLatestTrainingLog(const etl::ObjectStore& store,
                                             std::string_view participant_id) {
  const auto keys =
      store.List(kModelBucket, "logs/" + etl::StreamNameFor(participant_id) + "/");
  if (keys.empty()) {
    throw NotFoundError("no training log for \"" + std::string(participant_id) + "\"");
  }
  return nlohmann::ordered_json::parse(store.GetText(kModelBucket, keys.back()));
}

}  // namespace moodsense::learn
