// Copyright 2026 The multires Authors. All Rights Reserved.
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

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multires/multires.h"

namespace {

int Report(mr_status s) {
  if (s != MR_OK) std::cerr << "error: " << mr_last_error() << "\n";
  return static_cast<int>(s);
}

std::string Fetch(mr_status (*fn)(const mr_config*, char*, size_t, size_t*),
                  const mr_config* c) {
  size_t n = 0;
  fn(c, nullptr, 0, &n);
  std::string s(n + 1, '\0');
  fn(c, s.data(), s.size(), &n);
  s.resize(n);
  return s;
}

std::string DefaultCheckpoint(const mr_config* c) {
  size_t n = 0;
  mr_config_checkpoint_path(c, 0, nullptr, 0, &n);
  std::string s(n + 1, '\0');
  mr_config_checkpoint_path(c, 0, s.data(), s.size(), &n);
  s.resize(n);
  return s;
}

struct ConfigDeleter {
  void operator()(mr_config* c) const { mr_config_free(c); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-resolution spoofing countermeasure"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "config file (falls back to $MULTIRES_CONFIG)");
  app.add_option("--seed", seed, "overrides corpus.seed and train.seed");
  app.add_option("--set", sets, "key=value override, repeatable");

  auto* gen = app.add_subcommand("gen-data", "synthesize the toy corpus");

  std::string extract_split = "all";
  auto* extract = app.add_subcommand("extract", "build feature caches");
  extract->add_option("--split", extract_split)
      ->check(CLI::IsMember({"train", "dev", "eval", "all"}));

  auto* train = app.add_subcommand("train", "train on the cached features");

  std::string ckpt, eval_split = "eval", cache;
  auto* eval = app.add_subcommand("eval", "score a split");
  eval->add_option("--checkpoint", ckpt);
  eval->add_option("--split", eval_split)->check(CLI::IsMember({"train", "dev", "eval"}));
  eval->add_option("--cache", cache);

  auto* prune = app.add_subcommand("prune", "drop low-weight resolutions and retrain");
  prune->add_option("--checkpoint", ckpt);

  std::string weights_split;
  auto* inspect = app.add_subcommand("inspect-weights", "mean resolution weights");
  inspect->add_option("--checkpoint", ckpt);
  inspect->add_option("--split", weights_split)
      ->check(CLI::IsMember({"train", "dev", "eval"}));

  CLI11_PARSE(app, argc, argv);

  if (config_path.empty()) {
    if (const char* env = std::getenv("MULTIRES_CONFIG")) config_path = env;
  }
  mr_config* raw = nullptr;
  mr_status s = config_path.empty() ? mr_config_default(&raw)
                                    : mr_config_load(config_path.c_str(), &raw);
  if (s != MR_OK) return Report(s);
  std::unique_ptr<mr_config, ConfigDeleter> config(raw);

  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return MR_ERR_INVALID_ARGUMENT;
    }
    s = mr_config_set(config.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != MR_OK) return Report(s);
  }
  if (seed) {
    if ((s = mr_config_set_seed(config.get(), *seed)) != MR_OK) return Report(s);
  }
  if (ckpt.empty()) ckpt = DefaultCheckpoint(config.get());

  if (*gen) return Report(mr_gen_data(config.get()));
  if (*extract) return Report(mr_extract(config.get(), extract_split.c_str()));
  if (*train) return Report(mr_train(config.get()));
  if (*eval) {
    return Report(mr_eval(config.get(), ckpt.c_str(), eval_split.c_str(),
                          cache.empty() ? nullptr : cache.c_str(), nullptr, nullptr));
  }
  if (*prune) return Report(mr_prune(config.get(), ckpt.c_str(), nullptr));
  if (*inspect) {
    if (weights_split.empty()) weights_split = Fetch(mr_config_weights_split, config.get());
    return Report(mr_inspect_weights(config.get(), ckpt.c_str(), weights_split.c_str()));
  }
  return 0;
}
