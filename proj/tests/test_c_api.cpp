// Copyright 2026 The TRR-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "trr/trr.h"

namespace {

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "trr_test_c_api";
  std::filesystem::create_directories(dir);
  return dir / name;
}

trr_config* tiny_config() {
  trr_config* c = nullptr;
  REQUIRE(trr_config_create(&c) == TRR_OK);
  for (const char* kv : {"samples_per_class=5", "train_fraction=0.8", "height=8", "width=8",
                         "epochs=1", "batch_size=10", "lr=0.05", "ablation.seeds=0"}) {
    REQUIRE(trr_config_apply(c, kv) == TRR_OK);
  }
  return c;
}

}  // namespace

TEST_CASE("status names and error text") {
  CHECK(std::string(trr_status_name(TRR_OK)) == "ok");
  CHECK(std::string(trr_status_name(TRR_ERR_CONFIG)) == "config error");
  CHECK(std::string(trr_version()) == "0.1.0");

  trr_config* c = nullptr;
  REQUIRE(trr_config_create(&c) == TRR_OK);
  CHECK(trr_config_apply(c, "alpah=0.3") == TRR_ERR_CONFIG);
  CHECK(std::string(trr_last_error()).find("alpah") != std::string::npos);
  CHECK(trr_config_set(c, "alpha", "abc") == TRR_ERR_CONFIG);
  CHECK(trr_config_create(nullptr) == TRR_ERR_INVALID_ARGUMENT);
  CHECK(trr_config_load("/nonexistent/run.ini", &c) != TRR_OK);
  trr_config_destroy(c);
  trr_config_destroy(nullptr);
}

TEST_CASE("config values through caller buffers") {
  trr_config* c = nullptr;
  REQUIRE(trr_config_create(&c) == TRR_OK);
  REQUIRE(trr_config_set(c, "train.alpha", "0.3") == TRR_OK);
  size_t needed = 0;
  char small[2] = {'x', 0};
  CHECK(trr_config_get(c, "alpha", small, sizeof small, &needed) == TRR_OK);
  CHECK(needed == 4);
  CHECK(small[0] == 'x');
  char buf[16];
  REQUIRE(trr_config_get(c, "alpha", buf, sizeof buf, &needed) == TRR_OK);
  CHECK(std::string(buf) == "0.3");

  const auto path = scratch("run.ini");
  REQUIRE(trr_config_save(c, path.c_str()) == TRR_OK);
  trr_config* back = nullptr;
  REQUIRE(trr_config_load(path.c_str(), &back) == TRR_OK);
  REQUIRE(trr_config_get(back, "alpha", buf, sizeof buf, &needed) == TRR_OK);
  CHECK(std::string(buf) == "0.3");
  trr_config_destroy(back);
  trr_config_destroy(c);
}

TEST_CASE("train, save, reload and evaluate") {
  trr_config* c = tiny_config();
  trr_data* d = nullptr;
  REQUIRE(trr_data_prepare(c, &d) == TRR_OK);
  size_t ntrain = 0, ntest = 0;
  REQUIRE(trr_data_size(d, &ntrain, &ntest) == TRR_OK);
  CHECK(ntrain == 40);
  CHECK(ntest == 10);

  trr_model* m = nullptr;
  REQUIRE(trr_model_create(c, d, 0, &m) == TRR_OK);
  trr_train_summary s{};
  const auto out = scratch("run");
  REQUIRE(trr_train(c, d, m, out.c_str(), &s) == TRR_OK);
  CHECK(s.epochs == 1);
  CHECK(s.iterations == 4);
  CHECK(std::filesystem::exists(out / "config.ini"));
  CHECK(std::filesystem::exists(out / "model.ckpt"));

  trr_eval_result r{};
  REQUIRE(trr_evaluate(m, d, &r) == TRR_OK);
  CHECK(r.samples == 10);
  CHECK(r.accuracy == s.test_accuracy);
  for (int k = 0; k < TRR_NUM_STAGES; ++k) {
    CHECK(r.asfr[k] == static_cast<double>(r.spike_counts[k]) / static_cast<double>(r.elements[k]));
  }

  std::vector<int32_t> pred(10);
  size_t count = 0;
  REQUIRE(trr_predict(m, d, pred.data(), pred.size(), &count) == TRR_OK);
  CHECK(count == 10);
  std::vector<int32_t> head(3, -1);
  REQUIRE(trr_predict(m, d, head.data(), head.size(), &count) == TRR_OK);
  CHECK(count == 10);
  CHECK(head == std::vector<int32_t>(pred.begin(), pred.begin() + 3));

  trr_model* loaded = nullptr;
  REQUIRE(trr_model_load(c, d, (out / "model.ckpt").c_str(), &loaded) == TRR_OK);
  trr_eval_result r2{};
  REQUIRE(trr_evaluate(loaded, d, &r2) == TRR_OK);
  CHECK(r2.accuracy == r.accuracy);

  double asfr[TRR_NUM_STAGES];
  const auto csv = scratch("asfr.csv");
  REQUIRE(trr_asfr_report(loaded, d, csv.c_str(), asfr) == TRR_OK);
  for (int k = 0; k < TRR_NUM_STAGES; ++k) CHECK(asfr[k] == r.asfr[k]);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "stage1,stage2,stage3,stage4");

  // A config describing a different architecture refuses the checkpoint.
  REQUIRE(trr_config_apply(c, "width_divisor=8") == TRR_OK);
  trr_model* wrong = nullptr;
  CHECK(trr_model_load(c, d, (out / "model.ckpt").c_str(), &wrong) == TRR_ERR_CHECKPOINT);
  CHECK(wrong == nullptr);

  trr_model_destroy(loaded);
  trr_model_destroy(m);
  trr_data_destroy(d);
  trr_config_destroy(c);
  std::filesystem::remove_all(scratch("").parent_path());
}

TEST_CASE("events to dataset") {
  const auto csv = scratch("e.csv");
  {
    std::ofstream out(csv);
    out << "#sensor,8,8\nt,p,x,y\n";
    for (int i = 0; i < 50; ++i) out << i << ',' << i % 2 << ',' << i % 8 << ',' << (i / 8) % 8 << '\n';
  }
  const auto bin = scratch("e.bin");
  REQUIRE(trr_events_convert(csv.c_str(), bin.c_str()) == TRR_OK);
  const std::string b = bin.string();
  const char* paths[] = {b.c_str(), b.c_str()};
  const int32_t labels[] = {0, 1};
  const auto ds = scratch("e.trds");
  REQUIRE(trr_events_to_dataset(paths, labels, 2, 5, TRR_FIXED_COUNT, 1, 2, ds.c_str()) == TRR_OK);
  CHECK(std::filesystem::file_size(ds) == 36 + 2 * (4 + 4 * 5 * 2 * 8 * 8));
  const int32_t bad_labels[] = {0, 7};
  CHECK(trr_events_to_dataset(paths, bad_labels, 2, 5, TRR_FIXED_COUNT, 1, 2, ds.c_str()) ==
        TRR_ERR_DATA);
  std::filesystem::remove_all(scratch("").parent_path());
}

TEST_CASE("ablation through the C API") {
  trr_config* c = tiny_config();
  trr_data* d = nullptr;
  REQUIRE(trr_data_prepare(c, &d) == TRR_OK);
  trr_ablation_row rows[4];
  const auto out = scratch("abl");
  REQUIRE(trr_ablate(c, d, out.c_str(), rows) == TRR_OK);
  CHECK(std::string(rows[0].label) == "Baseline");
  CHECK(std::string(rows[1].label) == "+TR");
  CHECK(std::string(rows[2].label) == "+FH");
  CHECK(std::string(rows[3].label) == "TRR");
  CHECK(rows[0].delta_vs_baseline == 0.0);
  CHECK(std::filesystem::exists(out / "ablation.csv"));
  CHECK(std::filesystem::exists(out / "asfr.csv"));
  CHECK(std::filesystem::exists(out / "config.ini"));
  trr_data_destroy(d);
  trr_config_destroy(c);
  std::filesystem::remove_all(scratch("").parent_path());
}
