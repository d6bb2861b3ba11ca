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

#include <doctest.h>

#include <cmath>

#include "reference_net.hpp"
#include "support.hpp"
#include "trr/dataset.hpp"
#include "trr/losses.hpp"
#include "trr/model.hpp"
#include "trr/ops.hpp"
#include "trr/temporal.hpp"

using namespace trr;
using trr::testing::bit_equal;
using trr::testing::check_gradients;
using trr::testing::kind_of;
using trr::testing::random_binary;
using trr::testing::random_tensor;

namespace {

ModelConfig small_config(std::size_t steps = 5, std::size_t side = 16) {
  ModelConfig c;
  c.in_channels = 2;
  c.height = side;
  c.width = side;
  c.classes = 10;
  c.timesteps = steps;
  return c;
}

// Model whose affines are calibrated on `input` so every stage is active.
SnnModel active_model(const ModelConfig& c, const Tensor& input, InputMode mode,
                      std::uint64_t seed = 3) {
  SnnModel m(c, seed);
  m.calibrate(input, mode, 0.0f, 1.0f);
  return m;
}

void set_all(SnnModel& m, const std::string& suffix, float value) {
  for (auto& p : m.parameters()) {
    if (p.name.size() >= suffix.size() &&
        p.name.compare(p.name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      for (auto& v : p.tensor.mutable_data()) v = value;
    }
  }
}

double max_diff(const Tensor& t, const std::vector<double>& ref) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.numel(); ++i) {
    m = std::max(m, std::fabs(static_cast<double>(t.at(i)) - ref[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("config widths and parameter layout") {
  ModelConfig c = small_config();
  const auto w = c.channels();
  CHECK(std::vector<std::size_t>(w.begin(), w.end()) ==
        std::vector<std::size_t>{4, 8, 16, 16, 32, 32, 32, 32});
  c.architecture = Architecture::kVgg9;
  const auto full = c.channels();
  CHECK(full[0] == 64);
  CHECK(full[7] == 512);

  SnnModel m(small_config(), 1);
  const auto params = m.parameters();
  REQUIRE(params.size() == 3 * kConvLayers + 2);
  CHECK(params[0].tensor.shape() == Shape{4, 2, 3, 3});
  CHECK(params.back().name == "fc.bias");
  CHECK(params[params.size() - 2].tensor.shape() == Shape{10, 32});

  SnnModel same(small_config(), 1);
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(bit_equal(params[i].tensor, same.parameters()[i].tensor));
  }
}

TEST_CASE("original branch of the dual pass equals the plain pass") {
  const ModelConfig c = small_config();
  const Tensor x = random_binary({5, 3, 2, 16, 16}, 11, 0.3);
  SnnModel m = active_model(c, x, InputMode::kTemporal);
  const Tensor plain = forward_plain(m, x, InputMode::kTemporal);
  TrrForwardOptions opt;
  const LogitsPair dual = forward_trr(m, x, opt);
  CHECK(bit_equal(plain, dual.original));
  CHECK_FALSE(bit_equal(dual.original, dual.reversed));

  const Tensor img = random_tensor({3, 2, 16, 16}, 12, 0.0f, 1.0f);
  SnnModel ms = active_model(c, img, InputMode::kStatic);
  opt.mode = InputMode::kStatic;
  for (std::size_t loc = 1; loc <= kNumStages; ++loc) {
    opt.reversal_location = loc;
    CHECK(bit_equal(forward_plain(ms, img, InputMode::kStatic),
                    forward_trr(ms, img, opt).original));
  }
}

TEST_CASE("reversal is invisible when time carries no order") {
  // Static data with a single step: the reversed branch is the original.
  const ModelConfig c1 = small_config(1);
  const Tensor img = random_tensor({2, 2, 16, 16}, 21, 0.0f, 1.0f);
  SnnModel m1 = active_model(c1, img, InputMode::kStatic);
  TrrForwardOptions opt;
  opt.mode = InputMode::kStatic;
  const LogitsPair one = forward_trr(m1, img, opt);
  CHECK(bit_equal(one.original, one.reversed));
  CHECK(consistency_loss(one.original, one.reversed, 2.0f).item() == 0.0f);

  // Palindromic temporal input: reversing it changes nothing.
  const Tensor half = random_binary({3, 2, 2, 16, 16}, 22, 0.3);
  Tensor pal({5, 2, 2, 16, 16});
  const std::size_t frame = pal.numel() / 5;
  const std::size_t src_t[5] = {0, 1, 2, 1, 0};
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t i = 0; i < frame; ++i) {
      pal.mutable_data()[t * frame + i] = half.at(src_t[t] * frame + i);
    }
  }
  SnnModel m5 = active_model(small_config(), pal, InputMode::kTemporal);
  const LogitsPair sym = forward_trr(m5, pal, TrrForwardOptions{});
  CHECK(bit_equal(sym.original, sym.reversed));
  CHECK(consistency_loss(sym.original, sym.reversed, 2.0f).item() == 0.0f);
}

TEST_CASE("three heads match an independent double-precision network") {
  const ModelConfig c = small_config();
  const Tensor x = random_binary({5, 3, 2, 16, 16}, 31, 0.3);
  SnnModel m = active_model(c, x, InputMode::kTemporal, 7);
  const LogitsPair got = forward_trr(m, x, TrrForwardOptions{});

  trr::testing::ReferenceNet ref(m);
  const auto want = ref.run_temporal(x);
  // A membrane within float rounding of the threshold could legitimately
  // spike on one path and not the other; this input keeps clear of that.
  REQUIRE(ref.min_margin() > 1e-6);
  CHECK(max_diff(got.original, want.original) < 1e-5);
  CHECK(max_diff(got.reversed, want.reversed) < 1e-5);
  CHECK(max_diff(got.hybrid, want.hybrid) < 1e-5);
}

TEST_CASE("hybridizing after the last stage squares the firing rate") {
  const ModelConfig c = small_config();
  const Tensor img = random_tensor({2, 2, 16, 16}, 41, 0.0f, 1.0f);
  SnnModel m = active_model(c, img, InputMode::kStatic);
  TrrForwardOptions opt;
  opt.mode = InputMode::kStatic;
  opt.reversal_location = kNumStages;
  ForwardTrace trace;
  const LogitsPair out = forward_trr(m, img, opt, &trace);
  REQUIRE(trace.stage_spikes.size() == kNumStages);
  const Tensor rate = firing_rate(trace.stage_spikes.back());
  const Tensor expect = m.head_from_rate(mul(rate, rate));
  for (std::size_t i = 0; i < expect.numel(); ++i) {
    CHECK(out.hybrid.at(i) == doctest::Approx(expect.at(i)).epsilon(1e-6));
  }
}

TEST_CASE("firing rates of silent and saturated networks") {
  const ModelConfig c = small_config();
  const Tensor x = random_binary({5, 2, 2, 16, 16}, 51, 0.3);
  SnnModel silent(c, 1);
  set_all(silent, ".weight", 0.0f);
  set_all(silent, ".shift", 0.0f);
  SnnModel busy(c, 1);
  set_all(busy, ".weight", 0.0f);
  set_all(busy, ".shift", 5.0f);
  for (std::size_t s = 1; s <= kNumStages; ++s) {
    CHECK(asfr(silent, x, InputMode::kTemporal, s) == 0.0);
    CHECK(asfr(busy, x, InputMode::kTemporal, s) == 1.0);
  }
  CHECK(spike_fraction(Tensor({2, 2}, std::vector<float>{1, 0, 0, 0})) == 0.25);
}

TEST_CASE("trace holds one binary train per stage") {
  ModelConfig c = small_config();
  c.check_binary = true;
  const Tensor x = random_binary({5, 2, 2, 16, 16}, 61, 0.3);
  SnnModel m = active_model(c, x, InputMode::kTemporal);
  ForwardTrace trace;
  forward_plain(m, x, InputMode::kTemporal, &trace);
  REQUIRE(trace.stage_spikes.size() == kNumStages);
  const std::size_t side[kNumStages] = {16, 8, 4, 2};
  for (std::size_t s = 0; s < kNumStages; ++s) {
    CHECK(trace.stage_spikes[s].dim(3) == side[s]);
    CHECK(is_binary(trace.stage_spikes[s]));
  }
}

TEST_CASE("contract and dimension errors") {
  const ModelConfig c = small_config();
  SnnModel m(c, 1);
  const Tensor x = random_binary({5, 1, 2, 16, 16}, 71);
  CHECK(kind_of([&] { m.run_stage(0, x); }) == ErrorKind::kContract);
  CHECK(kind_of([&] { m.run_stage(5, x); }) == ErrorKind::kContract);
  const Tensor wrong_t = random_binary({4, 1, 2, 16, 16}, 72);
  CHECK(kind_of([&] { forward_plain(m, wrong_t, InputMode::kTemporal); }) ==
        ErrorKind::kContract);
  CHECK(kind_of([&] { forward_plain(m, x, InputMode::kStatic); }) ==
        ErrorKind::kDimension);
  TrrForwardOptions opt;
  opt.mode = InputMode::kStatic;
  opt.reversal_location = 5;
  const Tensor img = random_tensor({1, 2, 16, 16}, 73, 0.0f, 1.0f);
  CHECK(kind_of([&] { forward_trr(m, img, opt); }) == ErrorKind::kContract);

  ModelConfig bad = c;
  bad.height = 12;  // not divisible by 8
  CHECK(kind_of([&] { SnnModel(bad, 1); }).has_value());
  bad = c;
  bad.lif.tau = 0.5f;
  CHECK(kind_of([&] { SnnModel(bad, 1); }) == ErrorKind::kContract);
}

TEST_CASE("calibration normalises the first layer's drive") {
  const ModelConfig c = small_config();
  const Tensor x = random_binary({5, 4, 2, 16, 16}, 81, 0.3);
  SnnModel m(c, 2);
  m.calibrate(x, InputMode::kTemporal, 0.0f, 1.0f);
  const auto params = m.parameters();
  const Tensor flat = reshape(x, {20, 2, 16, 16});
  const Tensor a = channel_affine(conv2d(flat, params[0].tensor, 1, 1),
                                  params[1].tensor, params[2].tensor);
  const std::size_t ch = a.dim(1), hw = 256;
  for (std::size_t k = 0; k < ch; ++k) {
    double s = 0.0, sq = 0.0;
    for (std::size_t n = 0; n < 20; ++n) {
      for (std::size_t i = 0; i < hw; ++i) {
        const double v = a.at((n * ch + k) * hw + i);
        s += v;
        sq += v * v;
      }
    }
    const double mean = s / (20.0 * hw);
    CHECK(std::fabs(mean) < 1e-4);
    CHECK(std::sqrt(sq / (20.0 * hw) - mean * mean) == doctest::Approx(1.0).epsilon(1e-3));
  }
  for (std::size_t s = 1; s <= kNumStages; ++s) {
    const double r = asfr(m, x, InputMode::kTemporal, s);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("end-to-end gradients of the full objective match finite differences") {
  // Ramp mode swaps the step for the ramp whose slope is the surrogate, so
  // central differences see exactly the function backward differentiates.
  // The ramp is clamped to [0,1]; a wide window keeps membranes off the
  // clamp corners, where a probe step would straddle a kink.
  ModelConfig c = small_config(3, 8);
  c.spike_mode = SpikeMode::kSurrogateRamp;
  c.lif.surrogate_width = 16.0f;
  const Tensor x = random_binary({3, 2, 2, 8, 8}, 91, 0.4);
  SnnModel m = active_model(c, x, InputMode::kTemporal, 5);
  const Labels y{3, 7};
  TrrLossWeights w;
  std::vector<Tensor> params;
  for (auto& p : m.parameters()) params.push_back(p.tensor);
  auto r = check_gradients(
      [&] {
        const LogitsPair z = forward_trr(m, x, TrrForwardOptions{});
        return reshape(trr_total_loss(z, y, w).total, {1});
      },
      params, 3e-3, 6);
  MESSAGE("checked " << r.checked << " entries, rel " << r.rel_norm);
  CHECK(r.checked > 100);
  CHECK(r.rel_norm < 1e-2);
}
