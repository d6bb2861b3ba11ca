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

#include <algorithm>

#include "support.hpp"
#include "trr/temporal.hpp"

using namespace trr;
using trr::testing::bit_equal;
using trr::testing::check_gradients;
using trr::testing::kind_of;
using trr::testing::random_binary;
using trr::testing::random_tensor;

namespace {

std::vector<std::vector<float>> frames(const Tensor& x) {
  const std::size_t per = x.numel() / x.dim(0);
  std::vector<std::vector<float>> out;
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    out.emplace_back(x.data().begin() + t * per, x.data().begin() + (t + 1) * per);
  }
  return out;
}

}  // namespace

TEST_CASE("reverse puts frame T-1-t at t") {
  Tensor x({3, 2}, {1, 2, 3, 4, 5, 6});  // frames A, B, C
  Tensor r = temporal_reverse(x);
  CHECK(frames(r) == std::vector<std::vector<float>>{{5, 6}, {3, 4}, {1, 2}});
  Tensor single = random_tensor({1, 4}, 1);
  CHECK(bit_equal(temporal_reverse(single), single));
}

TEST_CASE("reverse is an involution and keeps firing rates") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Tensor x = random_binary({5, 2, 3, 2, 2}, seed, 0.3);
    CHECK(bit_equal(temporal_reverse(temporal_reverse(x)), x));
    CHECK(bit_equal(firing_rate(temporal_reverse(x)), firing_rate(x)));
  }
}

TEST_CASE("reverse and shuffle gradients route through the permutation") {
  Tensor x = random_tensor({4, 3, 2}, 2);
  CHECK(check_gradients([&] { return temporal_reverse(x); }, {x}).max_abs < 1e-3);
  CHECK(check_gradients([&] { return temporal_shuffle(x, 7); }, {x}).max_abs < 1e-3);
}

TEST_CASE("shuffle permutes frames deterministically") {
  Tensor single = random_tensor({1, 5}, 3);
  CHECK(bit_equal(temporal_shuffle(single, 11), single));
  Tensor x = random_tensor({6, 4}, 4);
  Tensor s = temporal_shuffle(x, 12);
  auto a = frames(x), b = frames(s);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(bit_equal(s, temporal_shuffle(x, 12)));
  CHECK(shuffle_permutation(6, 12) == shuffle_permutation(6, 12));
  Tensor spikes = random_binary({5, 3, 3}, 5);
  CHECK(bit_equal(firing_rate(temporal_shuffle(spikes, 13)), firing_rate(spikes)));
  // A different seed eventually produces a different order.
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) {
    differs = shuffle_permutation(6, seed) != shuffle_permutation(6, 12);
  }
  CHECK(differs);
}

TEST_CASE("firing rate") {
  Tensor x({5, 1}, {1, 0, 1, 0, 1});
  CHECK(firing_rate(x).item() == doctest::Approx(0.6f));
  Tensor ones({5, 3}, 1.0f);
  const Tensor rate = firing_rate(ones);
  for (float v : rate.data()) CHECK(v == 1.0f);
  const std::vector<float> allowed{0.0f, 0.2f, 0.4f, 0.6f, 0.8f, 1.0f};
  const Tensor rates = firing_rate(random_binary({5, 400}, 6));
  for (float v : rates.data()) {
    CHECK(std::find(allowed.begin(), allowed.end(), v) != allowed.end());
  }
  Tensor y = random_tensor({5, 2, 3}, 7);
  CHECK(check_gradients([&] { return firing_rate(y); }, {y}).max_abs < 1e-3);
}

TEST_CASE("star hybridization multiplies firing rates") {
  Tensor a({5, 1}, {1, 0, 1, 0, 1});
  Tensor b({5, 1}, {0, 1, 1, 1, 0});
  CHECK(star_hybridize(a, b).item() == doctest::Approx(0.36f));
  Tensor x = random_binary({4, 2, 3}, 8);
  const Tensor zero = star_hybridize(x, Tensor({4, 2, 3}, 0.0f));
  for (float v : zero.data()) CHECK(v == 0.0f);
  CHECK(bit_equal(star_hybridize(x, Tensor({4, 2, 3}, 1.0f)), firing_rate(x)));
  // Both operands are permutations of the same spikes: the rate squared.
  Tensor rate = firing_rate(x);
  CHECK(bit_equal(star_hybridize(x, temporal_reverse(x)), mul(rate, rate)));
  CHECK(kind_of([&] { star_hybridize(x, Tensor({4, 3, 2})); }) == ErrorKind::kDimension);
  Tensor p = random_tensor({3, 2, 2}, 9, 0.0f, 1.0f), q = random_tensor({3, 2, 2}, 10, 0.0f, 1.0f);
  CHECK(check_gradients([&] { return star_hybridize(p, q); }, {p, q}).max_abs < 1e-3);
}

TEST_CASE("binary star only keeps coincident spikes") {
  CHECK(binary_star(Tensor({1}, 1.0f), Tensor({1}, 1.0f)).item() == 1.0f);
  CHECK(binary_star(Tensor({1}, 1.0f), Tensor({1}, 0.0f)).item() == 0.0f);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Tensor a = random_binary({2, 8, 8}, 2 * seed), b = random_binary({2, 8, 8}, 2 * seed + 1);
    auto ones = [](const Tensor& t) { return std::count(t.data().begin(), t.data().end(), 1.0f); };
    CHECK(ones(binary_star(a, b)) <= std::min(ones(a), ones(b)));
  }
  CHECK(kind_of([] { binary_star(Tensor({2}, 0.5f), Tensor({2}, 1.0f)); }) ==
        ErrorKind::kContract);
}

TEST_CASE("implicit dimension count enumerates quadratic terms") {
  for (std::int64_t d = 1; d <= 8; ++d) {
    std::uint64_t pairs = 0;
    for (std::int64_t i = 0; i <= d; ++i)
      for (std::int64_t j = i; j <= d; ++j) ++pairs;
    CHECK(implicit_dim_count(d) == pairs);
  }
  CHECK(implicit_dim_count(1) == 3);
  CHECK(implicit_dim_count(2) == 6);
  CHECK(implicit_dim_count(4) == 15);
  CHECK(kind_of([] { implicit_dim_count(0); }) == ErrorKind::kContract);
}
