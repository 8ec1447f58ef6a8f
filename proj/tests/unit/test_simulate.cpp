#include <doctest.h>

#include <numeric>

#include "specdep/errors.hpp"
#include "specdep/inference.hpp"
#include "specdep/json_io.hpp"
#include "specdep/measures.hpp"
#include "specdep/simulate.hpp"
#include "support.hpp"

using namespace specdep;

TEST_CASE("philox known answer") {
  // Random123 reference vector: counter 0, key 0.
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  // All ones counter and key.
  const auto ones = Philox4x32::generate({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  Philox4x32 eng(0);
  CHECK(eng() == 0x6627e8d5u);
}

TEST_CASE("normal stream moments") {
  NormalStream rng(2024);
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 4e-3);
  CHECK(std::abs(sq / n - 1.0) < 1e-2);
}

TEST_CASE("white noise is reproducible from its seed") {
  CHECK(white_noise(3, 16, 2, 9) == white_noise(3, 16, 2, 9));
  CHECK_FALSE(white_noise(3, 16, 2, 9) == white_noise(3, 16, 2, 10));
}

TEST_CASE("white noise lagged measure stays near its null scale") {
  const auto s = white_noise(64, 64, 2, 31);
  const auto spectra = accumulate_all(dft(s));
  std::vector<double> lagged;
  for (const auto& sp : spectra) lagged.push_back(linear_dependence(sp, BlockPartition::singletons(2)).measures.lagged);
  std::nth_element(lagged.begin(), lagged.begin() + lagged.size() / 2, lagged.end());
  // chi-square(1) median is 0.4549.
  CHECK(lagged[lagged.size() / 2] < 3.0 * 0.4549 / (2.0 * 63.0));
}

TEST_CASE("simulation config validation") {
  SimulationConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.mixing_d = Eigen::MatrixXd::Ones(2, 3);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.noise_sd = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.allow_zero_noise = true;
  CHECK_NOTHROW(cfg.validate());
  cfg = {};
  cfg.source.type = SourceSpec::Type::ar_pair;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);  // needs r = 2
  cfg.mixing_c = Eigen::MatrixXd::Ones(1, 2);
  cfg.mixing_d = Eigen::MatrixXd::Ones(1, 2);
  cfg.source.lag = 2;
  cfg.source.coupling = 0.5;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("volume conduction: shape, partition, determinism, zero mixing") {
  SimulationConfig cfg;
  cfg.n_segments = 20;
  cfg.n_samples = 32;
  cfg.mixing_c = Eigen::MatrixXd::Ones(2, 1);
  cfg.mixing_d = Eigen::MatrixXd::Ones(3, 1);
  const auto rec = volume_conduction(cfg);
  CHECK(rec.segments.n_channels() == 5);
  CHECK(rec.partition == BlockPartition({{0, 1}, {2, 3, 4}}));
  CHECK(rec.partition.names() == std::vector<std::string>{"X", "Y"});
  CHECK(rec.segments.channel_names()[2] == "y0");
  CHECK(volume_conduction(cfg).segments == rec.segments);

  cfg.mixing_c.setZero();
  cfg.mixing_d.setZero();
  cfg.n_segments = 200;
  cfg.n_samples = 64;
  cfg.mixing_c = Eigen::MatrixXd::Zero(1, 1);
  cfg.mixing_d = Eigen::MatrixXd::Zero(1, 1);
  const auto null = volume_conduction(cfg);
  int rejections = 0, tests = 0;
  for (const auto& sp : accumulate_all(dft(null.segments))) {
    const auto r = linear_dependence(sp, null.partition);
    for (const auto& t : test_dependence(r, 64, 200, Scale::calibrated_2nrm1)) {
      rejections += t.p_value < 0.05;
      ++tests;
    }
  }
  CHECK(static_cast<double>(rejections) / tests < 0.15);
}

TEST_CASE("lagged coupling: phase of pi kills the lagged part at that bin") {
  // Lag 4 at N_T = 16 rotates bin 2 by exactly pi: the cross-spectrum there is real.
  const auto s = lagged_coupling(200, 16, 4, 1.0, 0.1, 3);
  const auto e = dft(s);
  const auto singles = BlockPartition::singletons(2);
  const auto sign_flip = linear_dependence(accumulate(e, 2), singles);
  const auto quarter = linear_dependence(accumulate(e, 1), singles);
  const auto t2 = test_dependence(sign_flip, 16, 200, Scale::calibrated_2nrm1);
  CHECK(t2[0].p_value < 1e-6);
  // The pure shift gives a real cross-spectrum apart from edge effects at the segment head.
  CHECK(sign_flip.measures.lagged < 0.1 * quarter.measures.lagged);

  const auto white = lagged_coupling(4, 16, 3, 0.0, 1.0, 8);
  CHECK(white.n_channels() == 2);
  CHECK_THROWS_AS(lagged_coupling(4, 16, 16, 1.0, 1.0, 8), ConfigError);
}

TEST_CASE("parseval oracle") {
  // Pure cosine at bin 3, unit amplitude, in every channel.
  std::vector<double> data(2 * 32 * 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t t = 0; t < 32; ++t)
      for (std::size_t m = 0; m < 2; ++m)
        data[(j * 32 + t) * 2 + m] = std::cos(2.0 * std::numbers::pi * 3.0 * t / 32.0 + 0.3 * m);
  const SegmentSet tone(2, 32, 2, data);
  CHECK(parseval_oracle(tone, 3).max_rel_err < 1e-9);

  const SegmentSet zero(2, 16, 3, std::vector<double>(96, 0.0));
  const auto z = parseval_oracle(zero, 2);
  CHECK(z.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.lhs.cwiseAbs().maxCoeff() == 0.0);

  const auto r = white_noise(8, 64, 3, 77);
  for (int w = 1; w < 32; ++w) {
    CHECK(parseval_oracle(r, w).max_rel_err < 1e-8);
    CHECK(parseval_oracle(r, BlockPartition({{0}, {1, 2}}), w).max_rel_err < 1e-8);
  }
  CHECK_THROWS_AS(parseval_oracle(r, 32), RangeError);
  CHECK_THROWS_AS(parseval_oracle(r, 0), RangeError);
}

TEST_CASE("simulation config json round trip") {
  SimulationConfig cfg;
  cfg.mixing_c = Eigen::MatrixXd::Constant(2, 1, 0.5);
  cfg.mixing_d = Eigen::MatrixXd::Constant(1, 1, 2.0);
  cfg.seed = 99;
  const auto back = simulation_config_from_json(to_json(cfg));
  CHECK(back.mixing_c == cfg.mixing_c);
  CHECK(back.mixing_d == cfg.mixing_d);
  CHECK(back.seed == 99);
  CHECK_THROWS_AS(simulation_config_from_json(nlohmann::json{{"mixing_C", "x"}}), ConfigError);
  CHECK_THROWS_AS(simulation_config_from_json(nlohmann::json{{"source", {{"type", "pink"}}}}), ConfigError);
}
