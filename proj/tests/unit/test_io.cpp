#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpd/config.hpp"
#include "tpd/csv.hpp"
#include "tpd/error.hpp"
#include "tpd/model_io.hpp"
#include "tpd/pipeline.hpp"
#include "tpd/synthetic.hpp"

namespace tpd {
namespace {

namespace fs = std::filesystem;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

DataMatrix parse(const std::string& text, const RunConfig& cfg = {}) {
  std::istringstream in(text);
  return read_csv(in, cfg);
}

TEST(Csv, BasicTable) {
  const auto x = parse("a,b\n1,2\n3,4\n5,6\n");
  EXPECT_EQ(x.rows(), 3u);
  EXPECT_EQ(x.cols(), 2u);
  EXPECT_EQ(x.at(2, 1), 6.0);
  EXPECT_EQ(x.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(x.labels().has_value());
}

TEST(Csv, LabelColumnAndIndex) {
  RunConfig cfg;
  cfg.index_column = "Timestamp";
  const auto x = parse("Timestamp,FIT101, LIT101,Normal/Attack\r\n"
                       "t0,1.5,2,Normal\r\n\"t,1\",1.6,2,Attack\r\n",
                       cfg);
  EXPECT_EQ(x.cols(), 2u);
  EXPECT_EQ(x.names(), (std::vector<std::string>{"FIT101", "LIT101"}));
  ASSERT_TRUE(x.labels().has_value());
  EXPECT_EQ(*x.labels(), (std::vector<Label>{Label::Normal, Label::Anomaly}));
  EXPECT_EQ(x.index_values(), (std::vector<std::string>{"t0", "t,1"}));
}

TEST(Csv, Errors) {
  EXPECT_EQ(kind_of([] { parse(""); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { parse("a,b\n1,x\n"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { parse("a,b\n1,2,3\n"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { parse("a,b\n1,nan\n"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { parse("label\n1\n"); }), ErrorKind::InvalidInput);
  try {
    parse("a,b\n1,2\n3,oops\n");
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find('b'), std::string::npos) << msg;
  }
  EXPECT_EQ(kind_of([] { load_csv("/nonexistent/file.csv"); }), ErrorKind::InvalidInput);
}

TEST(Csv, ParseLabel) {
  EXPECT_EQ(parse_label("Normal"), Label::Normal);
  EXPECT_EQ(parse_label("attack"), Label::Anomaly);
  EXPECT_EQ(parse_label("-1"), Label::Anomaly);
  EXPECT_EQ(parse_label("1"), Label::Normal);
  EXPECT_THROW(parse_label("maybe"), Error);
}

TEST(Csv, RoundTrip) {
  AnomalySpec spec;
  spec.rate = 0.1;
  auto x = generate_synthetic(300, 2, 3, spec, 5).data;
  std::vector<std::string> idx;
  for (std::size_t i = 0; i < x.rows(); ++i) idx.push_back("r" + std::to_string(i));
  x.set_index("timestamp", idx);
  std::stringstream buf;
  write_csv(x, buf);
  const auto y = read_csv(buf);
  ASSERT_EQ(y.rows(), x.rows());
  ASSERT_EQ(y.names(), x.names());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(y.at(i, j), x.at(i, j));
  }
  EXPECT_EQ(y.labels(), x.labels());
  EXPECT_EQ(y.index_values(), idx);
}

TEST(Csv, RoundTripReproducesTraining) {
  AnomalySpec spec;
  spec.glitch_rate = 0.01;
  const auto x = generate_synthetic(1500, 3, 4, spec, 6).data;
  std::stringstream buf;
  write_csv(x, buf);
  const auto y = read_csv(buf);
  EXPECT_EQ(serialize_model(train_tpd(x, RunConfig{})), serialize_model(train_tpd(y, RunConfig{})));
}

TEST(Config, JsonRoundTripAndValidation) {
  RunConfig cfg;
  cfg.contamination = 0.2;
  cfg.combiner = CombinerMode::And;
  cfg.window = {12, 0.5};
  cfg.kind_overrides = {{"p1", FeatureKind::Discrete}};
  cfg.label_column = "y";
  cfg.seed = 99;
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
  EXPECT_EQ(config_from_json("{}"), RunConfig{});
  EXPECT_EQ(kind_of([] { config_from_json(R"({"contamination": 0.7})"); }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { config_from_json(R"({"bogus": 1})"); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { config_from_json(R"({"combiner": "xor"})"); }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { config_from_json("{not json"); }), ErrorKind::InvalidConfig);
}

class ModelFile : public ::testing::Test {
 protected:
  void SetUp() override {
    AnomalySpec glitches;
    glitches.glitch_rate = 0.01;
    train_ = generate_synthetic(2000, 3, 5, glitches, 21);
    AnomalySpec runs;
    runs.rate = 0.1;
    test_ = generate_synthetic(1500, 3, 5, runs, 22);
    model_ = train_tpd(train_.data, RunConfig{});
    dir_ = fs::temp_directory_path() /
           ("tpd_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  SyntheticData train_;
  SyntheticData test_;
  TpdModel model_;
  fs::path dir_;
};

TEST_F(ModelFile, RoundTripPredictsIdentically) {
  const auto path = dir_ / "m.tpd";
  save_model(model_, path);
  const auto loaded = load_model(path);
  const auto a = predict_tpd(model_, test_.data);
  const auto b = predict_tpd(loaded, test_.data);
  EXPECT_EQ(a.final_labels, b.final_labels);
  EXPECT_EQ(a.combined, b.combined);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    EXPECT_EQ(a.discrete->scores.total(i), b.discrete->scores.total(i));
    EXPECT_EQ(a.continuous->scores.total(i), b.continuous->scores.total(i));
  }
  EXPECT_EQ(loaded.config, model_.config);
  EXPECT_EQ(loaded.schema.names, model_.schema.names);
  EXPECT_EQ(loaded.continuous->bands.upper, model_.continuous->bands.upper);
  EXPECT_EQ(loaded.discrete->model.threshold, model_.discrete->model.threshold);
  EXPECT_EQ(serialize_model(loaded), serialize_model(model_));
}

TEST_F(ModelFile, TruncatedIsCorrupt) {
  const auto bytes = serialize_model(model_);
  for (std::size_t keep : {std::size_t{0}, std::size_t{7}, std::size_t{20}, bytes.size() / 2,
                           bytes.size() - 1}) {
    EXPECT_EQ(kind_of([&] { deserialize_model(bytes.substr(0, keep)); }),
              ErrorKind::CorruptModel)
        << keep;
  }
}

TEST_F(ModelFile, BumpedVersionIsCorrupt) {
  auto bytes = serialize_model(model_);
  const std::uint32_t v = kModelFormatVersion + 1;
  for (int k = 0; k < 4; ++k) bytes[8 + k] = static_cast<char>((v >> (8 * k)) & 0xff);
  try {
    deserialize_model(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CorruptModel);
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST_F(ModelFile, FlippedPayloadByteIsCorrupt) {
  auto bytes = serialize_model(model_);
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_EQ(kind_of([&] { deserialize_model(bytes); }), ErrorKind::CorruptModel);
}

TEST_F(ModelFile, MissingFileIsInvalidInput) {
  EXPECT_EQ(kind_of([&] { load_model(dir_ / "absent.tpd"); }), ErrorKind::InvalidInput);
}

TEST(Synthetic, Deterministic) {
  AnomalySpec spec;
  spec.rate = 0.05;
  spec.glitch_rate = 0.01;
  const auto a = generate_synthetic(800, 3, 6, spec, 42);
  const auto b = generate_synthetic(800, 3, 6, spec, 42);
  const auto c = generate_synthetic(800, 3, 6, spec, 43);
  std::stringstream sa, sb, sc;
  write_csv(a.data, sa);
  write_csv(b.data, sb);
  write_csv(c.data, sc);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
  EXPECT_EQ(a.truth, b.truth);
}

TEST(Synthetic, ZeroRateIsAllNormal) {
  const auto s = generate_synthetic(500, 2, 4, {}, 1);
  EXPECT_TRUE(s.runs.empty());
  for (auto l : s.truth) EXPECT_EQ(l, Label::Normal);
  EXPECT_EQ(s.data.names().front(), "s0");
  EXPECT_EQ(s.data.names().back(), "a1");
}

TEST(Synthetic, PlantedRunLabelledAndShifted) {
  AnomalySpec spec;
  spec.rate = 0.06;
  spec.min_run = 60;
  spec.max_run = 60;
  spec.shift_sigma = 8.0;
  const auto s = generate_synthetic(1000, 2, 4, spec, 8);
  ASSERT_EQ(s.runs.size(), 1u);
  const auto [begin, end] = s.runs[0];
  EXPECT_EQ(end - begin, 60u);
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    EXPECT_EQ(s.truth[i], (i >= begin && i < end) ? Label::Anomaly : Label::Normal);
  }
  // At least one sensor's run mean sits far from its normal mean.
  bool shifted = false;
  for (std::size_t j = 0; j < 4; ++j) {
    double in = 0.0, out = 0.0, out2 = 0.0;
    std::size_t n_out = 0;
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
      const double v = s.data.at(i, j);
      if (i >= begin && i < end) {
        in += v;
      } else {
        out += v;
        out2 += v * v;
        ++n_out;
      }
    }
    const double mu = out / static_cast<double>(n_out);
    const double sd = std::sqrt(out2 / static_cast<double>(n_out) - mu * mu);
    shifted = shifted || std::abs(in / 60.0 - mu) > 6.0 * sd;
  }
  EXPECT_TRUE(shifted);
}

}  // namespace
}  // namespace tpd
