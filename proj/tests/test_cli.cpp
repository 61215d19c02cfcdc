// Copyright 2026 The CourtAug Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "courtaug/coco_io.hpp"
#include "courtaug/image_io.hpp"
#include "courtaug/inference.hpp"
#include "test_util.hpp"

namespace courtaug {
namespace {

namespace fs = std::filesystem;
using testing_util::rect_mask;
using testing_util::TempDir;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const fs::path out = dir.path() / "stdout.txt", err = dir.path() / "stderr.txt";
  const std::string cmd = std::string("\"") + COURTAUG_BINARY + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = dir_.path() / "corpus";
    const auto r = run_cli(dir_, "synth " + q(corpus_) +
                                     " --images 3 --seed 5 --width 200 --height 150 --persons 3");
    ASSERT_EQ(r.code, 0) << r.err;
    bank_ = dir_.path() / "bank";
    const auto b = run_cli(dir_, "extract-bank " + q(corpus_ / "dataset.json") + " " +
                                     q(corpus_ / "images") + " " + q(bank_));
    ASSERT_EQ(b.code, 0) << b.err;
  }

  TempDir dir_{"cli"};
  fs::path corpus_;
  fs::path bank_;
};

TEST_F(CliTest, SynthIsDeterministic) {
  const DatasetDoc doc = parse_dataset(read_text_file((corpus_ / "dataset.json").string()));
  EXPECT_EQ(doc.images.size(), 3u);
  const auto again = dir_.path() / "again";
  ASSERT_EQ(run_cli(dir_, "synth " + q(again) +
                              " --images 3 --seed 5 --width 200 --height 150 --persons 3")
                .code,
            0);
  EXPECT_EQ(slurp(corpus_ / "dataset.json"), slurp(again / "dataset.json"));
  for (const auto& im : doc.images)
    EXPECT_EQ(slurp(corpus_ / "images" / im.file_name), slurp(again / "images" / im.file_name));
  const Json manifest = Json::parse(slurp(corpus_ / "run_manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "synth");
  EXPECT_EQ(manifest["seed"], 5);
}

TEST_F(CliTest, SynthSeedFromEnvironment) {
  ::setenv("COURTAUG_SEED", "5", 1);
  const auto env = dir_.path() / "env";
  const auto r = run_cli(dir_, "synth " + q(env) + " --images 3 --width 200 --height 150 --persons 3");
  ::unsetenv("COURTAUG_SEED");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(corpus_ / "dataset.json"), slurp(env / "dataset.json"));
}

TEST_F(CliTest, ExtractBankCardinality) {
  const DatasetDoc doc = parse_dataset(read_text_file((corpus_ / "dataset.json").string()));
  const Json manifest = Json::parse(slurp(bank_ / "manifest.json"));
  EXPECT_EQ(manifest["entries"].size(), doc.annotations.size());
}

TEST_F(CliTest, ExtractBankMissingImage) {
  const DatasetDoc doc = parse_dataset(read_text_file((corpus_ / "dataset.json").string()));
  fs::remove(corpus_ / "images" / doc.images[1].file_name);
  const auto r = run_cli(dir_, "extract-bank " + q(corpus_ / "dataset.json") + " " +
                                   q(corpus_ / "images") + " " + q(dir_.path() / "bank2"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find(doc.images[1].file_name), std::string::npos) << r.err;
  const Json err = Json::parse(r.err);
  EXPECT_EQ(err["error"], "ImageLoadFailure");
}

TEST_F(CliTest, AugmentDeterministicAcrossJobs) {
  const std::string base = "augment " + q(corpus_ / "dataset.json") + " " + q(corpus_ / "images") +
                           " " + q(bank_) + " --seed 11 --duplication-factor 2 -o ";
  const auto a = run_cli(dir_, base + q(dir_.path() / "a1") + " --jobs 1");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run_cli(dir_, base + q(dir_.path() / "a8") + " --jobs 8");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir_.path() / "a1" / "dataset.json"), slurp(dir_.path() / "a8" / "dataset.json"));
  const DatasetDoc out = parse_dataset(read_text_file((dir_.path() / "a1" / "dataset.json").string()));
  EXPECT_EQ(out.images.size(), 6u);
  EXPECT_TRUE(validate_dataset(out, {.require_tight_bbox = true}).empty());
  for (const auto& im : out.images) {
    EXPECT_EQ(slurp(dir_.path() / "a1" / "images" / im.file_name),
              slurp(dir_.path() / "a8" / "images" / im.file_name));
  }
}

TEST_F(CliTest, AugmentRerunFromManifest) {
  const std::string base = "augment " + q(corpus_ / "dataset.json") + " " + q(corpus_ / "images") +
                           " " + q(bank_);
  ASSERT_EQ(run_cli(dir_, base + " --seed 4 --duplication-factor 1 -o " + q(dir_.path() / "m1")).code, 0);
  const auto r = run_cli(dir_, base + " " + q(dir_.path() / "m1" / "run_manifest.json") + " -o " +
                                   q(dir_.path() / "m2"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_.path() / "m1" / "dataset.json"), slurp(dir_.path() / "m2" / "dataset.json"));
  const Json manifest = Json::parse(slurp(dir_.path() / "m2" / "run_manifest.json"));
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_EQ(manifest["config"]["duplication_factor"], 1);
}

TEST_F(CliTest, AugmentEmptyBank) {
  const auto empty = dir_.path() / "empty_bank";
  fs::create_directories(empty);
  std::ofstream(empty / "manifest.json") << R"({"version":1,"entries":[]})";
  const auto r = run_cli(dir_, "augment " + q(corpus_ / "dataset.json") + " " +
                                   q(corpus_ / "images") + " " + q(empty) + " -o " +
                                   q(dir_.path() / "x"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.err)["error"], "EmptyBank");
}

TEST_F(CliTest, AugmentRejectsBadConfig) {
  const auto cfg = dir_.path() / "bad.json";
  std::ofstream(cfg) << R"({"pure_ball_prob": 2.0})";
  const auto r = run_cli(dir_, "augment " + q(corpus_ / "dataset.json") + " " +
                                   q(corpus_ / "images") + " " + q(bank_) + " " + q(cfg) + " -o " +
                                   q(dir_.path() / "x"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.err)["error"], "ConfigError");
}

TEST_F(CliTest, CropAndUncrop) {
  const DatasetDoc doc = parse_dataset(read_text_file((corpus_ / "dataset.json").string()));
  const auto zero = run_cli(dir_, "crop " + q(corpus_ / "images") + " " + q(dir_.path() / "c0") +
                                      " --fraction 0");
  ASSERT_EQ(zero.code, 0) << zero.err;
  for (const auto& im : doc.images)
    EXPECT_TRUE(read_png_rgb((dir_.path() / "c0" / im.file_name).string()) ==
                read_png_rgb((corpus_ / "images" / im.file_name).string()));
  const auto fifth = run_cli(dir_, "crop " + q(corpus_ / "images") + " " + q(dir_.path() / "c5") +
                                       " --fraction 1/5 --dataset " + q(corpus_ / "dataset.json"));
  ASSERT_EQ(fifth.code, 0) << fifth.err;
  EXPECT_EQ(read_png_rgb((dir_.path() / "c5" / doc.images[0].file_name).string()).height(), 120);
  const auto ts = transforms_from_json(Json::parse(slurp(dir_.path() / "c5" / "crop_transforms.json")));
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts[0].top_offset, 30);
  EXPECT_EQ(ts[0].image_id, doc.images[0].id);

  Detection d;
  d.image_id = doc.images[0].id;
  d.category_id = 2;
  d.score = 0.9;
  d.mask = rle_encode(rect_mask(200, 120, 10, 0, 20, 10));
  d.bbox = {10, 0, 10, 10};
  write_text_file((dir_.path() / "cropped.json").string(), serialize_results({d}));
  const auto un = run_cli(dir_, "uncrop " + q(dir_.path() / "cropped.json") + " " +
                                    q(dir_.path() / "c5" / "crop_transforms.json") + " " +
                                    q(dir_.path() / "full.json"));
  ASSERT_EQ(un.code, 0) << un.err;
  const auto full = parse_results(read_text_file((dir_.path() / "full.json").string()));
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].bbox[1], 30);
  EXPECT_EQ(*full[0].mask, rle_encode(rect_mask(200, 150, 10, 30, 20, 40)));

  const auto missing = run_cli(dir_, "uncrop " + q(dir_.path() / "cropped.json") + " " +
                                         q(dir_.path() / "nope.json") + " " +
                                         q(dir_.path() / "full2.json"));
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(run_cli(dir_, "crop " + q(corpus_ / "images") + " " + q(dir_.path() / "cx") +
                              " --fraction 1.5")
                .code,
            2);
}

TEST_F(CliTest, Filter) {
  auto ball = [](std::int64_t image, double score, double x) {
    Detection d;
    d.image_id = image;
    d.category_id = 2;
    d.score = score;
    d.bbox = {x, x, 20, 20};
    return d;
  };
  const std::vector<Detection> one_per_image{ball(1, 0.3, 0), ball(2, 0.9, 50)};
  write_text_file((dir_.path() / "r1.json").string(), serialize_results(one_per_image));
  ASSERT_EQ(run_cli(dir_, "filter " + q(dir_.path() / "r1.json") + " " + q(dir_.path() / "f1.json")).code, 0);
  EXPECT_EQ(parse_results(read_text_file((dir_.path() / "f1.json").string())), one_per_image);

  const std::vector<Detection> fixture{ball(1, 0.9, 100), ball(1, 0.5, 110), ball(1, 0.4, 300)};
  write_text_file((dir_.path() / "r3.json").string(), serialize_results(fixture));
  ASSERT_EQ(run_cli(dir_, "filter " + q(dir_.path() / "r3.json") + " " + q(dir_.path() / "f3.json")).code, 0);
  EXPECT_EQ(parse_results(read_text_file((dir_.path() / "f3.json").string())).size(), 2u);

  write_text_file((dir_.path() / "r0.json").string(), "[]");
  ASSERT_EQ(run_cli(dir_, "filter " + q(dir_.path() / "r0.json") + " " + q(dir_.path() / "f0.json")).code, 0);
  EXPECT_TRUE(parse_results(read_text_file((dir_.path() / "f0.json").string())).empty());

  EXPECT_EQ(run_cli(dir_, "filter " + q(dir_.path() / "r0.json") + " " + q(dir_.path() / "f.json") +
                              " --gate-mode sometimes")
                .code,
            2);
}

TEST_F(CliTest, EvalEchoAndErrors) {
  const DatasetDoc doc = parse_dataset(read_text_file((corpus_ / "dataset.json").string()));
  std::vector<Detection> echo;
  for (const auto& a : doc.annotations) {
    Detection d;
    d.image_id = a.image_id;
    d.category_id = a.category_id;
    d.score = 1.0;
    d.bbox = a.bbox;
    d.mask = std::get<Rle>(a.segmentation);
    echo.push_back(d);
  }
  write_text_file((dir_.path() / "echo.json").string(), serialize_results(echo));
  const auto r = run_cli(dir_, "eval " + q(corpus_ / "dataset.json") + " " + q(dir_.path() / "echo.json") +
                                   " --out " + q(dir_.path() / "report.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mAP@[.50:.95] 1.000"), std::string::npos) << r.out;
  EXPECT_EQ(Json::parse(slurp(dir_.path() / "report.json"))["map_overall"], 1.0);

  echo[0].image_id = 999;
  write_text_file((dir_.path() / "broken.json").string(), serialize_results(echo));
  const auto b = run_cli(dir_, "eval " + q(corpus_ / "dataset.json") + " " + q(dir_.path() / "broken.json"));
  EXPECT_EQ(b.code, 2);
  EXPECT_EQ(Json::parse(b.err)["error"], "BrokenReference");
}

TEST_F(CliTest, EvalSixTenthsFixture) {
  DatasetDoc doc;
  doc.images = {{1, "a.png", 20, 20, Json::object()}};
  doc.categories = {{1, "human", Json::object()}};
  AnnotationRecord a;
  a.id = 1;
  a.image_id = 1;
  a.category_id = 1;
  a.segmentation = rle_encode(rect_mask(20, 20, 0, 0, 10, 10));
  a.bbox = {0, 0, 10, 10};
  a.area = 100;
  doc.annotations = {a};
  Detection d;
  d.image_id = 1;
  d.category_id = 1;
  d.score = 0.8;
  d.mask = rle_encode(rect_mask(20, 20, 0, 0, 10, 6));
  d.bbox = {0, 0, 10, 6};
  write_text_file((dir_.path() / "gt.json").string(), serialize_dataset(doc));
  write_text_file((dir_.path() / "dt.json").string(), serialize_results({d}));
  const auto r = run_cli(dir_, "eval " + q(dir_.path() / "gt.json") + " " + q(dir_.path() / "dt.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mAP@[.50:.95] 0.300"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrors) {
  const auto none = run_cli(dir_, "");
  EXPECT_EQ(none.code, 2);
  EXPECT_NO_THROW(Json::parse(none.err));
  EXPECT_EQ(run_cli(dir_, "--help").code, 0);
  EXPECT_EQ(run_cli(dir_, "eval " + q(dir_.path() / "missing.json") + " " + q(dir_.path() / "x.json")).code, 3);
  write_text_file((dir_.path() / "garbage.json").string(), "{not json");
  EXPECT_EQ(run_cli(dir_, "eval " + q(dir_.path() / "garbage.json") + " " + q(dir_.path() / "garbage.json")).code, 2);
}

}  // namespace
}  // namespace courtaug
