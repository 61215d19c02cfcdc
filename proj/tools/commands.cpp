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
#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "courtaug/augment.hpp"
#include "courtaug/error.hpp"
#include "courtaug/image_io.hpp"
#include "courtaug/inference.hpp"
#include "courtaug/metrics.hpp"
#include "courtaug/object_bank.hpp"
#include "courtaug/parallel.hpp"
#include "courtaug/synthgen.hpp"

namespace fs = std::filesystem;

namespace courtaug::cli {

namespace {

using Clock = std::chrono::steady_clock;

class RunManifest {
 public:
  explicit RunManifest(std::string subcommand)
      : subcommand_(std::move(subcommand)), start_(Clock::now()) {}

  Json& inputs() { return inputs_; }
  Json& outputs() { return outputs_; }
  void set_config(Json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  void write(const std::string& path) const {
    Json j{{"tool", "courtaug"},
           {"version", kVersion},
           {"subcommand", subcommand_},
           {"inputs", inputs_},
           {"outputs", outputs_},
           {"duration_seconds",
            std::chrono::duration<double>(Clock::now() - start_).count()}};
    if (!config_.is_null()) j["config"] = config_;
    if (seed_) j["seed"] = *seed_;
    write_text_file(path, j.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  Clock::time_point start_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
  Json config_;
  std::optional<std::uint64_t> seed_;
};

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, std::string(kSeedEnv) + " is not an unsigned integer");
  }
}

DatasetDoc load_valid_dataset(const std::string& path) {
  DatasetDoc doc = parse_dataset(read_text_file(path));
  const auto report = validate_dataset(doc);
  if (!report.empty()) {
    const auto& v = report.front();
    throw Error(ErrorKind::ValidationFailed,
                path + ": " + std::to_string(report.size()) + " violation(s), first: " +
                    v.rule + " on " + v.record + " " + std::to_string(v.record_id) +
                    (v.detail.empty() ? "" : " (" + v.detail + ")"));
  }
  return doc;
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, path + ": " + e.what());
  }
}

// A config file, or a run manifest from which the resolved config is taken.
AugmentConfig load_config(const std::string& path) {
  if (path.empty()) return AugmentConfig{};
  Json j = parse_json_file(path);
  if (j.is_object() && j.contains("subcommand") && j.contains("config")) {
    AugmentConfig c = config_from_json(j["config"]);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
  }
  return config_from_json(j);
}

std::string augmented_name(const ImageRecord& record) {
  const fs::path p(record.file_name);
  return p.stem().string() + "_a" + std::to_string(record.id) + ".png";
}

}  // namespace

double parse_fraction(const std::string& text) {
  double value = 0.0;
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
      const double a = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument(text);
      const double b = std::stod(den, &used);
      if (used != den.size() || b == 0.0) throw std::invalid_argument(text);
      value = a / b;
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad fraction \"" + text + "\"");
  }
  if (!(value >= 0.0 && value < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "fraction must lie in [0, 1)");
  }
  return value;
}

void cmd_synth(const SynthOptions& o) {
  RunManifest manifest("synth");
  SceneSpec spec;
  spec.width = o.width;
  spec.height = o.height;
  spec.n_persons = o.persons;
  spec.n_balls = o.balls;
  spec.occlusion_prob = o.occlusion;
  spec.seed = o.seed ? *o.seed : env_seed().value_or(0);
  if (o.images < 0) throw Error(ErrorKind::InvalidArgument, "--images must be >= 0");
  if (o.balls > 1) throw Error(ErrorKind::InvalidArgument, "--balls must be 0 or 1");
  if (!(o.occlusion >= 0.0 && o.occlusion <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "--occlusion must lie in [0, 1]");
  }
  make_dirs(o.out_dir);
  const DatasetDoc doc = generate_corpus(o.images, spec, o.out_dir);
  const fs::path dataset = fs::path(o.out_dir) / "dataset.json";
  write_text_file(dataset.string(), serialize_dataset(doc));

  manifest.set_seed(spec.seed);
  manifest.set_config({{"images", o.images},
                       {"width", o.width},
                       {"height", o.height},
                       {"persons", o.persons},
                       {"balls", o.balls},
                       {"occlusion", o.occlusion}});
  manifest.outputs() = {{"dataset", dataset.string()},
                        {"images_dir", (fs::path(o.out_dir) / "images").string()}};
  manifest.write((fs::path(o.out_dir) / "run_manifest.json").string());
}

void cmd_extract_bank(const ExtractOptions& o) {
  RunManifest manifest("extract-bank");
  const DatasetDoc doc = load_valid_dataset(o.dataset_path);
  const auto bank = extract_bank(doc, [&](const ImageRecord& r) {
    return read_png_rgb((fs::path(o.images_dir) / r.file_name).string());
  });
  save_bank(bank, o.out_dir);
  manifest.inputs() = {{"dataset", o.dataset_path}, {"images_dir", o.images_dir}};
  manifest.outputs() = {{"bank_dir", o.out_dir}, {"entries", bank.size()}};
  manifest.write((fs::path(o.out_dir) / "run_manifest.json").string());
}

void cmd_augment(const AugmentOptions& o) {
  RunManifest manifest("augment");
  AugmentConfig config = load_config(o.config_path);
  if (o.seed) {
    config.seed = *o.seed;
  } else if (auto s = env_seed()) {
    config.seed = *s;
  }
  if (o.duplication_factor) config.duplication_factor = *o.duplication_factor;
  validate_config(config);
  if (o.jobs < 1) throw Error(ErrorKind::InvalidArgument, "--jobs must be >= 1");

  const DatasetDoc doc = load_valid_dataset(o.dataset_path);
  const auto bank = load_bank(o.bank_dir);
  const CategoryRoles roles = resolve_roles(doc, config);
  const DatasetDoc dup = duplicate_dataset(doc, config.duplication_factor);

  std::map<std::int64_t, std::vector<AnnotationRecord>> by_image;
  for (const auto& a : dup.annotations) by_image[a.image_id].push_back(a);

  const fs::path images_out = fs::path(o.out_dir) / "images";
  make_dirs(images_out);

  std::vector<ImageRecord> records(dup.images.size());
  std::vector<std::vector<AnnotationRecord>> annotations(dup.images.size());
  parallel_for(dup.images.size(), o.jobs, [&](std::size_t i) {
    const ImageRecord& record = dup.images[i];
    RgbImage pixels = read_png_rgb((fs::path(o.images_dir) / record.file_name).string());
    const auto& anns = by_image[record.id];
    AugmentResult result = augment_image(make_scene(record, std::move(pixels), anns), bank,
                                         roles, config);
    ImageRecord out = result.scene.record;
    out.file_name = augmented_name(record);
    write_png_rgb((images_out / out.file_name).string(), result.scene.image);
    records[i] = std::move(out);
    annotations[i] = scene_annotations(result.scene);
  });

  DatasetDoc out;
  out.categories = dup.categories;
  out.extra = dup.extra;
  out.images = std::move(records);
  std::int64_t next_id = 1;
  for (auto& per_image : annotations) {
    for (auto& a : per_image) {
      a.id = next_id++;
      out.annotations.push_back(std::move(a));
    }
  }
  const auto report = validate_dataset(out, {.require_tight_bbox = true});
  if (!report.empty()) {
    throw Error(ErrorKind::ValidationFailed,
                "augmented dataset failed validation: " + report.front().rule);
  }
  const fs::path dataset = fs::path(o.out_dir) / "dataset.json";
  write_text_file(dataset.string(), serialize_dataset(out));

  manifest.set_config(config_to_json(config));
  manifest.set_seed(config.seed);
  manifest.inputs() = {{"dataset", o.dataset_path},
                       {"images_dir", o.images_dir},
                       {"bank_dir", o.bank_dir},
                       {"config", o.config_path},
                       {"jobs", o.jobs}};
  manifest.outputs() = {{"dataset", dataset.string()},
                        {"images_dir", images_out.string()},
                        {"images", out.images.size()},
                        {"annotations", out.annotations.size()}};
  manifest.write((fs::path(o.out_dir) / "run_manifest.json").string());
}

void cmd_crop(const CropOptions& o) {
  RunManifest manifest("crop");
  const double fraction = parse_fraction(o.fraction);
  std::vector<std::pair<std::int64_t, std::string>> images;
  if (!o.dataset_path.empty()) {
    const DatasetDoc doc = parse_dataset(read_text_file(o.dataset_path));
    for (const auto& im : doc.images) images.emplace_back(im.id, im.file_name);
  } else {
    std::error_code ec;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(o.images_dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png")
        names.push_back(entry.path().filename().string());
    }
    if (ec) throw Error(ErrorKind::IoFailure, "cannot list " + o.images_dir);
    std::sort(names.begin(), names.end());
    for (std::size_t k = 0; k < names.size(); ++k)
      images.emplace_back(static_cast<std::int64_t>(k + 1), names[k]);
  }
  make_dirs(o.out_dir);
  std::vector<CropTransform> transforms;
  for (const auto& [id, name] : images) {
    const RgbImage img = read_png_rgb((fs::path(o.images_dir) / name).string());
    auto [cropped, t] = crop_top(img, fraction);
    t.image_id = id;
    t.file_name = name;
    write_png_rgb((fs::path(o.out_dir) / name).string(), cropped);
    transforms.push_back(std::move(t));
  }
  const fs::path sidecar = fs::path(o.out_dir) / "crop_transforms.json";
  write_text_file(sidecar.string(), transforms_to_json(transforms).dump(2) + "\n");
  manifest.set_config({{"fraction", fraction}});
  manifest.inputs() = {{"images_dir", o.images_dir}, {"dataset", o.dataset_path}};
  manifest.outputs() = {{"images_dir", o.out_dir}, {"transforms", sidecar.string()}};
  manifest.write((fs::path(o.out_dir) / "run_manifest.json").string());
}

void cmd_uncrop(const UncropOptions& o) {
  RunManifest manifest("uncrop");
  const auto transforms = transforms_from_json(parse_json_file(o.transforms_path));
  const auto dets = parse_results(read_text_file(o.results_path));
  std::map<std::int64_t, const CropTransform*> by_id;
  for (const auto& t : transforms) by_id[t.image_id] = &t;
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) {
    auto it = by_id.find(dets[k].image_id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::BrokenReference, "result " + std::to_string(k) +
                                                  ": no crop transform for image " +
                                                  std::to_string(dets[k].image_id));
    }
    out.push_back(uncrop_detections({dets[k]}, *it->second).front());
  }
  write_text_file(o.out_path, serialize_results(out));
  manifest.inputs() = {{"results", o.results_path}, {"transforms", o.transforms_path}};
  manifest.outputs() = {{"results", o.out_path}, {"detections", out.size()}};
  manifest.write(o.out_path + ".manifest.json");
}

void cmd_filter(const FilterCliOptions& o) {
  RunManifest manifest("filter");
  FilterOptions options;
  options.ball_category = o.ball_category;
  options.gate.min_dim = o.min_dim;
  options.gate.max_dim = o.max_dim;
  const auto mode = parse_gate_mode(o.gate_mode);
  if (!mode) throw Error(ErrorKind::InvalidArgument, "--gate-mode must be both or either");
  options.gate.mode = *mode;
  if (o.gate_order != "before" && o.gate_order != "after") {
    throw Error(ErrorKind::InvalidArgument, "--gate-order must be before or after");
  }
  options.gate_before_selection = o.gate_order == "before";
  const auto dets = parse_results(read_text_file(o.results_path));
  const auto out = filter_results(dets, options);
  write_text_file(o.out_path, serialize_results(out));
  manifest.set_config({{"ball_category", o.ball_category},
                       {"min_dim", o.min_dim},
                       {"max_dim", o.max_dim},
                       {"gate_mode", o.gate_mode},
                       {"gate_order", o.gate_order}});
  manifest.inputs() = {{"results", o.results_path}};
  manifest.outputs() = {{"results", o.out_path},
                        {"kept", out.size()},
                        {"dropped", static_cast<std::uint64_t>(dets.size() - out.size())}};
  manifest.write(o.out_path + ".manifest.json");
}

std::string cmd_eval(const EvalOptions& o) {
  const DatasetDoc gt = parse_dataset(read_text_file(o.gt_path));
  const auto dets = parse_results(read_text_file(o.results_path));
  const EvalResult result = evaluate(gt, dets);
  if (!o.out_path.empty()) {
    write_text_file(o.out_path, eval_to_json(result).dump(2) + "\n");
    RunManifest manifest("eval");
    manifest.inputs() = {{"ground_truth", o.gt_path}, {"results", o.results_path}};
    manifest.outputs() = {{"report", o.out_path}, {"map_overall", result.map_overall}};
    manifest.write(o.out_path + ".manifest.json");
  }
  return format_eval_table(result, gt);
}

namespace {

void report_error(ErrorKind kind, const std::string& message, int code) {
  const Json j{{"error", std::string(to_string(kind))}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"courtaug: copy-paste augmentation and inference post-processing for court scenes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic court corpus");
  s->add_option("out_dir", synth.out_dir, "Output directory")->required();
  s->add_option("--images", synth.images, "Number of scenes");
  s->add_option("--seed", synth.seed, "Seed (falls back to COURTAUG_SEED, then 0)");
  s->add_option("--width", synth.width);
  s->add_option("--height", synth.height);
  s->add_option("--persons", synth.persons, "Persons per scene");
  s->add_option("--balls", synth.balls, "Balls per scene (0 or 1)");
  s->add_option("--occlusion", synth.occlusion, "Probability a person may overlap others");

  ExtractOptions extract;
  auto* e = app.add_subcommand("extract-bank", "Crop every annotated object into a patch bank");
  e->add_option("dataset", extract.dataset_path)->required();
  e->add_option("images_dir", extract.images_dir)->required();
  e->add_option("out_dir", extract.out_dir)->required();

  AugmentOptions augment;
  auto* a = app.add_subcommand("augment", "Duplicate and augment a dataset");
  a->add_option("dataset", augment.dataset_path)->required();
  a->add_option("images_dir", augment.images_dir)->required();
  a->add_option("bank_dir", augment.bank_dir)->required();
  a->add_option("config", augment.config_path, "Config JSON or a previous run manifest");
  a->add_option("-o,--out", augment.out_dir, "Output directory")->required();
  a->add_option("--seed", augment.seed);
  a->add_option("--duplication-factor", augment.duplication_factor);
  a->add_option("--jobs", augment.jobs, "Parallel workers");

  CropOptions crop;
  auto* c = app.add_subcommand("crop", "Remove the top rows of every image before inference");
  c->add_option("images_dir", crop.images_dir)->required();
  c->add_option("out_dir", crop.out_dir)->required();
  c->add_option("--fraction", crop.fraction, "Fraction of the height to remove (e.g. 1/5)");
  c->add_option("--dataset", crop.dataset_path, "Dataset supplying image ids");

  UncropOptions uncrop;
  auto* u = app.add_subcommand("uncrop", "Map detections back to the uncropped frame");
  u->add_option("results", uncrop.results_path)->required();
  u->add_option("transforms", uncrop.transforms_path)->required();
  u->add_option("out", uncrop.out_path)->required();

  FilterCliOptions filter;
  auto* f = app.add_subcommand("filter", "Max-score ball filtering of detection results");
  f->add_option("results", filter.results_path)->required();
  f->add_option("out", filter.out_path)->required();
  f->add_option("--ball-category", filter.ball_category);
  f->add_option("--min-dim", filter.min_dim);
  f->add_option("--max-dim", filter.max_dim);
  f->add_option("--gate-mode", filter.gate_mode, "both | either");
  f->add_option("--gate-order", filter.gate_order, "before | after");

  EvalOptions eval;
  auto* v = app.add_subcommand("eval", "Mask AP@[.50:.95] of results against ground truth");
  v->add_option("ground_truth", eval.gt_path)->required();
  v->add_option("results", eval.results_path)->required();
  v->add_option("--out", eval.out_path, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    report_error(ErrorKind::InvalidArgument, err.what(), kInputError);
    return kInputError;
  }

  try {
    if (s->parsed()) cmd_synth(synth);
    if (e->parsed()) cmd_extract_bank(extract);
    if (a->parsed()) cmd_augment(augment);
    if (c->parsed()) cmd_crop(crop);
    if (u->parsed()) cmd_uncrop(uncrop);
    if (f->parsed()) cmd_filter(filter);
    if (v->parsed()) std::cout << cmd_eval(eval);
  } catch (const Error& err) {
    const int code = err.is_io() ? kIoError : kInputError;
    report_error(err.kind(), err.what(), code);
    return code;
  } catch (const std::exception& err) {
    report_error(ErrorKind::IoFailure, err.what(), kIoError);
    return kIoError;
  }
  return kOk;
}

}  // namespace courtaug::cli
