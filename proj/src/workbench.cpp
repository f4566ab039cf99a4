// Copyright 2026 The Binaural Workbench Authors
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

#include "bw/workbench.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bw/error.hpp"
#include "bw/io.hpp"
#include "bw/metrics.hpp"
#include "bw/pipeline.hpp"
#include "bw/rng.hpp"
#include "bw/wav.hpp"

namespace bw {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<double> read_mono(const fs::path& p, int rate) {
  Audio a = read_wav(p, rate);
  if (a.num_channels() != 1) {
    throw Error("expected a mono wav: " + p.string() + " has " +
                std::to_string(a.num_channels()) + " channels");
  }
  return std::move(a.channels[0]);
}

void write_audio(const fs::path& p, std::vector<std::vector<double>> ch,
                 int rate) {
  Audio a;
  a.sample_rate = rate;
  a.channels = std::move(ch);
  write_wav(p, a, SampleFormat::kFloat32);
}

ComplexPlane crop_frames(const ComplexPlane& p, Eigen::Index frames) {
  return p.leftCols(frames);
}

}  // namespace

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  jobs = std::clamp(jobs, 1, count);
  std::vector<std::exception_ptr> errors(count);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::mutex mu;
    int next = 0;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (;;) {
          int i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= count) return;
            i = next++;
          }
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<fs::path> expand_wav_pool(const std::vector<fs::path>& entries) {
  std::vector<fs::path> out;
  for (const auto& e : entries) {
    if (fs::is_directory(e)) {
      std::vector<fs::path> found;
      for (const auto& f : fs::directory_iterator(e)) {
        if (f.is_regular_file() && f.path().extension() == ".wav") {
          found.push_back(f.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(e)) {
      out.push_back(e);
    } else {
      throw IoError("wav pool entry not found: " + e.string());
    }
  }
  return out;
}

std::string scene_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%05d", index);
  return buf;
}

nlohmann::json to_json(const StftConfig& cfg) {
  return {{"sample_rate", cfg.sample_rate},
          {"frame_len", cfg.frame_len},
          {"hop", cfg.hop},
          {"window", "sqrt-hann"}};
}

StftConfig stft_from_json(const nlohmann::json& j) {
  StftConfig cfg;
  cfg.sample_rate = j.at("sample_rate").get<int>();
  cfg.frame_len = j.at("frame_len").get<int>();
  cfg.hop = j.at("hop").get<int>();
  if (j.value("window", std::string("sqrt-hann")) != "sqrt-hann") {
    throw Error("unsupported window in manifest");
  }
  cfg.validate();
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed json in " + path.string() + ": " + e.what());
  }
}

void write_run_manifest(const fs::path& out_dir, const std::string& subcommand,
                        const nlohmann::json& config,
                        const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs) {
  nlohmann::json in = nlohmann::json::object(), out = nlohmann::json::object();
  for (const auto& p : inputs) in[p.generic_string()] = file_fingerprint(p);
  for (const auto& p : outputs) {
    out[p.generic_string()] = file_fingerprint(out_dir / p);
  }
  write_json(out_dir / "run.json", {{"schema_version", kSchemaVersion},
                                    {"tool", "bwb"},
                                    {"tool_version", kToolVersion},
                                    {"subcommand", subcommand},
                                    {"config", config},
                                    {"inputs", in},
                                    {"outputs", out}});
}

std::vector<std::string> simulate_dataset(const SimulateOptions& o) {
  o.ranges.validate();
  o.stft.validate();
  require(o.count >= 0, "simulate: count must be non-negative");
  require(!o.out_dir.empty(), "simulate: output directory required");
  const auto speech_files = expand_wav_pool(o.speech_pool);
  const auto noise_files = expand_wav_pool(o.noise_pool);
  if (!o.synthetic) {
    if (speech_files.empty()) throw Error("empty WAV pool: no speech files");
    if (noise_files.empty() && o.ranges.max_noises > 0) {
      throw Error("empty WAV pool: no noise files");
    }
  }
  require(o.synthetic_seconds > 0, "simulate: synthetic duration must be > 0");
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw IoError("cannot create " + o.out_dir.string() + ": " + ec.message());
  if (o.count == 0) return {};

  const int fs_hz = o.stft.sample_rate;
  std::vector<std::vector<double>> speech_pool, noise_pool;
  for (const auto& p : speech_files) speech_pool.push_back(read_mono(p, fs_hz));
  for (const auto& p : noise_files) noise_pool.push_back(read_mono(p, fs_hz));

  std::vector<std::string> ids(o.count);
  parallel_for(o.count, o.jobs, [&](int i) {
    const std::uint64_t scene_seed = derive_seed(o.seed, i);
    SceneSpec spec = sample_scene(scene_seed, o.ranges);
    Rng pick(derive_seed(scene_seed, 101));
    std::vector<double> speech;
    std::vector<std::vector<double>> noises;
    const auto synth_len =
        static_cast<std::size_t>(o.synthetic_seconds * fs_hz);
    if (o.synthetic) {
      speech = synthetic_speech(derive_seed(scene_seed, 202), synth_len, fs_hz);
      spec.target.wav = "synthetic:speech";
      for (std::size_t k = 0; k < spec.noises.size(); ++k) {
        noises.push_back(
            synthetic_noise(derive_seed(scene_seed, 300 + k), synth_len, fs_hz));
        spec.noises[k].wav = "synthetic:noise";
      }
    } else {
      const int s = pick.integer(0, static_cast<int>(speech_pool.size()) - 1);
      speech = speech_pool[s];
      spec.target.wav = speech_files[s].generic_string();
      for (auto& n : spec.noises) {
        const int k = pick.integer(0, static_cast<int>(noise_pool.size()) - 1);
        noises.push_back(noise_pool[k]);
        n.wav = noise_files[k].generic_string();
      }
    }
    const int order =
        o.max_order < 0 ? default_max_order(spec.room.reflection) : o.max_order;
    const SceneRealization r =
        realize_scene(spec, speech, noises, o.stft, order);
    const std::string id = scene_id(i);
    const fs::path dir = o.out_dir / id;
    write_audio(dir / "capture.wav", r.mix.capture, fs_hz);
    write_audio(dir / "clean_image.wav", r.mix.clean_image, fs_hz);
    write_audio(dir / "noise_image.wav", r.mix.noise_image, fs_hz);
    write_audio(dir / "speech.wav", {speech}, fs_hz);
    write_audio(dir / "target.wav", r.target.to_time(), fs_hz);
    nlohmann::json files = {{"capture", "capture.wav"},
                            {"clean_image", "clean_image.wav"},
                            {"noise_image", "noise_image.wav"},
                            {"speech", "speech.wav"},
                            {"target", "target.wav"}};
    if (o.export_rirs) {
      write_audio(dir / "rirs_target.wav", r.rirs.source_column(0), fs_hz);
      files["rirs_target"] = "rirs_target.wav";
    }
    nlohmann::json prints = nlohmann::json::object();
    for (const auto& [key, name] : files.items()) {
      prints[name.get<std::string>()] =
          file_fingerprint(dir / name.get<std::string>());
    }
    write_json(dir / "manifest.json",
               {{"schema_version", kSchemaVersion},
                {"scene_id", id},
                {"stft", to_json(o.stft)},
                {"max_image_order", order},
                {"noise_gain", r.mix.noise_gain},
                {"scene", to_json(spec)},
                {"files", files},
                {"fingerprints", prints}});
    ids[i] = id;
  });

  std::vector<fs::path> outputs;
  for (const auto& id : ids) outputs.push_back(fs::path(id) / "manifest.json");
  nlohmann::json speech_json = nlohmann::json::array(),
                 noise_json = nlohmann::json::array();
  for (const auto& p : speech_files) speech_json.push_back(p.generic_string());
  for (const auto& p : noise_files) noise_json.push_back(p.generic_string());
  std::vector<fs::path> inputs = speech_files;
  inputs.insert(inputs.end(), noise_files.begin(), noise_files.end());
  write_run_manifest(o.out_dir, "simulate",
                     {{"count", o.count},
                      {"seed", o.seed},
                      {"ranges", to_json(o.ranges)},
                      {"stft", to_json(o.stft)},
                      {"synthetic", o.synthetic},
                      {"synthetic_seconds", o.synthetic_seconds},
                      {"max_order", o.max_order},
                      {"export_rirs", o.export_rirs},
                      {"speech_pool", speech_json},
                      {"noise_pool", noise_json}},
                     inputs, outputs);
  return ids;
}

SceneFiles load_scene(const fs::path& manifest_path) {
  if (!fs::is_regular_file(manifest_path)) {
    throw IoError("manifest not found: " + manifest_path.string());
  }
  SceneFiles s;
  s.manifest = read_json(manifest_path);
  try {
    if (s.manifest.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error("unsupported manifest schema_version in " +
                  manifest_path.string());
    }
    s.id = s.manifest.at("scene_id").get<std::string>();
    s.stft = stft_from_json(s.manifest.at("stft"));
    s.max_order = s.manifest.value("max_image_order", -1);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  s.spec = scene_from_json(s.manifest.at("scene"));
  s.dir = manifest_path.parent_path();
  return s;
}

std::vector<fs::path> dataset_manifests(const fs::path& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) {
    throw IoError("dataset directory not found: " + dataset_dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dataset_dir)) {
    if (e.is_directory() && fs::is_regular_file(e.path() / "manifest.json")) {
      out.push_back(e.path() / "manifest.json");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "lbh-mvdr") return BaselineMethod::kLbhMvdr;
  if (name == "mif") return BaselineMethod::kMif;
  throw Error("unknown baseline method '" + name + "' (lbh-mvdr, mif)");
}

std::string to_string(BaselineMethod m) {
  return m == BaselineMethod::kLbhMvdr ? "lbh-mvdr" : "mif";
}

nlohmann::json evaluate_files(const fs::path& est_wav, const fs::path& ref_wav,
                              const StftConfig& cfg) {
  Audio est = read_wav(est_wav, cfg.sample_rate);
  Audio ref = read_wav(ref_wav, cfg.sample_rate);
  if (est.num_channels() != 2 || ref.num_channels() != 2) {
    throw Error("evaluate: estimate and target must be stereo wavs");
  }
  const std::size_t len = std::min(est.num_samples(), ref.num_samples());
  for (auto* a : {&est, &ref}) {
    for (auto& c : a->channels) c.resize(len);
  }
  const auto e = BinauralSpectrogram::from_time(est.channels[0], est.channels[1], cfg);
  const auto t = BinauralSpectrogram::from_time(ref.channels[0], ref.channels[1], cfg);
  return to_json(evaluate_binaural(e, t));
}

nlohmann::json run_baseline(const fs::path& manifest_path, const fs::path& out_dir,
                            const BaselineOptions& options) {
  const SceneFiles sf = load_scene(manifest_path);
  const int rate = sf.stft.sample_rate;
  const std::string files_capture = sf.manifest.at("files").at("capture");
  Audio capture = read_wav(sf.dir / files_capture, rate);
  if (capture.num_channels() != sf.spec.array.num_mics()) {
    throw Error("capture channel count does not match the scene array");
  }
  BinauralSpectrogram est;
  if (options.method == BaselineMethod::kLbhMvdr) {
    const std::string noise_file = sf.manifest.at("files").at("noise_image");
    Audio noise = read_wav(sf.dir / noise_file, rate);
    est = run_lbh_mvdr(sf.spec, capture.channels, noise.channels, sf.stft);
  } else {
    est = run_mif(sf.spec, capture.channels, sf.stft, options.mif, sf.max_order);
  }
  const fs::path dir = out_dir / sf.id;
  write_audio(dir / "estimate.wav", est.to_time(), rate);
  const std::string target_file = sf.manifest.at("files").at("target");
  nlohmann::json report = {
      {"schema_version", kSchemaVersion},
      {"scene_id", sf.id},
      {"method", to_string(options.method)},
      {"seed", sf.spec.seed},
      {"snr_db", sf.spec.snr_db},
      {"azimuth_deg", sf.spec.target.azimuth_deg},
      {"metrics", evaluate_files(dir / "estimate.wav", sf.dir / target_file, sf.stft)}};
  write_json(dir / "metrics.json", report);
  return report;
}

std::vector<nlohmann::json> run_baseline_dataset(const fs::path& dataset_dir,
                                                 const fs::path& out_dir,
                                                 const BaselineOptions& options) {
  const auto manifests = dataset_manifests(dataset_dir);
  std::vector<nlohmann::json> reports(manifests.size());
  parallel_for(static_cast<int>(manifests.size()), options.jobs, [&](int i) {
    reports[i] = run_baseline(manifests[i], out_dir, options);
  });
  std::vector<fs::path> outputs;
  for (const auto& r : reports) {
    const std::string id = r.at("scene_id");
    outputs.push_back(fs::path(id) / "estimate.wav");
    outputs.push_back(fs::path(id) / "metrics.json");
  }
  write_run_manifest(out_dir, "baseline",
                     {{"method", to_string(options.method)},
                      {"dataset", dataset_dir.generic_string()},
                      {"mif_rir_len", options.mif.rir_len},
                      {"mif_filter_len", options.mif.filter_len},
                      {"mif_delay", options.mif.delay}},
                     manifests, outputs);
  return reports;
}

int snr_bucket(double snr_db) {
  int best = 0;
  for (int b : {0, 10, 20, 30}) {
    if (std::abs(snr_db - b) < std::abs(snr_db - best)) best = b;
  }
  return best;
}

nlohmann::json evaluate_dirs(const fs::path& est_dir, const fs::path& ref_dir,
                             const fs::path& out_dir, int jobs) {
  if (!fs::is_directory(est_dir)) {
    throw IoError("estimate directory not found: " + est_dir.string());
  }
  const auto manifests = dataset_manifests(ref_dir);
  std::vector<SceneFiles> scenes;
  std::vector<fs::path> est_files;
  std::vector<std::string> missing, extra;
  std::map<std::string, bool> known;
  for (const auto& m : manifests) {
    SceneFiles sf = load_scene(m);
    known[sf.id] = true;
    fs::path e = est_dir / sf.id / "estimate.wav";
    if (!fs::is_regular_file(e)) e = est_dir / sf.id / "target.wav";
    if (!fs::is_regular_file(e)) {
      missing.push_back(sf.id);
      continue;
    }
    est_files.push_back(e);
    scenes.push_back(std::move(sf));
  }
  for (const auto& e : fs::directory_iterator(est_dir)) {
    if (!e.is_directory()) continue;
    const std::string id = e.path().filename().string();
    const bool has_audio = fs::is_regular_file(e.path() / "estimate.wav") ||
                           fs::is_regular_file(e.path() / "target.wav");
    if (has_audio && !known.count(id)) extra.push_back(id);
  }
  std::sort(extra.begin(), extra.end());
  if (!missing.empty() || !extra.empty()) {
    std::ostringstream msg;
    msg << "unmatched scene ids:";
    for (const auto& id : missing) msg << " " << id << " (no estimate)";
    for (const auto& id : extra) msg << " " << id << " (no reference)";
    throw Error(msg.str());
  }
  std::vector<nlohmann::json> metrics(scenes.size());
  parallel_for(static_cast<int>(scenes.size()), jobs, [&](int i) {
    const std::string target = scenes[i].manifest.at("files").at("target");
    metrics[i] = evaluate_files(est_files[i], scenes[i].dir / target, scenes[i].stft);
  });

  const char* keys[3] = {"delta_itd_ms", "delta_ild_db", "sd_db"};
  std::ostringstream csv;
  csv << "scene_id,snr_db,snr_bucket,azimuth_deg,delta_itd_ms,delta_ild_db,sd_db\n";
  std::map<int, std::pair<int, std::array<double, 3>>> buckets;
  std::array<double, 3> total{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& s = scenes[i];
    const int b = snr_bucket(s.spec.snr_db);
    csv << s.id << "," << fmt_double(s.spec.snr_db) << "," << b << ","
        << fmt_double(s.spec.target.azimuth_deg);
    auto& [count, sums] = buckets[b];
    ++count;
    for (int k = 0; k < 3; ++k) {
      const double v = metrics[i].at(keys[k]).get<double>();
      csv << "," << fmt_double(v);
      sums[k] += v;
      total[k] += v;
    }
    csv << "\n";
  }
  auto means = [&](const std::array<double, 3>& sums, int count) {
    nlohmann::json j = nlohmann::json::object();
    for (int k = 0; k < 3; ++k) j[keys[k]] = count > 0 ? sums[k] / count : 0.0;
    return j;
  };
  nlohmann::json by_bucket = nlohmann::json::object();
  for (const auto& [b, cs] : buckets) {
    by_bucket[std::to_string(b)] = {{"count", cs.first},
                                    {"mean", means(cs.second, cs.first)}};
  }
  const int n = static_cast<int>(scenes.size());
  nlohmann::json summary = {{"schema_version", kSchemaVersion},
                            {"count", n},
                            {"mean", means(total, n)},
                            {"by_snr_bucket", by_bucket}};
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  write_file_atomic(out_dir / "metrics.csv", csv.str());
  write_json(out_dir / "summary.json", summary);
  return summary;
}

TrainResult run_train_toy(const fs::path& manifest_path, const fs::path& out_dir,
                          const TrainToyOptions& options) {
  const SceneFiles sf = load_scene(manifest_path);
  const StftConfig& cfg = sf.stft;
  const auto& files = sf.manifest.at("files");
  TrainingScene scene;
  std::vector<fs::path> inputs{manifest_path};
  if (options.transfer_domain) {
    const fs::path speech = sf.dir / files.at("speech").get<std::string>();
    inputs.push_back(speech);
    scene = transfer_domain_scene(sf.spec, read_mono(speech, cfg.sample_rate), cfg);
  } else {
    const fs::path cap = sf.dir / files.at("capture").get<std::string>();
    const fs::path tgt = sf.dir / files.at("target").get<std::string>();
    inputs.push_back(cap);
    inputs.push_back(tgt);
    Audio capture = read_wav(cap, cfg.sample_rate);
    Audio target = read_wav(tgt, cfg.sample_rate);
    if (target.num_channels() != 2) throw Error("target wav must be stereo");
    auto x = MultiChannelSpectrogram::from_signals(capture.channels, cfg);
    auto y = BinauralSpectrogram::from_time(target.channels[0], target.channels[1], cfg);
    const Eigen::Index frames = std::min<Eigen::Index>(x.num_frames(), y.num_frames());
    std::vector<ComplexPlane> ch;
    for (const auto& c : x.channels()) ch.push_back(crop_frames(c, frames));
    scene.capture = MultiChannelSpectrogram(std::move(ch), cfg);
    scene.target = {crop_frames(y.left, frames), crop_frames(y.right, frames), cfg};
  }
  const TrainResult r = train({scene}, options.train);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  write_json(out_dir / "filters.json", to_json(r.filters));
  std::ostringstream csv;
  csv << "epoch,loss,best_loss,lr\n";
  for (const auto& e : r.curve) {
    csv << e.epoch << "," << fmt_double(e.loss) << "," << fmt_double(e.best)
        << "," << fmt_double(e.lr) << "\n";
  }
  write_file_atomic(out_dir / "loss_curve.csv", csv.str());
  write_json(out_dir / "metrics.json",
             {{"schema_version", kSchemaVersion},
              {"scene_id", sf.id},
              {"epochs_run", static_cast<int>(r.curve.size())},
              {"initial_loss", r.initial_loss},
              {"final_loss", r.final_loss},
              {"stop_reason", r.stop_reason},
              {"input_gain", r.input_gain},
              {"metrics", to_json(r.metrics)}});
  const auto& t = options.train;
  write_run_manifest(
      out_dir, "train-toy",
      {{"manifest", manifest_path.generic_string()},
       {"transfer_domain", options.transfer_domain},
       {"weights", {t.weights.ri, t.weights.mag, t.weights.mwild}},
       {"ild_variant",
        t.loss.ild_variant == IldLossVariant::kSignedMean ? "signed-mean" : "per-bin"},
       {"ild_eps", t.loss.ild_eps},
       {"mag_eps", t.loss.mag_eps},
       {"initial_lr", t.schedule.initial_lr},
       {"patience", t.schedule.patience},
       {"max_halvings", t.schedule.max_halvings},
       {"max_epochs", t.max_epochs},
       {"time_varying", t.time_varying},
       {"normalize_input", t.normalize_input},
       {"adam", {t.adam.beta1, t.adam.beta2, t.adam.eps}}},
      inputs, {"filters.json", "loss_curve.csv", "metrics.json"});
  return r;
}

}  // namespace bw
