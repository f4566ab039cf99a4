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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bw/error.hpp"
#include "bw/gradcheck.hpp"
#include "bw/io.hpp"
#include "bw/workbench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

int fail(int code, const std::string& message) {
  const nlohmann::json j = {{"error", code == kExitIo ? "io" : "validation"},
                            {"code", code},
                            {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

void add_range(CLI::App* app, const std::string& name, bw::Range& r,
               const std::string& unit) {
  app->add_option("--" + name + "-min", r.min, name + " lower bound (" + unit + ")")
      ->capture_default_str();
  app->add_option("--" + name + "-max", r.max, name + " upper bound (" + unit + ")")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bwb: binaural speech enhancement workbench"};
  app.set_version_flag("--version", std::string(bw::kToolVersion));
  app.require_subcommand(1);

  // simulate
  bw::SimulateOptions sim;
  std::string sim_out = env_or("BWB_OUT_DIR", "");
  std::vector<std::string> speech, noise;
  if (auto d = env_or("BWB_SPEECH_DIR", ""); !d.empty()) speech.push_back(d);
  if (auto d = env_or("BWB_NOISE_DIR", ""); !d.empty()) noise.push_back(d);
  std::string ranges_file;
  auto* simulate = app.add_subcommand("simulate", "Generate a simulated scene dataset");
  simulate->add_option("--count", sim.count, "Number of scenes")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Dataset seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory (env BWB_OUT_DIR)");
  simulate->add_option("--jobs", sim.jobs, "Parallel scenes")->capture_default_str();
  simulate->add_option("--speech", speech, "Speech WAV files or directories (env BWB_SPEECH_DIR)");
  simulate->add_option("--noise", noise, "Noise WAV files or directories (env BWB_NOISE_DIR)");
  simulate->add_flag("--synthetic", sim.synthetic, "Use generated speech and noise instead of WAV pools");
  simulate->add_option("--seconds", sim.synthetic_seconds, "Length of synthetic material")
      ->capture_default_str();
  simulate->add_option("--max-order", sim.max_order, "Image-method order (-1: from RT60)")
      ->capture_default_str();
  simulate->add_flag("--export-rirs", sim.export_rirs, "Also write the target RIRs");
  simulate->add_option("--ranges", ranges_file, "JSON file with sampling ranges");
  add_range(simulate, "snr", sim.ranges.snr_db, "dB");
  add_range(simulate, "rt60", sim.ranges.rt60, "s");
  add_range(simulate, "azimuth", sim.ranges.target_azimuth, "deg");
  add_range(simulate, "distance", sim.ranges.target_distance, "m");
  simulate->add_option("--min-noises", sim.ranges.min_noises)->capture_default_str();
  simulate->add_option("--max-noises", sim.ranges.max_noises)->capture_default_str();

  // baseline
  bw::BaselineOptions base;
  std::string method = "lbh-mvdr", base_manifest, base_dataset;
  std::string base_out = env_or("BWB_OUT_DIR", "");
  auto* baseline = app.add_subcommand("baseline", "Run a classical baseline");
  baseline->add_option("--method", method, "lbh-mvdr or mif")->capture_default_str();
  auto* m_opt = baseline->add_option("--manifest", base_manifest, "Scene manifest.json");
  auto* d_opt = baseline->add_option("--dataset", base_dataset, "Dataset directory");
  m_opt->excludes(d_opt);
  baseline->add_option("--out", base_out, "Output directory (env BWB_OUT_DIR)");
  baseline->add_option("--jobs", base.jobs)->capture_default_str();
  baseline->add_option("--mif-rir-len", base.mif.rir_len)->capture_default_str();
  baseline->add_option("--mif-filter-len", base.mif.filter_len, "-1: automatic")
      ->capture_default_str();
  baseline->add_option("--mif-delay", base.mif.delay, "-1: filter_len/2")
      ->capture_default_str();

  // evaluate
  std::string est_dir, ref_dir, est_wav, ref_wav, eval_manifest, csv_path;
  std::string eval_out = env_or("BWB_OUT_DIR", "");
  int eval_jobs = 1;
  auto* evaluate = app.add_subcommand("evaluate", "Compute dITD, dILD and SD");
  evaluate->add_option("--est-dir", est_dir, "Directory of <scene_id>/estimate.wav");
  evaluate->add_option("--ref-dir", ref_dir, "Dataset directory with targets");
  evaluate->add_option("--est-wav", est_wav, "Single stereo estimate");
  evaluate->add_option("--ref-wav", ref_wav, "Single stereo target");
  evaluate->add_option("--manifest", eval_manifest, "Scene manifest supplying the target");
  evaluate->add_option("--csv", csv_path, "Also write a one-row CSV (single-pair mode)");
  evaluate->add_option("--out", eval_out, "Output directory (env BWB_OUT_DIR)");
  evaluate->add_option("--jobs", eval_jobs)->capture_default_str();

  // train-toy
  bw::TrainToyOptions toy;
  std::string toy_manifest, toy_out = env_or("BWB_OUT_DIR", ""), variant = "signed-mean";
  std::vector<double> weights{1.0, 1.0, 3.0};
  auto* train = app.add_subcommand("train-toy", "Fit per-bin binaural filters on one scene");
  train->add_option("--manifest", toy_manifest, "Scene manifest.json")->required();
  train->add_option("--out", toy_out, "Output directory (env BWB_OUT_DIR)");
  train->add_option("--epochs", toy.train.max_epochs, "Epoch cap")->capture_default_str();
  train->add_option("--weights", weights, "RI, Mag and mwILD weights")->expected(3);
  train->add_option("--ild-variant", variant, "signed-mean or per-bin")->capture_default_str();
  train->add_option("--lr", toy.train.schedule.initial_lr)->capture_default_str();
  train->add_option("--patience", toy.train.schedule.patience)->capture_default_str();
  train->add_option("--max-halvings", toy.train.schedule.max_halvings)->capture_default_str();
  train->add_flag("--time-varying", toy.train.time_varying, "One filter per frame");
  train->add_flag("--transfer-domain", toy.transfer_domain,
                  "Build the noise-free capture in the STFT domain from speech.wav");

  // gradcheck
  std::uint64_t gc_seed = 7;
  int gc_bins = 8, gc_frames = 8;
  double gc_step = 1e-6, gc_tol = 1e-5;
  std::string gc_out;
  auto* gradcheck = app.add_subcommand("gradcheck", "Check loss gradients against finite differences");
  gradcheck->add_option("--seed", gc_seed)->capture_default_str();
  gradcheck->add_option("--bins", gc_bins)->capture_default_str();
  gradcheck->add_option("--frames", gc_frames)->capture_default_str();
  gradcheck->add_option("--step", gc_step)->capture_default_str();
  gradcheck->add_option("--tol", gc_tol)->capture_default_str();
  gradcheck->add_option("--out", gc_out, "Optional directory for gradcheck.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(kExitValidation, e.what());
  }

  try {
    if (simulate->parsed()) {
      bw::require(!sim_out.empty(), "simulate: --out is required");
      if (!ranges_file.empty()) {
        sim.ranges = bw::ranges_from_json(bw::read_json(ranges_file));
      }
      sim.out_dir = sim_out;
      sim.speech_pool.assign(speech.begin(), speech.end());
      sim.noise_pool.assign(noise.begin(), noise.end());
      const auto ids = bw::simulate_dataset(sim);
      std::cout << "simulated " << ids.size() << " scenes into " << sim_out << "\n";
    } else if (baseline->parsed()) {
      bw::require(!base_out.empty(), "baseline: --out is required");
      base.method = bw::parse_baseline_method(method);
      if (!base_manifest.empty()) {
        const auto r = bw::run_baseline(base_manifest, base_out, base);
        std::cout << r.dump(2) << "\n";
      } else {
        bw::require(!base_dataset.empty(), "baseline: --manifest or --dataset is required");
        const auto rs = bw::run_baseline_dataset(base_dataset, base_out, base);
        std::cout << method << ": " << rs.size() << " scenes written to " << base_out << "\n";
      }
    } else if (evaluate->parsed()) {
      if (!est_dir.empty() || !ref_dir.empty()) {
        bw::require(!est_dir.empty() && !ref_dir.empty(),
                    "evaluate: --est-dir and --ref-dir go together");
        bw::require(!eval_out.empty(), "evaluate: --out is required");
        const auto s = bw::evaluate_dirs(est_dir, ref_dir, eval_out, eval_jobs);
        std::cout << s.dump(2) << "\n";
      } else {
        bw::require(!est_wav.empty(), "evaluate: --est-wav or --est-dir is required");
        bw::StftConfig cfg;
        std::string id = "pair";
        if (!eval_manifest.empty()) {
          const auto sf = bw::load_scene(eval_manifest);
          cfg = sf.stft;
          id = sf.id;
          if (ref_wav.empty()) {
            ref_wav = (sf.dir / sf.manifest.at("files").at("target").get<std::string>()).string();
          }
        }
        bw::require(!ref_wav.empty(), "evaluate: --ref-wav or --manifest is required");
        const auto m = bw::evaluate_files(est_wav, ref_wav, cfg);
        const nlohmann::json report = {{"schema_version", bw::kSchemaVersion},
                                       {"scene_id", id},
                                       {"estimate", est_wav},
                                       {"target", ref_wav},
                                       {"metrics", m}};
        if (!eval_out.empty()) {
          std::filesystem::create_directories(eval_out);
          bw::write_json(std::filesystem::path(eval_out) / "metrics.json", report);
        }
        if (!csv_path.empty()) {
          char row[256];
          std::snprintf(row, sizeof(row), "%s,%.10g,%.10g,%.10g\n", id.c_str(),
                        m.at("delta_itd_ms").get<double>(),
                        m.at("delta_ild_db").get<double>(), m.at("sd_db").get<double>());
          bw::write_file_atomic(csv_path,
                                std::string("scene_id,delta_itd_ms,delta_ild_db,sd_db\n") + row);
        }
        std::cout << report.dump(2) << "\n";
      }
    } else if (train->parsed()) {
      bw::require(!toy_out.empty(), "train-toy: --out is required");
      toy.train.weights = {weights[0], weights[1], weights[2]};
      toy.train.weights.validate();
      if (variant == "signed-mean") {
        toy.train.loss.ild_variant = bw::IldLossVariant::kSignedMean;
      } else if (variant == "per-bin") {
        toy.train.loss.ild_variant = bw::IldLossVariant::kPerBinAbsolute;
      } else {
        throw bw::Error("unknown --ild-variant '" + variant + "' (signed-mean, per-bin)");
      }
      bw::require(toy.train.max_epochs >= 0, "train-toy: --epochs must be >= 0");
      const auto r = bw::run_train_toy(toy_manifest, toy_out, toy);
      std::cout << "epochs " << r.curve.size() << ", loss " << r.initial_loss << " -> "
                << r.final_loss << " (" << r.stop_reason << ")\n"
                << bw::to_json(r.metrics).dump(2) << "\n";
    } else if (gradcheck->parsed()) {
      const auto g = bw::run_gradcheck(gc_seed, gc_bins, gc_frames, gc_step);
      std::printf("ri        max_rel_err %.3e\n", g.ri);
      std::printf("mag       max_rel_err %.3e\n", g.mag);
      std::printf("mwild     max_rel_err %.3e\n", g.mwild);
      std::printf("composite max_rel_err %.3e\n", g.composite);
      const bool ok = g.worst() < gc_tol;
      if (!gc_out.empty()) {
        std::filesystem::create_directories(gc_out);
        bw::write_json(std::filesystem::path(gc_out) / "gradcheck.json",
                       {{"schema_version", bw::kSchemaVersion},
                        {"seed", gc_seed},
                        {"tolerance", gc_tol},
                        {"ri", g.ri},
                        {"mag", g.mag},
                        {"mwild", g.mwild},
                        {"composite", g.composite},
                        {"pass", ok}});
      }
      if (!ok) return fail(kExitValidation, "gradient error above tolerance");
    }
  } catch (const bw::IoError& e) {
    return fail(kExitIo, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kExitIo, e.what());
  } catch (const std::exception& e) {
    return fail(kExitValidation, e.what());
  }
  return kExitOk;
}
