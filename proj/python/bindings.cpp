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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "bw/baselines.hpp"
#include "bw/error.hpp"
#include "bw/gradcheck.hpp"
#include "bw/hrtf.hpp"
#include "bw/losses.hpp"
#include "bw/metrics.hpp"
#include "bw/pipeline.hpp"
#include "bw/scene.hpp"
#include "bw/signal.hpp"
#include "bw/trainer.hpp"
#include "bw/workbench.hpp"

namespace py = pybind11;
using namespace bw;

namespace {

BinauralSpectrogram pair(const ComplexPlane& l, const ComplexPlane& r,
                         const StftConfig& cfg) {
  return {l, r, cfg};
}

IldLossVariant parse_variant(const std::string& v) {
  if (v == "signed-mean") return IldLossVariant::kSignedMean;
  if (v == "per-bin") return IldLossVariant::kPerBinAbsolute;
  throw Error("unknown ild variant '" + v + "'");
}

py::dict loss_dict(const LossValue& v) {
  py::dict d;
  d["value"] = v.value;
  d["grad_left"] = v.grad.left;
  d["grad_right"] = v.grad.right;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Binaural speech enhancement workbench core";
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  static py::exception<Error> bw_error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const Error& e) {
      py::set_error(bw_error, e.what());
    }
  });
  m.attr("__version__") = kToolVersion;

  py::class_<StftConfig>(m, "StftConfig")
      .def(py::init([](int sample_rate, int frame_len, int hop) {
             StftConfig c;
             c.sample_rate = sample_rate;
             c.frame_len = frame_len;
             c.hop = hop;
             c.validate();
             return c;
           }),
           py::arg("sample_rate") = 16000, py::arg("frame_len") = 320,
           py::arg("hop") = 160)
      .def_readonly("sample_rate", &StftConfig::sample_rate)
      .def_readonly("frame_len", &StftConfig::frame_len)
      .def_readonly("hop", &StftConfig::hop)
      .def_property_readonly("num_bins", &StftConfig::num_bins)
      .def("num_frames", &StftConfig::num_frames)
      .def("interior", &StftConfig::interior);

  m.def("stft", [](const std::vector<double>& x, const StftConfig& cfg) {
    return stft(x, cfg);
  }, py::arg("signal"), py::arg("config") = StftConfig{});
  m.def("istft", &istft, py::arg("spec"), py::arg("config") = StftConfig{});

  m.def("sample_scene", [](std::uint64_t seed) { return to_json(sample_scene(seed)).dump(); },
        py::arg("seed"), "Scene spec as a JSON string");
  m.def("validate_scene", [](const std::string& scene_json) {
    return validate_scene(scene_from_json(nlohmann::json::parse(scene_json)));
  });
  m.def("image_method_rir",
        [](std::array<double, 3> dims, double rt60, std::array<double, 3> src,
           std::array<double, 3> mic, int max_order, double fs) {
          RoomSpec room;
          room.length = dims[0];
          room.width = dims[1];
          room.height = dims[2];
          room.rt60 = rt60;
          room.reflection = rt60 > 0 ? rt60_to_reflection(rt60, room) : 0.0;
          if (max_order < 0) max_order = default_max_order(room.reflection);
          return image_method_rir(room, {src[0], src[1], src[2]},
                                  {mic[0], mic[1], mic[2]}, max_order, fs);
        },
        py::arg("room"), py::arg("rt60"), py::arg("source"), py::arg("mic"),
        py::arg("max_order") = -1, py::arg("sample_rate") = 16000.0);

  m.def("woodworth_itd", [](double az) { return woodworth_itd(az); });
  m.def("render_binaural",
        [](const std::vector<double>& x, double az, const StftConfig& cfg) {
          return render_binaural(x, az, cfg).to_time();
        },
        py::arg("signal"), py::arg("azimuth_deg"), py::arg("config") = StftConfig{},
        "Stereo [left, right] time signals");

  m.def("measure_itd",
        [](const std::vector<double>& l, const std::vector<double>& r, int fs) {
          return measure_itd(l, r, fs);
        },
        py::arg("left"), py::arg("right"), py::arg("sample_rate") = 16000);
  m.def("measure_ild",
        [](const std::vector<double>& l, const std::vector<double>& r,
           const StftConfig& cfg) {
          return measure_ild(BinauralSpectrogram::from_time(l, r, cfg));
        },
        py::arg("left"), py::arg("right"), py::arg("config") = StftConfig{});
  m.def("evaluate",
        [](const std::vector<double>& el, const std::vector<double>& er,
           const std::vector<double>& tl, const std::vector<double>& tr,
           const StftConfig& cfg) {
          const auto r = evaluate_binaural(BinauralSpectrogram::from_time(el, er, cfg),
                                           BinauralSpectrogram::from_time(tl, tr, cfg));
          return py::dict(py::arg("delta_itd_ms") = r.delta_itd_ms,
                          py::arg("delta_ild_db") = r.delta_ild_db,
                          py::arg("sd_db") = r.sd_db);
        },
        py::arg("est_left"), py::arg("est_right"), py::arg("tgt_left"),
        py::arg("tgt_right"), py::arg("config") = StftConfig{});

  m.def("ild", [](const ComplexPlane& l, const ComplexPlane& r, double eps) {
    return ild(pair(l, r, {}), eps);
  }, py::arg("left"), py::arg("right"), py::arg("eps") = 1e-8);
  m.def("loss_ri", [](const ComplexPlane& el, const ComplexPlane& er,
                      const ComplexPlane& tl, const ComplexPlane& tr) {
    return loss_dict(loss_ri(pair(el, er, {}), pair(tl, tr, {})));
  });
  m.def("loss_mag", [](const ComplexPlane& el, const ComplexPlane& er,
                       const ComplexPlane& tl, const ComplexPlane& tr, double eps) {
    return loss_dict(loss_mag(pair(el, er, {}), pair(tl, tr, {}), eps));
  }, py::arg("est_left"), py::arg("est_right"), py::arg("tgt_left"),
     py::arg("tgt_right"), py::arg("eps") = 1e-12);
  m.def("loss_mwild",
        [](const ComplexPlane& el, const ComplexPlane& er, const ComplexPlane& tl,
           const ComplexPlane& tr, double eps, const std::string& variant) {
          return loss_dict(loss_mwild(pair(el, er, {}), pair(tl, tr, {}), eps,
                                      parse_variant(variant)));
        },
        py::arg("est_left"), py::arg("est_right"), py::arg("tgt_left"),
        py::arg("tgt_right"), py::arg("eps") = 1e-8,
        py::arg("variant") = "signed-mean");
  m.def("composite_loss",
        [](const ComplexPlane& el, const ComplexPlane& er, const ComplexPlane& tl,
           const ComplexPlane& tr, std::array<double, 3> w) {
          const auto b = composite_loss(pair(el, er, {}), pair(tl, tr, {}),
                                        {w[0], w[1], w[2]});
          py::dict d;
          d["total"] = b.total;
          d["ri"] = b.l_ri;
          d["mag"] = b.l_mag;
          d["mwild"] = b.l_mwild;
          d["grad_left"] = b.grad.left;
          d["grad_right"] = b.grad.right;
          return d;
        },
        py::arg("est_left"), py::arg("est_right"), py::arg("tgt_left"),
        py::arg("tgt_right"), py::arg("weights") = std::array<double, 3>{1.0, 1.0, 3.0});
  m.def("gradcheck", [](std::uint64_t seed) {
    const auto g = run_gradcheck(seed);
    return py::dict(py::arg("ri") = g.ri, py::arg("mag") = g.mag,
                    py::arg("mwild") = g.mwild, py::arg("composite") = g.composite);
  }, py::arg("seed") = 7);

  m.def("mvdr_weights",
        [](const Eigen::VectorXcd& d, const Eigen::MatrixXcd& r) {
          return mvdr_weights(d, r);
        },
        py::arg("steering"), py::arg("covariance"));
  m.def("mint_inverse_filters",
        [](const std::vector<std::vector<double>>& rirs, int filter_len, int delay) {
          const auto r = mint_inverse_filters(rirs, filter_len, delay);
          return py::dict(py::arg("filters") = r.filters,
                          py::arg("equalized") = r.equalized,
                          py::arg("delay") = r.delay,
                          py::arg("residual") = r.residual);
        },
        py::arg("rirs"), py::arg("filter_len"), py::arg("delay") = -1);

  m.def("simulate",
        [](const fs::path& out, int count, std::uint64_t seed, bool synthetic,
           double seconds, int jobs, std::vector<fs::path> speech,
           std::vector<fs::path> noise) {
          SimulateOptions o;
          o.out_dir = out;
          o.count = count;
          o.seed = seed;
          o.synthetic = synthetic;
          o.synthetic_seconds = seconds;
          o.jobs = jobs;
          o.speech_pool = std::move(speech);
          o.noise_pool = std::move(noise);
          py::gil_scoped_release release;
          return simulate_dataset(o);
        },
        py::arg("out_dir"), py::arg("count"), py::arg("seed") = 0,
        py::arg("synthetic") = false, py::arg("seconds") = 2.0, py::arg("jobs") = 1,
        py::arg("speech") = std::vector<fs::path>{},
        py::arg("noise") = std::vector<fs::path>{});
  m.def("run_baseline",
        [](const fs::path& manifest, const fs::path& out, const std::string& method) {
          BaselineOptions o;
          o.method = parse_baseline_method(method);
          py::gil_scoped_release release;
          return run_baseline(manifest, out, o).dump();
        },
        py::arg("manifest"), py::arg("out_dir"), py::arg("method") = "lbh-mvdr",
        "Metrics report as a JSON string");
  m.def("evaluate_dirs",
        [](const fs::path& est, const fs::path& ref, const fs::path& out) {
          py::gil_scoped_release release;
          return evaluate_dirs(est, ref, out).dump();
        },
        py::arg("est_dir"), py::arg("ref_dir"), py::arg("out_dir"));
  m.def("train_toy",
        [](const fs::path& manifest, const fs::path& out, int epochs,
           bool transfer_domain) {
          TrainToyOptions o;
          o.train.max_epochs = epochs;
          o.transfer_domain = transfer_domain;
          py::gil_scoped_release release;
          const auto r = run_train_toy(manifest, out, o);
          py::gil_scoped_acquire acquire;
          return py::dict(py::arg("initial_loss") = r.initial_loss,
                          py::arg("final_loss") = r.final_loss,
                          py::arg("epochs") = r.curve.size(),
                          py::arg("stop_reason") = r.stop_reason,
                          py::arg("delta_itd_ms") = r.metrics.delta_itd_ms,
                          py::arg("delta_ild_db") = r.metrics.delta_ild_db,
                          py::arg("sd_db") = r.metrics.sd_db);
        },
        py::arg("manifest"), py::arg("out_dir"), py::arg("epochs") = 200000,
        py::arg("transfer_domain") = false);
}
