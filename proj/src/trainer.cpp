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

#include "bw/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bw/error.hpp"

namespace bw {
namespace {

void require_compatible(const FilterSet& w, const MultiChannelSpectrogram& x) {
  require(w.num_mics() == x.num_channels() &&
              static_cast<int>(w.right.size()) == x.num_channels(),
          "filters and capture differ in channel count");
  require(w.num_bins() == x.num_bins(),
          "filters and capture differ in bin count");
  require(w.num_frames() == 1 || w.num_frames() == x.num_frames(),
          "time-varying filters must match the capture frame count");
}

}  // namespace

FilterSet FilterSet::zeros(int num_mics, int num_bins, int num_frames) {
  require(num_mics >= 1 && num_bins >= 1 && num_frames >= 1,
          "filter set dimensions must be positive");
  FilterSet w;
  w.left.assign(num_mics, ComplexPlane::Zero(num_bins, num_frames));
  w.right.assign(num_mics, ComplexPlane::Zero(num_bins, num_frames));
  return w;
}

std::size_t FilterSet::num_parameters() const {
  return 2u * num_mics() * num_bins() * num_frames();
}

std::vector<double> FilterSet::flatten() const {
  std::vector<double> flat;
  flat.reserve(2 * num_parameters());
  for (const auto* ear : {&left, &right}) {
    for (const auto& p : *ear) {
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        flat.push_back(p.data()[i].real());
        flat.push_back(p.data()[i].imag());
      }
    }
  }
  return flat;
}

void FilterSet::assign(std::span<const double> flat) {
  require(flat.size() == 2 * num_parameters(), "filter assign: size mismatch");
  std::size_t k = 0;
  for (auto* ear : {&left, &right}) {
    for (auto& p : *ear) {
      for (Eigen::Index i = 0; i < p.size(); ++i, k += 2) {
        p.data()[i] = {flat[k], flat[k + 1]};
      }
    }
  }
}

bool FilterSet::operator==(const FilterSet& o) const {
  if (left.size() != o.left.size() || right.size() != o.right.size()) {
    return false;
  }
  for (std::size_t m = 0; m < left.size(); ++m) {
    if (left[m] != o.left[m] || right[m] != o.right[m]) return false;
  }
  return true;
}

BinauralSpectrogram apply_filters(const FilterSet& w,
                                  const MultiChannelSpectrogram& x) {
  require_compatible(w, x);
  const int bins = x.num_bins(), frames = x.num_frames();
  const bool tv = w.time_varying();
  ComplexPlane yl = ComplexPlane::Zero(bins, frames);
  ComplexPlane yr = ComplexPlane::Zero(bins, frames);
  for (int m = 0; m < x.num_channels(); ++m) {
    const ComplexPlane& xm = x.channel(m);
    for (int t = 0; t < frames; ++t) {
      const int tw = tv ? t : 0;
      for (int f = 0; f < bins; ++f) {
        yl(f, t) += std::conj(w.left[m](f, tw)) * xm(f, t);
        yr(f, t) += std::conj(w.right[m](f, tw)) * xm(f, t);
      }
    }
  }
  return {std::move(yl), std::move(yr), x.config()};
}

FilterSet backprop_filters(const BinauralGradient& grad_out,
                           const MultiChannelSpectrogram& x,
                           bool time_varying) {
  const int bins = x.num_bins(), frames = x.num_frames();
  require(grad_out.left.rows() == bins && grad_out.left.cols() == frames &&
              grad_out.right.rows() == bins && grad_out.right.cols() == frames,
          "backprop_filters: gradient shape does not match capture");
  FilterSet g = FilterSet::zeros(x.num_channels(), bins,
                                 time_varying ? frames : 1);
  for (int m = 0; m < x.num_channels(); ++m) {
    const ComplexPlane& xm = x.channel(m);
    for (int f = 0; f < bins; ++f) {
      for (int t = 0; t < frames; ++t) {
        const int tw = time_varying ? t : 0;
        g.left[m](f, tw) += xm(f, t) * std::conj(grad_out.left(f, t));
        g.right[m](f, tw) += xm(f, t) * std::conj(grad_out.right(f, t));
      }
    }
  }
  return g;
}

FilterSet oracle_filters(const std::vector<std::vector<cdouble>>& transfer,
                         const HrtfFilter& hrtf) {
  require(!transfer.empty(), "oracle_filters: no transfer functions");
  const int mics = static_cast<int>(transfer.size());
  const int bins = static_cast<int>(hrtf.left.size());
  for (const auto& c : transfer) {
    require(static_cast<int>(c.size()) == bins,
            "oracle_filters: transfer and hrtf bin counts differ");
  }
  FilterSet w = FilterSet::zeros(mics, bins);
  for (int f = 0; f < bins; ++f) {
    double power = 0.0;
    for (int m = 0; m < mics; ++m) power += std::norm(transfer[m][f]);
    require(power > 0.0, "oracle_filters: transfer vanishes at a bin");
    for (int m = 0; m < mics; ++m) {
      w.left[m](f, 0) = transfer[m][f] * std::conj(hrtf.left[f]) / power;
      w.right[m](f, 0) = transfer[m][f] * std::conj(hrtf.right[f]) / power;
    }
  }
  return w;
}

Adam::Adam(std::size_t size, Config config)
    : config_(config), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad,
                double lr) {
  require(params.size() == m_.size() && grad.size() == m_.size(),
          "adam: parameter size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
  }
}

PlateauSchedule::PlateauSchedule(ScheduleConfig config)
    : config_(config),
      lr_(config.initial_lr),
      best_(std::numeric_limits<double>::infinity()) {
  require(config.initial_lr > 0, "schedule: initial lr must be positive");
  require(config.patience >= 1, "schedule: patience must be >= 1");
  require(config.factor > 0 && config.factor < 1,
          "schedule: factor must lie in (0, 1)");
  require(config.max_halvings >= 1, "schedule: max_halvings must be >= 1");
}

bool PlateauSchedule::observe(double loss) {
  improved_last_ = loss < best_;
  if (improved_last_) {
    best_ = loss;
    stagnant_ = 0;
    return true;
  }
  if (++stagnant_ >= config_.patience) {
    lr_ *= config_.factor;
    ++halvings_;
    stagnant_ = 0;
  }
  return halvings_ < config_.max_halvings;
}

double input_gain(const std::vector<TrainingScene>& scenes) {
  double mic = 0.0, ear = 0.0;
  for (const auto& s : scenes) {
    for (const auto& c : s.capture.channels()) mic += c.squaredNorm() / c.size();
    ear += (s.target.left.squaredNorm() + s.target.right.squaredNorm()) /
           s.target.left.size();
  }
  const int m = scenes.empty() ? 1 : scenes[0].capture.num_channels();
  const double mic_mean = mic / m, ear_mean = ear / 2.0;
  if (!(mic_mean > 0.0) || !(ear_mean > 0.0)) return 1.0;
  return std::sqrt(ear_mean / mic_mean);
}

namespace {

FilterSet scaled(FilterSet w, double g) {
  for (auto* ear : {&w.left, &w.right}) {
    for (auto& p : *ear) p *= g;
  }
  return w;
}

MultiChannelSpectrogram scaled(const MultiChannelSpectrogram& x, double g) {
  std::vector<ComplexPlane> ch;
  ch.reserve(x.num_channels());
  for (const auto& c : x.channels()) ch.push_back(c * g);
  return {std::move(ch), x.config()};
}

}  // namespace

TrainResult train(const std::vector<TrainingScene>& scenes,
                  const TrainConfig& config,
                  std::optional<FilterSet> initial) {
  require(!scenes.empty(), "train: no scenes");
  require(config.max_epochs >= 0, "train: max_epochs must be >= 0");
  config.weights.validate();
  const auto& first = scenes[0].capture;
  for (const auto& s : scenes) {
    require(s.capture.num_channels() == first.num_channels() &&
                s.capture.num_bins() == first.num_bins(),
            "train: scenes disagree in channel or bin count");
    require(s.target.num_bins() == s.capture.num_bins() &&
                s.target.num_frames() == s.capture.num_frames(),
            "train: target shape does not match capture");
    if (config.time_varying) {
      require(s.capture.num_frames() == first.num_frames(),
              "train: time-varying filters need equal frame counts");
    }
  }
  const FilterSet start =
      initial ? *initial
              : FilterSet::zeros(first.num_channels(), first.num_bins(),
                                 config.time_varying ? first.num_frames() : 1);
  require_compatible(start, first);
  const bool tv = start.time_varying();
  const double g = config.normalize_input ? input_gain(scenes) : 1.0;
  std::vector<MultiChannelSpectrogram> inputs;
  inputs.reserve(scenes.size());
  for (const auto& s : scenes) inputs.push_back(g == 1.0 ? s.capture : scaled(s.capture, g));

  auto batch_loss = [&](const FilterSet& filters, std::vector<double>* grad) {
    double total = 0.0;
    if (grad) grad->assign(2 * filters.num_parameters(), 0.0);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const auto est = apply_filters(filters, inputs[i]);
      const auto lb = composite_loss(est, scenes[i].target, config.weights, config.loss);
      total += lb.total;
      if (grad) {
        const auto gr = backprop_filters(lb.grad, inputs[i], tv).flatten();
        for (std::size_t k = 0; k < gr.size(); ++k) (*grad)[k] += gr[k];
      }
    }
    return total;
  };

  TrainResult result;
  result.input_gain = g;
  result.filters = start;
  FilterSet w = g == 1.0 ? start : scaled(start, 1.0 / g);
  PlateauSchedule schedule(config.schedule);
  Adam adam(2 * w.num_parameters(), config.adam);
  std::vector<double> params = w.flatten();
  std::vector<double> grad;
  result.stop_reason = "max_epochs";
  double best = std::numeric_limits<double>::infinity();
  FilterSet best_w = w;
  int best_epoch = -1;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double loss = batch_loss(w, &grad);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "train: non-finite loss at epoch " << epoch << " (lr "
          << schedule.lr() << ")";
      throw Error(msg.str());
    }
    if (epoch == 0) result.initial_loss = loss;
    const double lr = schedule.lr();
    const bool keep_going = schedule.observe(loss);
    if (loss < best) {
      best = loss;
      best_w = w;
      best_epoch = epoch;
    }
    result.curve.push_back({epoch, loss, best, lr});
    if (!keep_going) {
      result.stop_reason = "lr_halvings";
      break;
    }
    adam.step(params, grad, schedule.lr());
    w.assign(params);
  }
  // Epoch 0 evaluates the starting filters, which are returned bit-exact.
  if (best_epoch > 0) result.filters = scaled(best_w, g);
  result.final_loss = best_epoch < 0 ? batch_loss(w, nullptr) : best;
  if (config.max_epochs == 0) result.initial_loss = result.final_loss;
  const auto est = apply_filters(result.filters, scenes[0].capture);
  if (est.left.squaredNorm() > 0.0 && est.right.squaredNorm() > 0.0) {
    result.metrics = evaluate_binaural(est, scenes[0].target);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.metrics = {nan, nan, nan};
  }
  return result;
}

nlohmann::json to_json(const FilterSet& w) {
  auto ear_json = [](const std::vector<ComplexPlane>& ear) {
    nlohmann::json mics = nlohmann::json::array();
    for (const auto& p : ear) {
      nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
      for (Eigen::Index f = 0; f < p.rows(); ++f) {
        for (Eigen::Index t = 0; t < p.cols(); ++t) {
          re.push_back(p(f, t).real());
          im.push_back(p(f, t).imag());
        }
      }
      mics.push_back({{"re", re}, {"im", im}});
    }
    return mics;
  };
  return {{"schema_version", 1},
          {"layout", "mic-major; per mic row-major [bin][frame]"},
          {"num_mics", w.num_mics()},
          {"num_bins", w.num_bins()},
          {"num_frames", w.num_frames()},
          {"left", ear_json(w.left)},
          {"right", ear_json(w.right)}};
}

FilterSet filters_from_json(const nlohmann::json& j) {
  try {
    const int mics = j.at("num_mics").get<int>();
    const int bins = j.at("num_bins").get<int>();
    const int frames = j.at("num_frames").get<int>();
    FilterSet w = FilterSet::zeros(mics, bins, frames);
    auto load = [&](const nlohmann::json& src, std::vector<ComplexPlane>& ear) {
      require(static_cast<int>(src.size()) == mics, "filters json: mic count");
      for (int m = 0; m < mics; ++m) {
        const auto& re = src[m].at("re");
        const auto& im = src[m].at("im");
        require(static_cast<int>(re.size()) == bins * frames &&
                    re.size() == im.size(),
                "filters json: coefficient count");
        std::size_t k = 0;
        for (int f = 0; f < bins; ++f) {
          for (int t = 0; t < frames; ++t, ++k) {
            ear[m](f, t) = {re[k].get<double>(), im[k].get<double>()};
          }
        }
      }
    };
    load(j.at("left"), w.left);
    load(j.at("right"), w.right);
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed filters json: ") + e.what());
  }
}

}  // namespace bw
