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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bw/hrtf.hpp"
#include "bw/losses.hpp"
#include "bw/metrics.hpp"
#include "bw/signal.hpp"
#include "json.hpp"

namespace bw {

// Per-mic complex filters for each ear. Each plane is [F x T'], where T' is 1
// for time-invariant filters (broadcast over frames) or the capture's frame
// count for per-(f,t) filters.
struct FilterSet {
  std::vector<ComplexPlane> left;
  std::vector<ComplexPlane> right;

  static FilterSet zeros(int num_mics, int num_bins, int num_frames = 1);

  int num_mics() const { return static_cast<int>(left.size()); }
  int num_bins() const { return left.empty() ? 0 : static_cast<int>(left[0].rows()); }
  int num_frames() const { return left.empty() ? 0 : static_cast<int>(left[0].cols()); }
  bool time_varying() const { return num_frames() > 1; }
  std::size_t num_parameters() const;

  // Real view for the optimizer: [re, im] pairs, left mics then right mics.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  bool operator==(const FilterSet& o) const;
};

// Y^{l|r}_{f,t} = (W^{l|r}_{f,t})^H X_{f,t}.
BinauralSpectrogram apply_filters(const FilterSet& w,
                                  const MultiChannelSpectrogram& x);

// dL/dW^{l|r}_{m,f} = sum_t X_{m,f,t} conj(dL/dY^{l|r}_{f,t}) in the
// gradient convention of losses.hpp; the sum over t is dropped for
// time-varying filters.
FilterSet backprop_filters(const BinauralGradient& grad_out,
                           const MultiChannelSpectrogram& x,
                           bool time_varying = false);

// W = c conj(a) / ||c||^2, the minimum-norm filter with W^H c = a, for an
// anechoic transfer c[m][f] and the HRTF a at the target azimuth.
FilterSet oracle_filters(const std::vector<std::vector<cdouble>>& transfer,
                         const HrtfFilter& hrtf);

class Adam {
 public:
  struct Config {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam(std::size_t size, Config config);
  explicit Adam(std::size_t size) : Adam(size, Config{}) {}
  void step(std::span<double> params, std::span<const double> grad, double lr);
  long steps() const { return t_; }

 private:
  Config config_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// Halve the learning rate when the loss has not improved on the best value
// for `patience` consecutive epochs; stop at the `max_halvings`-th halving.
struct ScheduleConfig {
  double initial_lr = 5e-4;
  int patience = 3;
  double factor = 0.5;
  int max_halvings = 4;
};

class PlateauSchedule {
 public:
  explicit PlateauSchedule(ScheduleConfig config = {});

  // Records one epoch loss; returns false once training should stop.
  bool observe(double loss);
  double lr() const { return lr_; }
  int halvings() const { return halvings_; }
  int stagnant_epochs() const { return stagnant_; }
  double best() const { return best_; }
  bool improved_last() const { return improved_last_; }

 private:
  ScheduleConfig config_;
  double lr_;
  double best_;
  int stagnant_ = 0;
  int halvings_ = 0;
  bool improved_last_ = false;
};

struct TrainingScene {
  MultiChannelSpectrogram capture;
  BinauralSpectrogram target;
};

struct TrainConfig {
  LossWeights weights;
  LossOptions loss;
  ScheduleConfig schedule;
  Adam::Config adam;
  int max_epochs = 200000;
  bool time_varying = false;
  // Optimize on g X with g chosen so the mean mic energy matches the mean ear
  // energy of the targets, and report g W'. Outputs and losses are unchanged;
  // only the scale seen by Adam differs.
  bool normalize_input = true;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double best = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  FilterSet filters;  // the filters that achieved the best epoch loss
  std::vector<EpochRecord> curve;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  // Filtered output of scene 0 vs its target; NaN (null in JSON) when the
  // output is silent, e.g. for untrained zero filters.
  MetricsReport metrics;
  std::string stop_reason;
  double input_gain = 1.0;
};

// Full-batch gradient descent with Adam; one epoch is one pass over all
// scenes. Throws on a non-finite loss.
// Gain g described in TrainConfig::normalize_input; 1 for silent captures.
double input_gain(const std::vector<TrainingScene>& scenes);

TrainResult train(const std::vector<TrainingScene>& scenes,
                  const TrainConfig& config = {},
                  std::optional<FilterSet> initial = std::nullopt);

nlohmann::json to_json(const FilterSet& w);
FilterSet filters_from_json(const nlohmann::json& j);

}  // namespace bw
