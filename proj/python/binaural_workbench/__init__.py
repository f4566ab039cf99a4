# Copyright 2026 The Binaural Workbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Binaural speech enhancement workbench."""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    Error,
    IoError,
    StftConfig,
    __version__,
    composite_loss,
    evaluate,
    gradcheck,
    ild,
    image_method_rir,
    istft,
    loss_mag,
    loss_mwild,
    loss_ri,
    measure_ild,
    measure_itd,
    mint_inverse_filters,
    mvdr_weights,
    render_binaural,
    simulate,
    stft,
    train_toy,
    woodworth_itd,
)


def sample_scene(seed):
    """Scene spec for `seed` as a dict."""
    return _json.loads(_core.sample_scene(seed))


def validate_scene(scene):
    """List of violated constraints; empty when the scene is valid."""
    return _core.validate_scene(_json.dumps(scene))


def run_baseline(manifest, out_dir, method="lbh-mvdr"):
    return _json.loads(_core.run_baseline(manifest, out_dir, method))


def evaluate_dirs(est_dir, ref_dir, out_dir):
    return _json.loads(_core.evaluate_dirs(est_dir, ref_dir, out_dir))
