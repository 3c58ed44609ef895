# Copyright 2024 - GitHub user: fredericks1982

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# pylint: disable=missing-function-docstring

"""
Unit tests for the channel model: link budgets, fading samplers and channel
realizations.
"""

import math

import numpy as np
import pytest
from hap_network_optimizer.models import (
    ChannelRealization,
    FadingKind,
    FadingModel,
    HapNetGeometryError,
    Position3D,
    Scenario,
    SystemParameters,
    TierTag,
    attenuation_gain,
    average_realization,
    bh_gain,
    draw_realization,
    fh_gain,
    hap_coverage,
    path_loss,
    sample_fading,
)

DRAWS = 1_000_000


@pytest.fixture
def scenario():
    return Scenario(
        users=[Position3D(90e3, 90e3), Position3D(130e3, 90e3), Position3D(80e3, 5e3)],
        tbs=[Position3D(80e3, 5e3, 25)],
        haps=[Position3D(90e3, 90e3, 18e3)],
        gateways=[Position3D(0, 0)],
    )


# region Link budget


def test_path_loss_known_value():
    expected = (299_792_458.0 / (4 * math.pi * 1000.0 * 3e9)) ** 2

    assert path_loss(1000.0, 3e9) == pytest.approx(expected)
    assert path_loss(2000.0, 3e9) == pytest.approx(expected / 4)


def test_path_loss_vectorized():
    result = path_loss(np.array([1000.0, 2000.0]), 3e9)

    assert result.shape == (2,)
    assert result[0] == pytest.approx(4 * result[1])


def test_path_loss_singular_link():
    with pytest.raises(HapNetGeometryError):
        path_loss(0.0, 3e9)
    with pytest.raises(ValueError):
        path_loss(10.0, 0.0)


def test_attenuation_gain():
    assert attenuation_gain(TierTag.AIR, 18e3, 18e3, 2.0) == pytest.approx(10**0.6)
    assert attenuation_gain(TierTag.SPACE, 2000e3, 2000e3, 2.0) == pytest.approx(
        10**0.6
    )
    assert attenuation_gain(TierTag.AIR, 30e3, 18e3, 0.0) == 1.0
    assert attenuation_gain(TierTag.GROUND, 5e3, 25, 2.0) == 1.0

    with pytest.raises(HapNetGeometryError):
        attenuation_gain(TierTag.AIR, 1e3, 0.0, 2.0)


# endregion

# region Fading


def test_fading_model_validation():
    with pytest.raises(TypeError) as exc_info:
        FadingModel("rayleigh")
    assert str(exc_info.value) == "The fading kind must be a valid FadingKind"

    with pytest.raises(ValueError):
        FadingModel.rician(-1.0)
    with pytest.raises(ValueError):
        FadingModel.shadowed_rician(0.372, 0.0, 7.64)


def test_fading_model_properties():
    model = FadingModel.shadowed_rician(0.372, 0.0129, 7.64)

    assert model.kind == FadingKind.SHADOWED_RICIAN
    assert model.kappa is None
    assert model.omegas == (0.372, 0.0129, 7.64)
    assert model.mean() == pytest.approx(0.3978)
    assert FadingModel.rician(10).mean() == 1.0
    assert FadingModel.rician(10) == FadingModel.rician(10.0)
    assert FadingModel.rician(10) != FadingModel.rician(5)


@pytest.mark.parametrize(
    "model", [FadingModel.rayleigh(), FadingModel.rician(10.0)], ids=str
)
def test_unit_mean_fading(model):
    draws = sample_fading(model, np.random.default_rng(11), DRAWS)
    sigma = draws.std() / math.sqrt(DRAWS)

    assert abs(draws.mean() - 1.0) < 3 * sigma + 1e-12
    assert np.all(draws >= 0)


def test_shadowed_rician_mean():
    model = FadingModel.shadowed_rician(0.372, 0.0129, 7.64)

    draws = model.sample(np.random.default_rng(12), DRAWS)

    assert draws.mean() == pytest.approx(model.mean(), rel=0.02)


def test_rician_pure_los_limit():
    draws = sample_fading(FadingModel.rician(1e9), np.random.default_rng(13), 10_000)

    assert draws.mean() == pytest.approx(1.0, abs=1e-3)
    assert draws.var() < 1e-6


def test_fading_scalar_draw():
    value = sample_fading(FadingModel.rayleigh(), np.random.default_rng(0))

    assert np.ndim(value) == 0


def test_fading_independent_over_rbs():
    draws = sample_fading(FadingModel.rayleigh(), np.random.default_rng(5), (100_000, 2))

    assert abs(np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]) < 0.02


# endregion

# region Gains


def test_fh_gain_pinned_fading(scenario):
    d = math.dist((90e3, 90e3, 18e3), (130e3, 90e3, 0))
    expected = path_loss(d, 3e9) * attenuation_gain(TierTag.AIR, d, 18e3, 2.0) * 0.5

    gain = fh_gain(scenario, TierTag.AIR, 0, 1, 7, fading=0.5)

    assert gain == pytest.approx(expected)


def test_fh_gain_index_errors(scenario):
    with pytest.raises(IndexError):
        fh_gain(scenario, TierTag.GROUND, 0, 0, 50, fading=1.0)
    with pytest.raises(IndexError):
        fh_gain(scenario, TierTag.AIR, 1, 0, 0, fading=1.0)
    with pytest.raises(IndexError):
        fh_gain(scenario, TierTag.AIR, 0, 3, 0, fading=1.0)
    with pytest.raises(ValueError):
        fh_gain(scenario, TierTag.AIR, 0, 0, 0)


def test_bh_gain_pinned_fading(scenario):
    hap = (90e3, 90e3, 18e3)
    d_gw = math.dist((0, 0, 0), hap)
    d_sat = math.dist((90e3, 90e3, 2000e3), hap)

    assert bh_gain(scenario, 1, 0, fading=1.0) == pytest.approx(
        path_loss(d_gw, 3.4e9) * attenuation_gain(TierTag.AIR, d_gw, 18e3, 2.0)
    )
    assert bh_gain(scenario, 0, 0, fading=2.0) == pytest.approx(
        2.0
        * path_loss(d_sat, 3.4e9)
        * attenuation_gain(TierTag.SPACE, d_sat, 2000e3, 2.0)
    )
    with pytest.raises(IndexError):
        bh_gain(scenario, 2, 0, fading=1.0)


def test_hap_coverage(scenario):
    np.testing.assert_array_equal(hap_coverage(scenario), [[True, False, False]])


def test_draw_realization_shapes_and_determinism(scenario):
    a = draw_realization(scenario, np.random.default_rng(3))
    b = draw_realization(scenario, np.random.default_rng(3))

    assert a.fh[TierTag.GROUND].shape == (1, 3, 50)
    assert a.fh[TierTag.AIR].shape == (1, 3, 100)
    assert a.fh[TierTag.SPACE].shape == (1, 3, 200)
    assert a.bh.shape == (2, 1)
    assert not a.is_average
    for tag in TierTag:
        np.testing.assert_array_equal(a.fh[tag], b.fh[tag])
    np.testing.assert_array_equal(a.bh, b.bh)
    with pytest.raises(ValueError):
        a.bh[0, 0] = 1.0


def test_average_realization(scenario):
    realization = average_realization(scenario)

    assert realization.is_average
    air = realization.fh[TierTag.AIR]
    assert np.all(air == air[:, :, :1])
    assert realization.fh_gain(TierTag.AIR, 0, 0, 42) == pytest.approx(
        fh_gain(scenario, TierTag.AIR, 0, 0, 0, fading=1.0)
    )
    space_mean = SystemParameters().space.fading.mean()
    assert realization.fh_gain(TierTag.SPACE, 0, 0, 0) == pytest.approx(
        fh_gain(scenario, TierTag.SPACE, 0, 0, 0, fading=space_mean)
    )


def test_realization_validation():
    gains = {tag: np.ones((1, 1, 1)) for tag in TierTag}

    with pytest.raises(ValueError):
        ChannelRealization({TierTag.GROUND: gains[TierTag.GROUND]}, np.ones((1, 1)))
    with pytest.raises(ValueError):
        ChannelRealization(gains, np.zeros((1, 1)))


def test_realization_to_frame(scenario):
    frame = draw_realization(scenario, np.random.default_rng(0)).to_frame()

    assert list(frame.columns) == ["tier", "s", "u", "n", "gain"]
    assert len(frame) == 3 * 50 + 3 * 100 + 3 * 200 + 2
    assert (frame["tier"] == "backhaul").sum() == 2
    assert np.all(frame["gain"] > 0)


# endregion
