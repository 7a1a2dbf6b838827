import math

import pytest

from xroad.model import (LOS, NLOS, ChannelParams, DestinationGeometry, Lane,
                         LinkSpec, RoadLayout, Scenario, ValidationError,
                         destination_position, perpendicular_distance,
                         validate_scenario)


def make_scenario(**overrides) -> Scenario:
    base = dict(
        channel=LOS,
        geometry=DestinationGeometry(d=100.0, theta=0.0),
        link=LinkSpec(r=20.0),
        layout=RoadLayout.intersection(0.01, 0.01),
        p=0.5,
        theta_threshold=1.0,
    )
    base.update(overrides)
    return Scenario(**base)


def test_channel_presets():
    assert LOS == ChannelParams(alpha=2.0, m=3, mu=1.0)
    assert NLOS == ChannelParams(alpha=4.0, m=1, mu=1.0)


def test_valid_scenario_passes_and_is_idempotent():
    sc = make_scenario()
    validated = validate_scenario(sc)
    assert validated is sc
    assert validate_scenario(validated) is validated


def test_non_integer_m_rejected():
    sc = make_scenario(channel=ChannelParams(alpha=2.0, m=1.5))
    with pytest.raises(ValidationError, match="non-integer Nakagami m"):
        validate_scenario(sc)


def test_float_valued_integer_m_normalized():
    sc = make_scenario(channel=ChannelParams(alpha=2.0, m=3.0))
    validated = validate_scenario(sc)
    assert validated.channel.m == 3
    assert isinstance(validated.channel.m, int)


def test_aloha_probability_out_of_range():
    with pytest.raises(ValidationError, match="Aloha probability out of range"):
        validate_scenario(make_scenario(p=1.2))


@pytest.mark.parametrize("overrides,fragment", [
    (dict(channel=ChannelParams(alpha=1.0, m=1)), "alpha"),
    (dict(channel=ChannelParams(alpha=4.0, m=0)), "positive integer"),
    (dict(channel=ChannelParams(alpha=4.0, m=1, mu=0.0)), "mu"),
    (dict(geometry=DestinationGeometry(d=-5.0)), "negative"),
    (dict(geometry=DestinationGeometry(d=1.0, theta=2.0)), "theta"),
    (dict(link=LinkSpec(r=0.0)), "link distance"),
    (dict(layout=RoadLayout.intersection(-0.01, 0.0)), "lambda_x"),
    (dict(layout=RoadLayout.intersection(0.0, -0.01)), "lambda_y"),
    (dict(theta_threshold=0.0), "threshold"),
    (dict(theta_threshold=math.nan), "not finite"),
])
def test_each_invariant_produces_named_error(overrides, fragment):
    with pytest.raises(ValidationError, match=fragment):
        validate_scenario(make_scenario(**overrides))


def test_all_violations_reported_at_once():
    sc = make_scenario(channel=ChannelParams(alpha=0.5, m=2.5),
                       p=-0.1, theta_threshold=-1.0)
    with pytest.raises(ValidationError) as err:
        validate_scenario(sc)
    assert len(err.value.violations) == 4


def test_destination_position_basics():
    assert destination_position(DestinationGeometry(0.0, 1.0)) == (0.0, 0.0)
    assert destination_position(DestinationGeometry(100.0, 0.0)) == (100.0, 0.0)
    x, y = destination_position(DestinationGeometry(100.0, math.pi / 2))
    assert abs(x) < 1e-10 and y == pytest.approx(100.0, abs=1e-12)


def test_destination_position_preserves_norm():
    for d in (0.0, 1.0, 37.5, 1500.0):
        for theta in [k * math.pi / 40 for k in range(21)]:
            x, y = destination_position(DestinationGeometry(d, theta))
            assert math.hypot(x, y) == pytest.approx(d, rel=1e-12, abs=1e-12)
            assert x >= 0.0 and y >= 0.0


def test_theta_reflection_swaps_coordinates():
    for theta in [k * math.pi / 36 for k in range(19)]:
        a = destination_position(DestinationGeometry(250.0, theta))
        b = destination_position(DestinationGeometry(250.0,
                                                     math.pi / 2 - theta))
        assert a[0] == pytest.approx(b[1], rel=1e-12, abs=1e-9)
        assert a[1] == pytest.approx(b[0], rel=1e-12, abs=1e-9)


def test_perpendicular_distance():
    assert perpendicular_distance((100.0, 0.0), "x", 0.0) == 0.0
    assert perpendicular_distance((100.0, 0.0), "x", 3.5) == 3.5
    assert perpendicular_distance((30.0, 40.0), "y", 0.0) == 30.0
    with pytest.raises(ValueError):
        perpendicular_distance((0.0, 0.0), "z", 0.0)


def test_layout_constructors():
    inter = RoadLayout.intersection(0.01, 0.02)
    assert inter.lanes_x == (0.0,) and inter.lanes_y == (0.0,)
    hw = RoadLayout.highway(0.01)
    assert hw.lanes_y == () and hw.lambda_y == 0.0
    multi = RoadLayout.multi_lane(3, 0.01, spacing=3.5)
    assert multi.lanes_x == (0.0, 3.5, 7.0) == multi.lanes_y


def test_lane_enumeration_order_and_intensity():
    sc = make_scenario(layout=RoadLayout(lanes_x=(0.0, 3.5), lanes_y=(0.0,),
                                         lambda_x=0.01, lambda_y=0.02))
    lanes = sc.lanes()
    assert lanes == [Lane("x", 0.0), Lane("x", 3.5), Lane("y", 0.0)]
    assert sc.lane_intensity(lanes[0]) == 0.01
    assert sc.lane_intensity(lanes[2]) == 0.02


def test_laplace_argument_and_path_loss():
    sc = make_scenario(channel=ChannelParams(alpha=4.0, m=2, mu=0.5),
                       link=LinkSpec(10.0), theta_threshold=2.0)
    assert sc.link_path_loss == pytest.approx(1e-4)
    assert sc.laplace_argument == pytest.approx(2 * 2.0 / (0.5 * 1e-4))
