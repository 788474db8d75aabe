import numpy as np
import pytest

from billiard_knots.errors import ExportError, RequestError
from billiard_knots.models import (
    BilliardKnot3D,
    ExpectedCrossing,
    HeightPlan,
    KnotComponent,
    KnotRequest,
    VertexEvent,
)


def _component() -> KnotComponent:
    points = np.array([[2.0, 0.0, 0.5], [-1.0, 0.8, 0.25], [-1.0, -0.8, 0.75], [2.0, 0.0, 0.5]])
    return KnotComponent(points=points, events=[VertexEvent.WALL] * 3, plan=HeightPlan(m=1, phi_z=0.25, margin=0.1))


def test_request_round_trip_keeps_optional_fields() -> None:
    request = KnotRequest(p=2, n=5, signs=(1, 1, 1, 1, -1), A=3.0, B=2.0, delta=0.1, seed=7)
    payload = request.to_dict()
    assert payload["ellipse"] == {"A": 3.0, "B": 2.0}
    assert "m_max" not in payload
    assert KnotRequest.from_dict(payload) == request


def test_request_defaults_to_the_two_by_one_table() -> None:
    request = KnotRequest.from_dict({"p": 2, "n": 5, "signs": [1, -1, 1, -1, 1]})
    assert (request.A, request.B) == (2.0, 1.0)
    assert request.delta is None and request.seed is None


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"A": 1.0, "B": 1.0}, "not a circle"),
        ({"A": 1.0, "B": 2.0}, "A > B"),
        ({"A": -1.0}, "positive"),
        ({"delta": 0.25}, "delta"),
        ({"m_max": 0}, "m_max"),
        ({"retries": 0}, "retries"),
    ],
)
def test_request_rejects_invalid_values(kwargs: dict, message: str) -> None:
    with pytest.raises(RequestError, match=message):
        KnotRequest(p=2, n=5, signs=(1,) * 5, **kwargs)


def test_request_from_dict_rejects_bad_payloads() -> None:
    with pytest.raises(RequestError, match="signs"):
        KnotRequest.from_dict({"p": 2, "n": 5, "signs": [1, 2]})
    with pytest.raises(RequestError, match="invalid"):
        KnotRequest.from_dict({"n": 5, "signs": [1]})


def test_knot_round_trip() -> None:
    knot = BilliardKnot3D(
        A=2.0,
        B=1.0,
        components=[_component()],
        expected_crossings=[ExpectedCrossing(x=0.1, y=-0.2, handedness=-1)],
    )
    loaded = BilliardKnot3D.from_dict(knot.to_dict())
    assert np.array_equal(loaded.components[0].points, knot.components[0].points)
    assert loaded.components[0].events == [VertexEvent.WALL] * 3
    assert loaded.expected_crossings == knot.expected_crossings
    assert knot.to_dict()["components"][0]["events"] == ["wall", "wall", "wall"]


def test_knot_from_dict_validates_components() -> None:
    payload = BilliardKnot3D(A=2.0, B=1.0, components=[_component()]).to_dict()
    payload["components"][0]["events"] = ["wall"]
    with pytest.raises(ExportError, match="one event per point"):
        BilliardKnot3D.from_dict(payload)
    payload["components"][0]["events"] = ["wall", "bounce", "wall"]
    with pytest.raises(ExportError, match="invalid"):
        BilliardKnot3D.from_dict(payload)
    with pytest.raises(ExportError):
        BilliardKnot3D.from_dict({"components": []})
