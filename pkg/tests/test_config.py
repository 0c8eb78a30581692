import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_scatter.config import ConfigError, ExperimentConfig, load_config, parse_config


def _cfg(**kw):
    return dict({"schema_version": 1, "experiment": "cascade-1vN"}, **kw)


def test_defaults_are_filled_per_experiment():
    cfg = parse_config({"schema_version": 1, "experiment": "fig2-fidelity"})
    assert cfg.L == 81 and cfg.alpha == [0.13, 0.26, 0.33] and cfg.U_over_vr == 1.0
    assert cfg.packets.left_centers == [20.0] and cfg.packets.right_centers == [62.0]
    gallery = parse_config({"schema_version": 1, "experiment": "regime-gallery"})
    assert gallery.U == [0.0, 1e9, 4.0, -4.0]
    sweep = parse_config({"schema_version": 1, "experiment": "resonance-sweep"})
    assert len(sweep.U_over_vr) == 81 and sweep.U_over_vr[40] == 0.0 and sweep.U_over_vr[50] == 1.0


def test_explicit_u_suppresses_interaction_default():
    cfg = parse_config({"schema_version": 1, "experiment": "fig2-fidelity", "U": 2.0})
    assert cfg.U == 2.0 and cfg.U_over_vr is None


@pytest.mark.parametrize(
    "raw,path",
    [
        (_cfg(bogus=1), "bogus"),
        (_cfg(schema_version=2), "schema_version"),
        (_cfg(N=[]), "N"),
        (_cfg(N=0), "N"),
        (_cfg(theta="x"), "theta"),
        ({"schema_version": 1, "experiment": "nope"}, "experiment"),
        ({"schema_version": 1, "experiment": "fig2-fidelity", "alpha": -0.1}, "alpha"),
        ({"schema_version": 1, "experiment": "fig2-fidelity", "times": {"stop": 1, "num": 3, "dt": 1}}, "times.dt"),
        ({"schema_version": 1, "experiment": "fig2-fidelity", "U": 1.0, "U_over_vr": 1.0}, "<root>"),
        ({"schema_version": 1, "experiment": "bethe-check", "L": 10}, "L"),
        ({"schema_version": 1, "experiment": "regime-gallery", "theta": 1.0}, "theta"),
        (
            {"schema_version": 1, "experiment": "regime-gallery",
             "packets": {"left_centers": [30], "right_centers": [20], "k": 1.0}},
            "packets",
        ),
        (_cfg(lattice_check=True, N=3), "N"),
        ({"schema_version": 1, "experiment": "cascade-2v2", "left_spins": "u"}, "left_spins/right_spins"),
    ],
)
def test_errors_carry_field_paths(raw, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(raw)
    assert path in [p for p, _ in exc.value.errors]


def test_non_object_and_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        parse_config([1, 2])
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(bad)
    bad.write_text('{"schema_version": 1, "experiment": "bethe-check", "U": Infinity}')
    with pytest.raises(ConfigError, match="non-finite"):
        load_config(bad)


def test_grid_points_in_order_and_cap():
    cfg = parse_config(_cfg(N=[1, 2, 3], theta=[0.1, 0.2]))
    pts = cfg.points()
    assert [(p.N, p.theta) for p in pts] == [(1, 0.1), (1, 0.2), (2, 0.1), (2, 0.2), (3, 0.1), (3, 0.2)]
    assert pts[3].grid_labels() == {"N": 2, "theta": 0.2}
    with pytest.raises(ConfigError, match="cap"):
        parse_config(_cfg(N=[1, 2, 3], theta=[0.1, 0.2], sweep_cap=5)).points()


def test_default_cap_is_ten_thousand():
    thetas = [i * 1e-4 for i in range(5001)]
    with pytest.raises(ConfigError):
        parse_config(_cfg(N=[1, 2], theta=thetas)).points()
    assert len(parse_config(_cfg(N=[1, 2], theta=thetas[:5000])).points()) == 10_000


@given(
    st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=5),
    st.floats(1e-3, 2.0),
    st.integers(1, 20),
)
@settings(max_examples=40)
def test_config_roundtrips_bit_exactly(us, alpha, N):
    cfg = parse_config({"schema_version": 1, "experiment": "regime-gallery", "U": us, "alpha": alpha})
    again = parse_config(json.loads(cfg.model_dump_json()))
    assert again == cfg and again.digest() == cfg.digest()
    c2 = parse_config(_cfg(N=N, theta=math.pi / 3))
    assert ExperimentConfig.model_validate_json(c2.model_dump_json()) == c2


def test_digest_changes_with_content():
    a = parse_config(_cfg(N=2))
    b = parse_config(_cfg(N=3))
    assert a.digest() != b.digest()
    assert parse_config(_cfg(N=2)).digest() == a.digest()
