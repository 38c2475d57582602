import csv
import json

import numpy as np
import pytest

from unicodec.core import ConfigError, DomainError, ParseError, SeedSpec
from unicodec.sim import (
    CSV_COLUMNS,
    ExperimentConfig,
    FigureStyle,
    PointResult,
    SchemeDescriptor,
    SchemeRegistry,
    SimResult,
    StopRule,
    export_csv,
    export_json,
    figure_plan,
    global_registry,
    load_results,
    reference_points,
    render_figure,
    render_plan,
    resolve_all_zero,
    run_experiment,
    wilson_interval,
)
from unicodec.sim.schemes import AedParams, PolarScScheme, builtin_schemes
from unicodec.bounds import bound_result
from unicodec.polar import design_ebn0_for_target

SMALL_POLAR = {"N": 64, "K": 32, "design_snr_db": 2.0}


def _experiment(**overrides) -> ExperimentConfig:
    values = dict(
        name="small",
        scheme=SchemeDescriptor(family="polar-sc", params=SMALL_POLAR),
        snr_points=[1.0, 3.0],
        stop=StopRule(min_frame_errors=5, max_frames=200),
        seed=SeedSpec(master_seed=7),
        batch_frames=16,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def _strip_timing(result: SimResult) -> list[dict]:
    return [p.model_dump(exclude={"seconds"}) for p in result.points]


# --- configuration -------------------------------------------------------------------


def test_config_file_round_trip(tmp_path):
    cfg = _experiment()
    path = cfg.to_file(tmp_path / "exp.json")
    assert ExperimentConfig.from_file(path) == cfg


@pytest.mark.parametrize(
    "patch",
    [
        {"snr_points": []},
        {"snr_points": [2.0, 1.0]},
        {"snr_points": [1.0, 1.0]},
        {"stop": {"min_frame_errors": 0}},
        {"workers": 0},
        {"unexpected": 1},
    ],
)
def test_invalid_config_files(tmp_path, patch):
    data = json.loads(_experiment().model_dump_json())
    data.update(patch)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        ExperimentConfig.from_file(tmp_path / "missing.json")


def test_schema_documents_fields():
    schema = json.loads(ExperimentConfig.schema_text())
    assert {"scheme", "snr_points", "stop", "seed", "workers"} <= set(schema["properties"])


def test_default_stop_rule():
    stop = StopRule()
    assert (stop.min_frame_errors, stop.max_frames, stop.max_wall_seconds) == (100, 10_000_000, None)


# --- statistics ----------------------------------------------------------------------


def test_wilson_interval_examples():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert hi == pytest.approx(0.0370, abs=1e-4)
    lo, hi = wilson_interval(50, 100)
    assert (lo, hi) == (pytest.approx(0.4038, abs=1e-4), pytest.approx(0.5962, abs=1e-4))


def test_point_from_counts():
    p = PointResult.from_counts(ebn0_db=2.0, frames=400, frame_errors=4, bit_errors=10, payload_bits=32)
    assert p.fer == 0.01
    assert p.bits_total == 12800
    assert p.ber == pytest.approx(10 / 12800)
    assert p.ci_low < p.fer < p.ci_high
    empty = PointResult.from_counts(ebn0_db=2.0, frames=0, frame_errors=0, bit_errors=0, payload_bits=32)
    assert empty.fer == 0.0 and empty.ber == 0.0


# --- registry ------------------------------------------------------------------------


def test_global_registry_families():
    assert set(global_registry.list_all()) == {
        "polar-sc", "polar-ssc", "polar-scl", "polar-aed", "ldpc-bp", "ldpc-bch-bp", "sc-ldpc-wbp",
    }
    assert "sc-ldpc-wbp:" in global_registry.get_schemes_description()


def test_registry_messages(capsys):
    registry = SchemeRegistry()
    registry.register_scheme(PolarScScheme())
    registry.register_scheme(PolarScScheme())
    out = capsys.readouterr().out
    assert "✅Scheme 'polar-sc' has been registered." in out
    assert "Scheme 'polar-sc' is already registered and will be overwritten." in out
    registry.unregister("polar-sc")
    assert registry.get_scheme("polar-sc") is None
    registry.unregister("polar-sc")
    assert "No scheme named 'polar-sc'" in capsys.readouterr().out
    for scheme in builtin_schemes():
        registry.register_scheme(scheme, verbose=False)
    assert len(registry.list_all()) == 7
    registry.clear()
    assert registry.list_all() == []


def test_resolve_polar_codec():
    codec = global_registry.resolve(SchemeDescriptor(family="polar-sc", params=SMALL_POLAR))
    assert (codec.payload_bits, codec.code_length, codec.rate) == (32, 64, 0.5)
    assert codec.label == "Polar SC"
    labelled = global_registry.resolve(SchemeDescriptor(family="polar-ssc", label="mine", params=SMALL_POLAR))
    assert labelled.label == "mine"
    assert labelled.decoder.name == "SSC"


def test_resolve_polar_encoder_produces_codewords(rng):
    codec = global_registry.resolve(SchemeDescriptor(family="polar-sc", params=SMALL_POLAR))
    message = rng.integers(0, 2, codec.payload_bits, dtype=np.uint8)
    word = codec.encode(message)
    llr = 20.0 * (1.0 - 2.0 * word)
    np.testing.assert_array_equal(codec.decoder.decode(llr).message, message)


@pytest.mark.parametrize(
    "descriptor",
    [
        SchemeDescriptor(family="turbo"),
        SchemeDescriptor(family="polar-sc", params={"N": 64, "K": 32, "colour": "red"}),
        SchemeDescriptor(family="polar-sc", params={"N": 64, "K": 32, "crc": "crc99"}),
        SchemeDescriptor(family="polar-sc", params={"N": 60, "K": 32}),
        SchemeDescriptor(family="ldpc-bp", params={"code": "alist"}),
    ],
)
def test_unresolvable_schemes(descriptor):
    with pytest.raises(ConfigError):
        global_registry.resolve(descriptor)


def test_transmission_mode_defaults():
    sc = global_registry.resolve(SchemeDescriptor(family="polar-sc", params=SMALL_POLAR))
    scl_descriptor = SchemeDescriptor(family="polar-scl", params={"N": 64, "K": 38, "crc": "crc6",
                                                                  "design_snr_db": 2.0, "list_size": 4})
    scl = global_registry.resolve(scl_descriptor)
    assert resolve_all_zero(SchemeDescriptor(family="polar-sc"), sc) is True
    assert resolve_all_zero(scl_descriptor, scl) is False
    assert resolve_all_zero(SchemeDescriptor(family="polar-sc", all_zero=False), sc) is False
    with pytest.raises(ConfigError):
        resolve_all_zero(scl_descriptor.model_copy(update={"all_zero": True}), scl)


def test_polar_sc_with_crc_uses_random_payloads():
    descriptor = SchemeDescriptor(family="polar-sc", params={"N": 64, "K": 38, "crc": "crc6", "design_snr_db": 2.0})
    codec = global_registry.resolve(descriptor)
    assert codec.symmetric is False
    assert resolve_all_zero(descriptor, codec) is False
    with pytest.raises(ConfigError):
        resolve_all_zero(descriptor.model_copy(update={"all_zero": True}), codec)


def test_aed_design_snr_is_searched_by_default():
    assert AedParams(i_min=[14]).design_snr_db is None
    codec = global_registry.resolve(SchemeDescriptor(family="polar-aed",
                                                     params={"N": 64, "K": 32, "i_min": [14], "ensemble_size": 1}))
    assert codec.decoder.spec.design_snr_db == pytest.approx(design_ebn0_for_target(6, 32, 1e-6), abs=1e-5)


def test_sc_ldpc_scheme_is_all_zero_only():
    descriptor = SchemeDescriptor(
        family="sc-ldpc-wbp",
        params={"chain": {"chain_length": 6, "lifting_size": 5}, "window": {"window_size": 3}},
    )
    codec = global_registry.resolve(descriptor)
    assert codec.encode is None
    assert codec.decoder.name == "WBP-3"
    assert codec.code_length == 6 * 8 * 5
    assert resolve_all_zero(descriptor, codec) is True
    with pytest.raises(ConfigError):
        resolve_all_zero(descriptor.model_copy(update={"all_zero": False}), codec)


# --- runner --------------------------------------------------------------------------


def test_run_is_deterministic():
    cfg = _experiment()
    first = run_experiment(cfg, progress=False)
    second = run_experiment(cfg, progress=False)
    assert _strip_timing(first) == _strip_timing(second)


def test_run_respects_stop_rules():
    result = run_experiment(_experiment(), progress=False)
    assert result.scheme == "Polar SC"
    assert result.config["scheme"]["family"] == "polar-sc"
    for p in result.points:
        assert p.frames <= 200
        assert p.termination in ("min_frame_errors", "max_frames")
        if p.termination == "min_frame_errors":
            assert p.frame_errors >= 5
        else:
            assert p.frames == 200
        assert p.frame_errors <= p.bit_errors <= p.frame_errors * 32
        assert p.bits_total == p.frames * 32
        assert p.fer == p.frame_errors / p.frames
    # 1 dB is far below the waterfall of this code
    assert result.points[0].termination == "min_frame_errors"


def test_zero_frames_gives_empty_points():
    result = run_experiment(_experiment(stop=StopRule(max_frames=0)), progress=False)
    assert len(result.points) == 2
    for p in result.points:
        assert (p.frames, p.frame_errors, p.fer) == (0, 0, 0.0)
        assert p.termination == "max_frames"


def test_max_frames_not_multiple_of_batch():
    result = run_experiment(_experiment(snr_points=[6.0], stop=StopRule(min_frame_errors=1000, max_frames=37)),
                            progress=False)
    assert result.points[0].frames == 37


def test_random_message_run():
    cfg = _experiment(
        scheme=SchemeDescriptor(family="polar-scl", params={"N": 64, "K": 38, "crc": "crc6",
                                                            "design_snr_db": 2.0, "list_size": 4}),
        snr_points=[2.0],
        stop=StopRule(min_frame_errors=1000, max_frames=40),
    )
    result = run_experiment(cfg, progress=False)
    assert result.payload_bits == 32
    assert result.points[0].frames == 40
    assert result.points[0].termination == "max_frames"


def test_ldpc_run_records_iterations():
    cfg = _experiment(
        scheme=SchemeDescriptor(family="ldpc-bp", params={"code": "nr-bg2", "K": 128, "N": 256}),
        snr_points=[2.0],
        stop=StopRule(min_frame_errors=1000, max_frames=48),
    )
    result = run_experiment(cfg, progress=False)
    point = result.points[0]
    assert sum(point.iterations.values()) == point.frames == 48
    assert max(point.iterations) <= 8
    assert result.scheme == "LDPC 5G LBP-8"


def test_parallel_run_is_deterministic():
    cfg = _experiment(workers=2, snr_points=[2.0], stop=StopRule(min_frame_errors=20, max_frames=400))
    first = run_experiment(cfg, progress=False)
    second = run_experiment(cfg, progress=False)
    assert _strip_timing(first) == _strip_timing(second)
    assert first.config["workers"] == 2


# --- export --------------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_result():
    return run_experiment(_experiment(), progress=False)


def test_json_round_trip(tmp_path, small_result):
    path = export_json(small_result, tmp_path / "r.json")
    assert load_results(path) == [small_result]
    both = export_json([small_result, bound_result(64, 32, [1.0, 2.0])], tmp_path / "both.json")
    loaded = load_results(both)
    assert [r.kind for r in loaded] == ["simulation", "bound"]


def test_csv_layout(tmp_path, small_result):
    bound = bound_result(64, 32, [1.0, 2.0, 3.0])
    path = export_csv([small_result, bound], tmp_path / "r.csv")
    with path.open(newline="") as f:
        rows = list(csv.reader(f, strict=True))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 1 + len(small_result.points) + 3
    assert {row[-1] for row in rows[1:]} == {"simulation", "bound"}
    first = dict(zip(rows[0], rows[1]))
    assert int(first["frames"]) == small_result.points[0].frames
    assert float(first["fer"]) == small_result.points[0].fer


def test_csv_reload(tmp_path, small_result):
    path = export_csv(small_result, tmp_path / "r.csv")
    (loaded,) = load_results(path)
    assert loaded.scheme == small_result.scheme
    assert [p.frames for p in loaded.points] == [p.frames for p in small_result.points]
    assert loaded.fer == small_result.fer


def test_load_results_errors(tmp_path):
    with pytest.raises(ParseError):
        load_results(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_results(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"points": "many"}))
    with pytest.raises(ParseError):
        load_results(wrong)


# --- figures -------------------------------------------------------------------------


def test_render_requires_input(tmp_path):
    with pytest.raises(DomainError):
        render_figure([], tmp_path / "empty.svg")


def test_render_is_deterministic(tmp_path, small_result):
    bound = bound_result(64, 32, [1.0, 2.0, 3.0])
    refs = {"Polar SC": [(1.0, 0.5), (3.0, 0.02)]}
    a = render_figure([small_result], tmp_path / "a.svg", bound=bound, references=refs)
    b = render_figure([small_result], tmp_path / "b.svg", bound=bound, references=refs)
    text = a.read_text()
    assert text.startswith("<?xml") and "<svg" in text
    assert a.read_bytes() == b.read_bytes()


def test_render_two_point_series(tmp_path):
    result = SimResult(scheme="two", points=[
        PointResult.from_counts(1.0, 100, 50, 400, 32),
        PointResult.from_counts(2.0, 100, 5, 30, 32),
    ])
    path = render_figure([result], tmp_path / "two.svg", style=FigureStyle(metric="ber", title="BER"))
    assert path.stat().st_size > 0 and "<svg" in path.read_text()


# --- canned figures ------------------------------------------------------------------


def test_figure_plans_match_references():
    for figure in ("fig1", "fig2", "fig3"):
        plan = figure_plan(figure, quick=True)
        labels = {e.scheme.label for e in plan.experiments}
        assert set(plan.references) <= labels
        for experiment in plan.experiments:
            assert experiment.stop.max_frames <= 200


def test_fig1_ca_scl_carries_crc11():
    plan = figure_plan("fig1", quick=True)
    (scl,) = [e for e in plan.experiments if e.scheme.family == "polar-scl"]
    codec = global_registry.resolve(scl.scheme)
    assert (codec.code_length, codec.payload_bits) == (256, 117)
    assert codec.label == "Polar 5G CA-SCL-8"


def test_fig2_draws_a_ber_figure(tmp_path):
    plan = figure_plan("fig2", quick=True)
    assert plan.ber_references == reference_points("fig2_ber")
    assert (1.4, 2.334e-3) in plan.ber_references["Polar SC"]
    results = [
        SimResult(scheme=label, points=[PointResult.from_counts(1.4, 100, 20, 900, 32768),
                                        PointResult.from_counts(1.6, 100, 4, 60, 32768)])
        for label in ("Polar SC", "LDPC DVB-S2 LBP-8")
    ]
    bound = bound_result(65536, 32768, [0.1, 0.2, 0.3])
    fer_svg, ber_svg = render_plan(plan, results, tmp_path, bound=bound)
    assert fer_svg.name == "fig2.svg" and ber_svg.name == "fig2_ber.svg"
    text = ber_svg.read_text()
    for label in ("Polar SC", "LDPC DVB-S2 LBP-8", "Polar SC (ref.)", "LDPC DVB-S2 LBP-8 (ref.)", "BER"):
        assert f"<!-- {label} -->" in text
    assert f"<!-- {bound.scheme} -->" in fer_svg.read_text()
    assert f"<!-- {bound.scheme} -->" not in text
    assert render_plan(figure_plan("fig1", quick=True), results, tmp_path)[1] is None


def test_fig1_references():
    refs = reference_points("fig1")
    assert (4.0, 4.084e-4) in refs["Polar SC"]
    assert (3.5, 9.123e-4) in refs["LDPC 5G LBP-8"]


def test_unknown_figure():
    with pytest.raises(ConfigError):
        figure_plan("fig9")


@pytest.mark.slow
def test_fig1_polar_sc_point():
    cfg = ExperimentConfig(
        scheme=SchemeDescriptor(family="polar-sc", params={"N": 256, "K": 128}),
        snr_points=[3.0],
        stop=StopRule(min_frame_errors=100),
    )
    fer = run_experiment(cfg, progress=False).points[0].fer
    assert 1.533e-2 / 2 < fer < 1.533e-2 * 2
