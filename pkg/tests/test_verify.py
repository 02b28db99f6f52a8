from dataclasses import replace

import pytest

from qrb.artifact import BuildInfo
from qrb.backends import demo12, heavy_hex27
from qrb.qasm import emit_source
from qrb.stego import leaky_plugin
from qrb.tamper import TamperSpec, apply_tamper, ghz_circuit
from qrb.transpile.pipeline import PipelineConfig, build
from qrb.verify import Status, Verdict, compare, diff_lines, first_diff_offset, structural_diff, verify_build

SRC = emit_source(ghz_circuit(4))


@pytest.fixture(scope="module")
def honest():
    cfg = PipelineConfig.default(demo12(), 11)
    art, info, _ = build(SRC, cfg)
    return cfg, art, info


def test_first_diff_offset():
    assert first_diff_offset(b"abc", b"abc") is None
    assert first_diff_offset(b"abc", b"abd") == 2
    assert first_diff_offset(b"ab", b"abc") == 2


def test_diff_lines_insert_delete_replace():
    a = b"x\ny\nz\n"
    assert diff_lines(a, a) == []
    (d,) = diff_lines(a, b"x\ny\nw\nz\n")
    assert (d.expected, d.actual) == (None, "w")
    (d,) = diff_lines(a, b"x\nz\n")
    assert (d.line, d.expected, d.actual) == (2, "y", None)
    (d,) = diff_lines(a, b"x\nY\nz\n")
    assert (d.line, d.expected, d.actual) == (2, "y", "Y")


def test_verdict_invariant():
    v = compare(b"a", b"b")
    assert v.status is Status.NON_REPRODUCIBLE and v.first_diff_offset == 0
    assert compare(b"a", b"a") == Verdict(Status.REPRODUCIBLE)
    assert [s.exit_code for s in Status] == [0, 2, 1]


def test_honest_reproducible(honest):
    _, art, info = honest
    v = verify_build(SRC, info.to_bytes(), art.data)
    assert v.status is Status.REPRODUCIBLE and v.exit_code == 0 and v.first_diff_offset is None


def test_backend_matched_by_hash(honest):
    _, art, info = honest
    assert verify_build(SRC, info, art.data, demo12()).status is Status.REPRODUCIBLE
    assert verify_build(SRC, info, art.data, heavy_hex27()).status is Status.BUILD_ERROR
    unknown = replace(info, backend_sha256="0" * 64)
    assert verify_build(SRC, unknown, art.data).status is Status.BUILD_ERROR


def test_source_mismatch(honest):
    _, art, info = honest
    assert verify_build(SRC + "h q[0];\n", info, art.data).status is Status.BUILD_ERROR


def test_unknown_plugin_is_build_error(honest):
    cfg, art, _ = honest
    leaky_art, leaky_info, _ = build(SRC, cfg.replace_plugin(leaky_plugin("layout", b"x")))
    v = verify_build(SRC, leaky_info, leaky_art.data)
    assert v.status is Status.BUILD_ERROR and "leaky" in v.message


def test_garbage_buildinfo(honest):
    _, art, _ = honest
    assert verify_build(SRC, b"not a buildinfo\n", art.data).status is Status.BUILD_ERROR


@pytest.mark.parametrize("channel", ["layout", "init", "scheduling"])
def test_stego_artifact_detected(honest, channel):
    cfg, art, info = honest
    leaky, _, _ = build(SRC, cfg.replace_plugin(leaky_plugin(channel, b"k", 2)))
    v = verify_build(SRC, info, leaky.data)
    assert v.status is Status.NON_REPRODUCIBLE and v.first_diff_offset is not None
    changed = [d for d in v.diff_lines]
    if channel == "layout":
        assert changed[0].line == 3 and changed[0].expected.startswith("layout ")
    elif channel == "init":
        inserted = [d.actual for d in changed if d.expected is None]
        anc = inserted[0].split()[1]
        assert inserted and all(ln.split()[1] == anc for ln in inserted)
        assert {ln.split()[0] for ln in inserted} == {"reset", "rz"}
        assert all(d.line == 3 for d in changed if d.expected is not None)
    else:
        for d in changed:
            e, a = d.expected.split(), d.actual.split()
            assert e[0] == a[0] == "rz" and e[1] == a[1] and e[3:] == a[3:] and e[2] != a[2]


@pytest.mark.parametrize("spec", ["reset@last-measure", "retarget@last-cz", "reset@5"])
def test_tamper_detected_at_the_edited_line(honest, spec):
    _, art, info = honest
    t = apply_tamper(art, TamperSpec.parse(spec), demo12())
    v = verify_build(SRC, info, t.data)
    assert v.status is Status.NON_REPRODUCIBLE
    assert len(structural_diff(art.data, t.data)) == 1


def test_buildinfo_drift_noted(honest):
    _, art, info = honest
    drifted = BuildInfo.from_bytes(info.to_bytes().replace(info.artifact_sha256.encode(), b"f" * 64))
    v = verify_build(SRC, drifted, art.data)
    assert v.status is Status.REPRODUCIBLE and "buildinfo differs" in v.message
