import json
import math
import re
from fractions import Fraction
from pathlib import Path

import pytest

from mfseries.arith import QuadExt, QuaternionAlgebraQ, QuaternionElement
from mfseries.cli import domain_svg, main
from mfseries.config import (
    ConfigError,
    eval_exact,
    eval_numeric,
    eval_quaternion,
    load_config,
    parse_hecke_file,
)
from mfseries.mpnum import backend

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
DISC6 = CONFIGS / "disc6_weight4.cfg"


def test_eval_numeric():
    ar = backend()
    z = eval_numeric("(sqrt(6) - sqrt(2))/2 * i", ar)
    assert abs(z - 1j * (math.sqrt(6) - math.sqrt(2)) / 2) < 1e-15
    assert abs(eval_numeric("(-9 + sqrt(-7))/22", ar) - complex(-9, math.sqrt(7)) / 22) < 1e-15
    assert abs(eval_numeric("2^10 - pi", ar) - (1024 - math.pi)) < 1e-12
    with pytest.raises(ConfigError):
        eval_numeric("__import__('os')", ar)
    with pytest.raises(ConfigError):
        eval_numeric("exp(1)", ar)


def test_eval_exact():
    assert eval_exact("(1 + sqrt(12))/2") == QuadExt(Fraction(1, 2), Fraction(1), 3)
    assert eval_exact("3/4 - 1") == QuadExt(Fraction(-1, 4))
    with pytest.raises(ConfigError):
        eval_exact("sqrt(2.5)")
    with pytest.raises(ConfigError):
        eval_exact("pi")


def test_eval_quaternion():
    alg = QuaternionAlgebraQ(3, -1)
    q = eval_quaternion("(1 + alpha + beta + alpha*beta)/2", alg)
    half = Fraction(1, 2)
    assert q == QuaternionElement(half, half, half, half)
    with pytest.raises(ConfigError):
        eval_quaternion("gamma", alg)


def test_load_shipped_configs():
    cfg = load_config(DISC6)
    assert cfg.group == "quaternion" and cfg.weight == 4 and cfg.N == 35
    assert cfg.signature == (0, 2, 2, 3, 3)
    g11 = load_config(CONFIGS / "gamma0_11.cfg")
    assert [h.label for h in g11.hecke] == ["T2", "T3", "T5", "T7", "T13"]
    assert all(h.classical for h in g11.hecke)


@pytest.mark.parametrize(
    "text, message",
    [
        ("group = quaternion\nfoo bar\n", "expected 'key = value'"),
        ("group = generators\ncenter = i\n", "missing required key 'weight'"),
        ("group = generators\ncenter = i\nweight = 3\nN = 5\ngenerators = 1,1,0,1\n", "positive even"),
        ("group = generators\ncenter = i\nweight = 2\nN = 5\ngenerators = 1,1,0,1\nbogus = 1\n", "unknown keys"),
        ("group = generators\ncenter = i\nweight = 2\nN = 5\ngenerators = 1,1,0,1\nN = 6\n", "duplicate key"),
        ("group = generators\ncenter = i\nweight = 2\nN = 5\ngenerators = 1,1,0\n", "four entries"),
        ("group = generators\ncenter = i\nweight = 2\nN = 5\ngenerators = 1,1,0,1\ninclude = nope.txt\n",
         "does not exist"),
    ],
)
def test_config_errors(tmp_path, text, message):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError, match=message):
        load_config(p)


def test_hecke_file_grammar(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("# comment\nT2 | 1, 0, 0, 2 | -2\nT2 | 2, 0, 0, 1 | -2\nT3 | classical | -1\n")
    specs = parse_hecke_file(p)
    assert [(s.label, len(s.cosets), s.classical) for s in specs] == [("T2", 2, False), ("T3", 0, True)]
    assert specs[1].prime == 3
    p.write_text("T2 | 1, 0, 0, 2 | -2\nT2 | 2, 0, 0, 1 | 3\n")
    with pytest.raises(ConfigError, match="inconsistent"):
        parse_hecke_file(p)
    p.write_text("T2 | 1, 0, 2 | -2\n")
    with pytest.raises(ConfigError, match=":1:"):
        parse_hecke_file(p)


def test_malformed_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("group = quaternion\nthis is not a pair\n")
    assert main(["compute", str(p), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "config error" in err and "bad.cfg:2" in err


@pytest.fixture(scope="module")
def disc6_runs(tmp_path_factory):
    outs = []
    for name in ("a", "b"):
        out = tmp_path_factory.mktemp(name)
        code = main(["compute", str(DISC6), "--out", str(out)])
        outs.append((code, out))
    return outs


def test_compute_disc6(disc6_runs):
    code, out = disc6_runs[0]
    assert code == 0
    data = json.loads((out / "result.json").read_text())
    assert list(data)[:3] == ["status", "precision_digits", "rho"]
    assert data["status"] == "ok" and data["N"] == 35 and data["Q"] == 70
    assert data["checks"]["reference"]["pass"]
    c = [complex(float(re_), float(im)) for re_, im in data["c"][:5]]
    for got, want in zip(c, (1, 0, 5, 0, -67.5)):
        assert abs(got - want) < 1e-6
    assert (out / "domain.svg").exists() and (out / "run.log").read_text()


def test_compute_is_deterministic(disc6_runs):
    (_, a), (_, b) = disc6_runs
    ja = json.loads((a / "result.json").read_text())
    jb = json.loads((b / "result.json").read_text())
    assert ja["coefficients"] == jb["coefficients"]


def test_verify_round_trip(disc6_runs):
    _, out = disc6_runs[0]
    assert main(["verify", str(DISC6), str(out / "result.json")]) == 0


def test_domain_svg_vertex_order(disc6_domain, tmp_path):
    svg = domain_svg(disc6_domain, disc6_domain.rho)
    found = re.findall(r'data-index="(\d+)" cx="([-\d.]+)" cy="([-\d.]+)"', svg)
    assert [int(i) for i, _, _ in found] == list(range(len(disc6_domain.vertices)))
    for (_, x, y), v in zip(found, disc6_domain.vertices):
        v = complex(v)
        assert abs(float(x) - (240 + 228 * v.real)) < 1e-3
        assert abs(float(y) - (240 - 228 * v.imag)) < 1e-3
    assert 'class="quadrature"' in svg

    assert main(["domain", str(DISC6), "--out", str(tmp_path)]) == 0
    exp = json.loads((tmp_path / "domain.json").read_text())
    assert len(exp["vertices"]) == len(disc6_domain.vertices)
