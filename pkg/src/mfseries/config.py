"""Run configuration: flat ``key = value`` text with an ``include`` directive.

Values that denote numbers are small expressions evaluated by a restricted
AST walker.  Allowed: integers, decimals, ``+ - * / **``, parentheses,
``sqrt(n)``, ``i``, ``pi``, ``omega(d, h)`` (Chowla-Selberg period) and, in
quaternion order bases, ``alpha`` and ``beta``.

Hecke files hold one coset per line::

    label | a, b, c, d | eigenvalue
    label | classical   | eigenvalue

``classical`` expands to the cosets (1 j; 0 p), (p 0; 0 1) of the prime
``p`` read from the label (e.g. ``T3``), and the eigenvalue is the usual
``a_p`` of the q-expansion.  For explicit matrices the eigenvalue refers to
``f -> sum_i j(pi_i, z)^-k f(pi_i z)`` with det-1 normalised cosets.
"""

from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import ExactMatrix2, QuadExt, QuaternionAlgebraQ, QuaternionElement
from .mpnum import Arith


class ConfigError(ValueError):
    def __init__(self, msg: str, source: str | None = None, line: int | None = None):
        where = f"{source}:{line}: " if source and line else (f"{source}: " if source else "")
        super().__init__(where + msg)


# ---------------------------------------------------------------------------
# expressions

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _parse(text: str) -> ast.AST:
    text = text.replace("^", "**")
    try:
        return ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}") from exc


def _num_literal(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return node.value
    return None


def eval_numeric(text: str, ar: Arith):
    """Evaluate an expression to a working-precision real or complex number."""

    def walk(node):
        lit = _num_literal(node)
        if lit is not None:
            return ar.real(str(lit)) if isinstance(lit, float) else ar.real(lit)
        if isinstance(node, ast.Name):
            if node.id == "i":
                return ar.cplx(0, 1)
            if node.id == "pi":
                return ar.pi
            raise ConfigError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Pow):
                k = _num_literal(node.right)
                if isinstance(k, int):
                    return left ** k
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            args = [walk(a) for a in node.args]
            if node.func.id == "sqrt" and len(args) == 1:
                x = args[0]
                if getattr(x, "imag", 0) == 0 and x.real < 0:
                    return ar.cplx(0, 1) * ar.sqrt(-x.real)
                return ar.sqrt(x)
            if node.func.id == "omega" and len(args) == 2:
                from .analysis import chowla_selberg_omega

                return chowla_selberg_omega(int(args[0]), int(args[1]), ar)
            raise ConfigError(f"unsupported function {node.func.id!r}")
        raise ConfigError(f"unsupported syntax in expression: {ast.dump(node)}")

    return walk(_parse(text))


def eval_exact(text: str) -> QuadExt:
    """Evaluate ``rat +- rat*sqrt(n)`` style expressions exactly."""

    def walk(node):
        lit = _num_literal(node)
        if lit is not None:
            return QuadExt.coerce(Fraction(str(lit)))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            if isinstance(node.op, ast.Pow):
                k = _num_literal(node.right)
                if not isinstance(k, int) or k < 0:
                    raise ConfigError("exact powers need a nonnegative integer exponent")
                return walk(node.left) ** k
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
            (arg,) = node.args
            n = _num_literal(arg)
            if n is None and isinstance(arg, ast.UnaryOp):
                inner = _num_literal(arg.operand)
                n = -inner if inner is not None else None
            if not isinstance(n, int) or n < 0:
                raise ConfigError("exact sqrt needs a nonnegative integer literal")
            return QuadExt.sqrt(n)
        raise ConfigError(f"unsupported syntax in exact expression: {ast.dump(node)}")

    return walk(_parse(text))


def eval_quaternion(text: str, alg: QuaternionAlgebraQ) -> QuaternionElement:
    def as_q(v):
        if isinstance(v, QuaternionElement):
            return v
        return QuaternionElement(Fraction(v))

    def walk(node):
        lit = _num_literal(node)
        if lit is not None:
            return Fraction(str(lit))
        if isinstance(node, ast.Name):
            if node.id == "alpha":
                return QuaternionElement(0, 1)
            if node.id == "beta":
                return QuaternionElement(0, 0, 1)
            raise ConfigError(f"unknown name {node.id!r} in quaternion expression")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            v = walk(node.operand)
            return -v
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return as_q(left) + as_q(right)
            if isinstance(node.op, ast.Sub):
                return as_q(left) - as_q(right)
            if isinstance(node.op, ast.Mult):
                if not isinstance(left, QuaternionElement):
                    return as_q(right).scale(left) if isinstance(right, QuaternionElement) else left * right
                if not isinstance(right, QuaternionElement):
                    return left.scale(right)
                return left.mul(right, alg)
            if isinstance(node.op, ast.Div):
                if isinstance(right, QuaternionElement):
                    raise ConfigError("division by a quaternion is not supported")
                return left.scale(1 / Fraction(right)) if isinstance(left, QuaternionElement) else Fraction(left) / right
        raise ConfigError(f"unsupported syntax in quaternion expression: {ast.dump(node)}")

    return as_q(walk(_parse(text)))


# ---------------------------------------------------------------------------
# configuration


@dataclass
class HeckeSpec:
    label: str
    eigenvalue: str
    cosets: list = field(default_factory=list)  # list of 4-tuples of expressions
    classical: bool = False

    @property
    def prime(self) -> int:
        m = re.search(r"\d+", self.label)
        if not m:
            raise ConfigError(f"cannot read a prime from Hecke label {self.label!r}")
        return int(m.group())


@dataclass
class RunConfig:
    group: str
    center: str
    weight: int
    digits: int = 15
    N: int | None = None
    epsilon: float | None = None
    Q: int | None = None
    R: str | None = None
    eval_radius: str | None = None
    quadrature: str = "simpson"
    method: str = "lu"
    seed: int = 0
    quat_a: int | None = None
    quat_b: int | None = None
    quat_basis: list = field(default_factory=list)
    quat_height: int = 1
    generators: list = field(default_factory=list)
    signature: tuple | None = None
    search_height: int = 8
    hecke: list = field(default_factory=list)
    expected_dim: int | None = None
    normalize_cm: bool = False
    theta: str | None = None
    periods: list = field(default_factory=list)
    hyperelliptic_h: str | None = None
    reference: str | None = None
    reference_tol: float = 1e-11
    oracle: str | None = None
    oracle_terms: int = 10
    oracle_M: int = 2000
    oracle_tol: float = 1e-6
    automorphy_points: int = 0
    automorphy_tol: float = 1e-8
    hecke_tol: float = 1e-6
    source: str | None = None
    raw: dict = field(default_factory=dict)

    def validate(self):
        if self.group not in ("quaternion", "generators"):
            raise ConfigError(f"group must be 'quaternion' or 'generators', got {self.group!r}", self.source)
        if self.weight <= 0 or self.weight % 2:
            raise ConfigError("weight must be a positive even integer", self.source)
        if self.digits < 15:
            raise ConfigError("digits must be at least 15", self.source)
        if self.N is None and self.epsilon is None:
            raise ConfigError("give N or N = auto with epsilon", self.source)
        if self.N is not None and self.N < 1:
            raise ConfigError("N must be positive", self.source)
        if self.quadrature not in ("simpson", "riemann"):
            raise ConfigError("quadrature must be simpson or riemann", self.source)
        if self.method not in ("lu", "svd"):
            raise ConfigError("method must be lu or svd", self.source)
        if self.group == "quaternion" and (self.quat_a is None or self.quat_b is None or len(self.quat_basis) != 4):
            raise ConfigError("quaternion groups need quaternion.a, quaternion.b and a 4-element basis", self.source)
        if self.group == "generators" and not self.generators:
            raise ConfigError("explicit groups need at least one generator", self.source)
        return self


_LINE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$")


def _read_pairs(path: Path, seen: set) -> list[tuple[str, str, str, int]]:
    if path in seen:
        raise ConfigError("recursive include", str(path))
    seen.add(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc}", str(path)) from exc
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {line!r}", str(path), lineno)
        out.append((m.group(1), m.group(2), str(path), lineno))
    return out


def parse_hecke_file(path: Path) -> list[HeckeSpec]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read Hecke file: {exc}", str(path)) from exc
    specs: dict[str, HeckeSpec] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3 or not parts[0]:
            raise ConfigError("expected 'label | a, b, c, d | eigenvalue'", str(path), lineno)
        label, mat, ev = parts
        spec = specs.setdefault(label, HeckeSpec(label, ev))
        if spec.eigenvalue.replace(" ", "") != ev.replace(" ", ""):
            raise ConfigError(f"inconsistent eigenvalue for {label}", str(path), lineno)
        if mat == "classical":
            spec.classical = True
            spec.prime  # noqa: B018 - validates the label
        else:
            entries = [e.strip() for e in mat.split(",")]
            if len(entries) != 4:
                raise ConfigError("a coset needs four entries", str(path), lineno)
            for e in entries:
                eval_exact(e)
            spec.cosets.append(tuple(entries))
    return list(specs.values())


def _as_bool(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    pairs = _read_pairs(path, set())
    kv: dict[str, str] = {}
    hecke: list[HeckeSpec] = []
    for key, value, src, lineno in pairs:
        if key == "include":
            inc = (Path(src).parent / value).resolve()
            if not inc.exists():
                raise ConfigError(f"included file {value!r} does not exist", src, lineno)
            hecke.extend(parse_hecke_file(inc))
            continue
        if key in kv:
            raise ConfigError(f"duplicate key {key!r}", src, lineno)
        kv[key] = value
    known = {
        "group", "center", "weight", "digits", "N", "epsilon", "Q", "R", "eval_radius", "quadrature", "method", "seed",
        "quaternion.a", "quaternion.b", "quaternion.basis", "quaternion.height", "generators", "signature",
        "search_height", "expected_dim", "normalize_cm", "theta", "periods", "hyperelliptic.h_result",
        "check.reference", "check.reference_tol", "check.oracle", "check.oracle_terms", "check.oracle_M",
        "check.oracle_tol", "verify.automorphy_points", "verify.automorphy_tol", "verify.hecke_tol",
    }
    unknown = sorted(set(kv) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}", str(path))
    for req in ("group", "center", "weight"):
        if req not in kv:
            raise ConfigError(f"missing required key {req!r}", str(path))
    try:
        cfg = RunConfig(group=kv["group"], center=kv["center"], weight=int(kv["weight"]), source=str(path), raw=kv)
        cfg.digits = int(kv.get("digits", 15))
        n = kv.get("N")
        if n is not None and n != "auto":
            cfg.N = int(n)
        if "epsilon" in kv:
            cfg.epsilon = float(kv["epsilon"])
        cfg.Q = int(kv["Q"]) if "Q" in kv else None
        cfg.R = kv.get("R")
        cfg.eval_radius = kv.get("eval_radius")
        cfg.quadrature = kv.get("quadrature", cfg.quadrature)
        cfg.method = kv.get("method", cfg.method)
        cfg.seed = int(kv.get("seed", 0))
        if "quaternion.a" in kv:
            cfg.quat_a = int(kv["quaternion.a"])
            cfg.quat_b = int(kv["quaternion.b"])
            cfg.quat_basis = [s.strip() for s in kv.get("quaternion.basis", "").split(";") if s.strip()]
            cfg.quat_height = int(kv.get("quaternion.height", 1))
        if "generators" in kv:
            gens = []
            for chunk in kv["generators"].split(";"):
                entries = [e.strip() for e in chunk.split(",")]
                if len(entries) != 4:
                    raise ConfigError(f"generator {chunk!r} needs four entries", str(path))
                gens.append(tuple(entries))
            cfg.generators = gens
        if "signature" in kv:
            g, _, orders = kv["signature"].partition(";")
            cfg.signature = (int(g), *[int(x) for x in orders.split(",") if x.strip()])
        cfg.search_height = int(kv.get("search_height", 8))
        cfg.expected_dim = int(kv["expected_dim"]) if "expected_dim" in kv else None
        cfg.normalize_cm = _as_bool(kv.get("normalize_cm", "false"))
        cfg.theta = kv.get("theta")
        if "periods" in kv:
            cfg.periods = [tuple(int(v) for v in pr.split("-")) for pr in kv["periods"].split(";") if pr.strip()]
        cfg.hyperelliptic_h = kv.get("hyperelliptic.h_result")
        cfg.reference = kv.get("check.reference")
        cfg.reference_tol = float(kv.get("check.reference_tol", cfg.reference_tol))
        cfg.oracle = kv.get("check.oracle")
        cfg.oracle_terms = int(kv.get("check.oracle_terms", cfg.oracle_terms))
        cfg.oracle_M = int(kv.get("check.oracle_M", cfg.oracle_M))
        cfg.oracle_tol = float(kv.get("check.oracle_tol", cfg.oracle_tol))
        cfg.automorphy_points = int(kv.get("verify.automorphy_points", 0))
        cfg.automorphy_tol = float(kv.get("verify.automorphy_tol", cfg.automorphy_tol))
        cfg.hecke_tol = float(kv.get("verify.hecke_tol", cfg.hecke_tol))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value: {exc}", str(path)) from exc
    cfg.hecke = hecke
    return cfg.validate()


def build_generators(cfg: RunConfig) -> list[ExactMatrix2]:
    from .arith import OrderQ, embed_unit, enumerate_norm_one_units

    if cfg.group == "quaternion":
        alg = QuaternionAlgebraQ(cfg.quat_a, cfg.quat_b)
        basis = tuple(eval_quaternion(b, alg) for b in cfg.quat_basis)
        order = OrderQ(alg, basis)
        return [embed_unit(u, alg) for u in enumerate_norm_one_units(order, cfg.quat_height)]
    gens = []
    for entries in cfg.generators:
        gens.append(ExactMatrix2(*(eval_exact(e) for e in entries)))
    return gens


__all__ = [
    "ConfigError",
    "HeckeSpec",
    "RunConfig",
    "build_generators",
    "eval_exact",
    "eval_numeric",
    "eval_quaternion",
    "load_config",
    "parse_hecke_file",
]
