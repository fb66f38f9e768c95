"""Fuchsian groups, Dirichlet domains and point reduction.

The Dirichlet domain centred at p is, in the disc chart at p, the set of
points lying outside every isometric circle ``|C w + D| = 1`` of the group.
Each isometric circle is orthogonal to the unit circle, so in the Klein
model it becomes the straight chord ``Re(k * conj(c)) = 1`` (c the circle's
centre) and the domain is a convex Euclidean polygon.  The combinatorics of
that polygon are found in double precision by half-plane clipping; vertex
coordinates are then recomputed at working precision from the exact group
elements bounding each vertex.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import ExactMatrix2
from .hyper import RealMatrix2, disc_matrix, from_disc
from .mpnum import Arith, DoubleArith, backend

log = logging.getLogger(__name__)

_DOUBLE = DoubleArith()


class DomainError(RuntimeError):
    pass


class ReductionError(RuntimeError):
    pass


@dataclass
class Element:
    """A group element with its numerical data in the disc chart at p."""

    exact: ExactMatrix2
    real: RealMatrix2
    disc: tuple
    centre: object  # centre of the isometric circle, -D/C

    @classmethod
    def build(cls, g: ExactMatrix2, p, ar: Arith) -> "Element":
        real = g.numeric_embed(ar)
        A, B, C, D = disc_matrix(real, p)
        if abs(C) == 0:
            raise DomainError(f"{g} fixes the centre p; choose a centre with trivial stabiliser")
        return cls(g, real, (A, B, C, D), -D / C)


class FuchsianGroup:
    """Group generated by exact matrices, with a chosen centre p.

    ``generators`` is augmented with inverses and deduplicated up to sign.
    """

    def __init__(self, generators, center, ar: Arith | None = None):
        self.ar = ar or backend()
        self.center = self.ar.cplx(center)
        seen = {}
        for g in generators:
            for h in (g, g.inverse()):
                if h.is_identity():
                    continue
                seen.setdefault(h.key(), h.canonical())
        self.generators: list[ExactMatrix2] = list(seen.values())
        self.elements = [Element.build(g, self.center, self.ar) for g in self.generators]
        self._check_stabiliser()

    def _check_stabiliser(self):
        tol = 10 * self.ar.tol(6)
        for el in self.elements:
            # |g(0)| in the disc chart, a monotone proxy for d(g p, p)
            if abs(el.disc[1] / el.disc[3]) <= tol:
                raise DomainError(f"generator {el.exact} fixes the centre p")

    def __len__(self):
        return len(self.generators)


@dataclass
class Side:
    start: int  # vertex index; the side runs from vertex start to start+1
    element: int  # index into DirichletDomain.pairing (None for open boundary)


@dataclass
class DirichletDomain:
    group: FuchsianGroup
    vertices: list  # disc chart at p, counterclockwise, working precision
    sides: list[Side]
    pairing: list[Element]
    rho: object
    converged: bool
    ideal: list[bool] = field(default_factory=list)
    open_boundary: bool = False
    area: float = float("nan")
    rounds: int = 0

    @property
    def center(self):
        return self.group.center

    @property
    def ar(self) -> Arith:
        return self.group.ar

    @property
    def cocompact(self) -> bool:
        return not self.open_boundary and not any(self.ideal)

    @property
    def pairing_elements(self) -> list[ExactMatrix2]:
        return [e.exact for e in self.pairing]

    def contains(self, w, tol: float | None = None) -> bool:
        """Dirichlet inequalities ``|w| <= |g w|`` for every pairing element."""
        tol = self.ar.tol(6) if tol is None else tol
        r = abs(w)
        for el in self.pairing:
            A, B, C, D = el.disc
            if abs((A * w + B) / (C * w + D)) < r - tol:
                return False
        return True

    def word_element(self, word) -> ExactMatrix2:
        g = ExactMatrix2.identity()
        for i in word:
            g = self.pairing[i].exact @ g
        return g

    def export(self) -> dict:
        ar = self.ar
        return {
            "center": [ar.fmt(self.center.real), ar.fmt(self.center.imag)],
            "rho": ar.fmt(self.rho),
            "converged": self.converged,
            "cocompact": self.cocompact,
            "area": self.area,
            "vertices": [[ar.fmt(v.real), ar.fmt(v.imag)] for v in self.vertices],
            "ideal": list(self.ideal),
            "sides": [
                {
                    "from": s.start,
                    "to": (s.start + 1) % len(self.vertices),
                    "element": None if s.element is None else s.element,
                }
                for s in self.sides
            ],
            "pairing_elements": [
                [str(x) for x in (e.exact.a, e.exact.b, e.exact.c, e.exact.d)] for e in self.pairing
            ],
        }


# ---------------------------------------------------------------------------
# Klein-model polygon clipping (double precision)

_START = [complex(1.5, -1.5), complex(1.5, 1.5), complex(-1.5, 1.5), complex(-1.5, -1.5)]
_CLIP_TOL = 1e-11
_MERGE_TOL = 1e-12


def _clip(poly, labels, c, label):
    vals = [(k * c.conjugate()).real - 1.0 for k in poly]
    inside = [v <= _CLIP_TOL for v in vals]
    if all(inside):
        return poly, labels, False
    if not any(inside):
        return [], [], True
    out, out_labels = [], []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        if inside[i]:
            out.append(poly[i])
            out_labels.append(labels[i])
            if not inside[j]:
                t = vals[i] / (vals[i] - vals[j])
                out.append(poly[i] + t * (poly[j] - poly[i]))
                out_labels.append(label)
        elif inside[j]:
            t = vals[i] / (vals[i] - vals[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
            out_labels.append(labels[i])
    # drop degenerate edges
    k = 0
    while len(out) > 2 and k < len(out):
        nxt = (k + 1) % len(out)
        if abs(out[k] - out[nxt]) < _MERGE_TOL:
            out_labels[k] = out_labels[nxt]
            del out[nxt]
            del out_labels[nxt]
        else:
            k += 1
    return out, out_labels, True


def _klein_polygon(centres: list[complex]):
    order = sorted(range(len(centres)), key=lambda i: 1.0 / abs(centres[i]))
    poly, labels = list(_START), [None] * 4
    for i in order:
        poly, labels, _ = _clip(poly, labels, centres[i], i)
        if not poly:
            raise DomainError("empty Dirichlet polygon")
    return poly, labels


def klein_to_disc(k, ar: Arith):
    r2 = (k * k.conjugate()).real
    if r2 >= 1:
        return k / ar.sqrt(r2)
    return k / (1 + ar.sqrt(1 - r2))


def disc_to_klein(w):
    return 2 * w / (1 + abs(w) ** 2)


def _line_intersection(c1, c2, ar: Arith):
    # Re(k conj c) = 1 for both chords: [x1 y1; x2 y2] [X; Y] = [1; 1]
    x1, y1, x2, y2 = c1.real, c1.imag, c2.real, c2.imag
    det = x1 * y2 - x2 * y1
    if det == 0:
        return None
    X = (y2 - y1) / det
    Y = (x1 - x2) / det
    return ar.cplx(X, Y)


def _interior_angle(v, prev, nxt, ar: Arith):
    # move v to the origin; geodesics through v become rays
    a = (prev - v) / (1 - v.conjugate() * prev)
    b = (nxt - v) / (1 - v.conjugate() * nxt)
    ang = abs(ar.arg(b / a))
    return ang


def _pairing_consistent(vertices_disc, labels, elements, keys_inv, tol=1e-7) -> bool:
    n = len(vertices_disc)
    side_of = {lab: i for i, lab in enumerate(labels)}
    for i, lab in enumerate(labels):
        if lab is None:
            return False
        partner = keys_inv.get(lab)
        if partner is None or partner not in side_of:
            return False
        j = side_of[partner]
        A, B, C, D = elements[lab].disc
        ends = [vertices_disc[i], vertices_disc[(i + 1) % n]]
        images = sorted(((A * e + B) / (C * e + D) for e in ends), key=lambda z: (round(z.real, 6), z.imag))
        target = sorted([vertices_disc[j], vertices_disc[(j + 1) % n]], key=lambda z: (round(z.real, 6), z.imag))
        if any(abs(x - y) > tol for x, y in zip(images, target)):
            return False
    return True


def compute_dirichlet_domain(
    group: FuchsianGroup,
    search_height: int = 8,
    require_cocompact: bool = True,
    max_elements: int = 10 ** 4,
    signature: tuple | None = None,
) -> DirichletDomain:
    """Dirichlet domain of ``group`` centred at ``group.center``.

    Starting from the generators, each round intersects the current set of
    half-planes, keeps the elements that bound a side and adds all pairwise
    products of them.  The domain is flagged ``converged`` once a round
    leaves the polygon unchanged and every side is carried by its pairing
    element onto its partner side.
    """
    ar = group.ar
    p_d = complex(group.center)
    gens = list(group.generators)
    pool: dict = {g.key(): g for g in gens}
    prev_vertices = None
    converged = False
    poly = labels = None
    elements: list[Element] = []
    rounds = 0
    for rounds in range(1, search_height + 1):
        keys = list(pool)
        elements = [Element.build(pool[k], p_d, _DOUBLE) for k in keys]
        centres = [e.centre for e in elements]
        poly, labels = _klein_polygon(centres)
        key_index = {k: i for i, k in enumerate(keys)}
        keys_inv = {}
        for lab in set(x for x in labels if x is not None):
            inv_key = pool[keys[lab]].inverse().key()
            keys_inv[lab] = key_index.get(inv_key)
        disc_vertices = [klein_to_disc(k, _DOUBLE) for k in poly]
        consistent = _pairing_consistent(disc_vertices, labels, elements, keys_inv)
        if prev_vertices is not None and len(prev_vertices) == len(poly) and consistent:
            if max(min(abs(a - b) for b in prev_vertices) for a in poly) < 1e-10:
                converged = True
                break
        prev_vertices = poly
        side_elems = [pool[keys[lab]] for lab in dict.fromkeys(x for x in labels if x is not None)]
        new = {g.key(): g for g in side_elems}
        for g in side_elems:
            h = g.inverse().canonical()
            new.setdefault(h.key(), h)
        base = list(new.values())
        partners = base + gens
        if any(x is None for x in labels):
            # open polygon: the sides alone cannot close it, grow words breadth first
            base = [pool[k] for k in keys]
            partners = gens + [g.inverse().canonical() for g in gens]
        for s in base:
            for t in partners:
                prod = s @ t
                if not prod.is_identity():
                    new.setdefault(prod.key(), prod.canonical())
        if len(new) > max_elements:
            raise DomainError(f"more than {max_elements} relevant isometric circles; group looks non-discrete")
        pool = new

    # side structure from the last polygon
    side_labels = list(dict.fromkeys(x for x in labels if x is not None))
    pairing = [Element.build(elements[lab].exact, group.center, ar) for lab in side_labels]
    pindex = {lab: i for i, lab in enumerate(side_labels)}
    n = len(poly)
    vertices = []
    for i in range(n):
        before, after = labels[i - 1], labels[i]
        v = None
        if before is not None and after is not None and before != after:
            v = _line_intersection(pairing[pindex[before]].centre, pairing[pindex[after]].centre, ar)
        if v is None:
            v = ar.cplx(poly[i].real, poly[i].imag)
        vertices.append(v)
    open_boundary = any(x is None for x in labels) or any(abs(k) > 1 + 1e-9 for k in poly)
    ideal = [abs(abs(k) - 1) <= 1e-9 for k in poly]
    disc_vertices = [klein_to_disc(v, ar) for v in vertices]
    sides = [Side(i, None if labels[i] is None else pindex[labels[i]]) for i in range(n)]
    rho = max(abs(v) for v in disc_vertices)
    if open_boundary:
        rho = ar.real(1)
    area = float("nan")
    if not open_boundary:
        angles = [
            0.0 if ideal[i] else float(_interior_angle(disc_vertices[i], disc_vertices[i - 1], disc_vertices[(i + 1) % n], ar))
            for i in range(n)
        ]
        area = (n - 2) * math.pi - sum(angles)
    dom = DirichletDomain(
        group=group,
        vertices=disc_vertices,
        sides=sides,
        pairing=pairing,
        rho=rho,
        converged=converged,
        ideal=ideal,
        open_boundary=open_boundary,
        area=area,
        rounds=rounds,
    )
    if open_boundary and require_cocompact:
        bad = [i for i, lab in enumerate(labels) if lab is None]
        raise DomainError(f"domain is unbounded: open boundary arc after vertex {bad[0] if bad else '?'}")
    if any(ideal) and require_cocompact:
        cusps = [i for i, x in enumerate(ideal) if x]
        raise DomainError(f"domain has ideal vertices {cusps} (cusps); set R explicitly and allow non-cocompact groups")
    if signature is not None:
        expected = signature_area(*signature)
        if not abs(area - expected) <= 1e-6 * expected:
            log.warning("domain area %.12g differs from the signature area %.12g", area, expected)
    log.info("Dirichlet domain: %d sides, rho=%s, converged=%s after %d rounds", n, float(rho), converged, rounds)
    return dom


def signature_area(genus: int, *orders) -> float:
    """Hyperbolic area 2 pi (2g - 2 + sum(1 - 1/m)) of a signature (g; m1, ...).

    An order of 0 stands for a cusp and contributes 1.
    """
    return 2 * math.pi * (2 * genus - 2 + sum(1 - 1 / m if m else 1 for m in orders))


# ---------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class ReductionOutput:
    w_prime: object
    g: RealMatrix2
    word: tuple
    w: object = None

    @property
    def word_length(self) -> int:
        return len(self.word)

    def exact(self, domain: DirichletDomain) -> ExactMatrix2:
        return domain.word_element(self.word)


class Reducer:
    """Greedy reduction into a Dirichlet domain.

    Repeatedly applies the pairing element that brings the point closest to
    the centre, as long as that gains more than ``tol``; ties go to the
    lowest index.
    """

    max_steps = 10 ** 4

    def __init__(self, domain: DirichletDomain, tol: float | None = None):
        self.domain = domain
        self.ar = domain.ar
        self.tol = self.ar.tol(6) if tol is None else tol
        self._double = isinstance(self.ar, DoubleArith)
        if self._double and domain.pairing:
            disc = np.array([e.disc for e in domain.pairing], dtype=complex)
            self._A, self._B, self._C, self._D = disc.T

    def _step_double(self, w):
        num = self._A * w + self._B
        den = self._C * w + self._D
        images = num / den
        r = np.abs(images)
        i = int(np.argmin(r))
        return i, images[i], r[i]

    def _step_generic(self, w):
        best = None
        for i, el in enumerate(self.domain.pairing):
            A, B, C, D = el.disc
            img = (A * w + B) / (C * w + D)
            r = abs(img)
            if best is None or r < best[2]:
                best = (i, img, r)
        return best

    def __call__(self, w) -> ReductionOutput:
        ar = self.ar
        w0 = w
        step = self._step_double if self._double else self._step_generic
        word = []
        g = RealMatrix2(ar.real(1), ar.real(0), ar.real(0), ar.real(1))
        r = abs(w)
        if not self.domain.pairing:
            return ReductionOutput(w, g, (), w0)
        for _ in range(self.max_steps):
            i, img, ri = step(w)
            if not ri < r - self.tol:
                return ReductionOutput(w, g, tuple(word), w0)
            w, r = img, ri
            word.append(i)
            g = self.domain.pairing[i].real @ g
        raise ReductionError(f"reduction of {w0} did not terminate in {self.max_steps} steps")


def reduce_point(domain: DirichletDomain, w) -> ReductionOutput:
    return Reducer(domain)(w)
