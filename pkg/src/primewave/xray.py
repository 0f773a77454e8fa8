"""Level-curve topography of zeta: thick lines (Im zeta = 0) and thin lines (Re zeta = 0).

The grid is evaluated in row blocks and contoured with marching squares.  Edge
crossings carry global keys so segments from different blocks link into the
same polylines; every vertex is then Newton-polished along its grid edge.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .wheel import SeqId
from .zeta import zeta_array, zeta_grid, zeta_prime_array

THICK = "thick"
THIN = "thin"
T_FLOOR = 1e-6          # row t = 0 is sampled just above the real axis
VERTEX_TOL = 1e-8
LN2 = math.log(2)
FAMILY_SPACING = math.pi / LN2

# published line labels the measured topography is compared against
REFERENCE_SQ3_ESCAPING = (3, 9, 69, 75, 81, 123, 129, 135, 171, 207, 237, 273, 393, 417, 423,
                          501, 525, 579, 603, 657, 675, 705, 729, 777, 783, 789, 801, 849, 873,
                          945, 953)
REFERENCE_SQ1_ESCAPING = (17, 29, 41, 53)
REFERENCE_NON_ESCAPING = (71, 127)
REFERENCE_PARALLEL = (97, 113, 103)
VACUITY_NOTE = ("SQ1, SQ2 and SQ3 together contain every odd integer, so any odd label "
                "belongs to one of them; the measured content is which odd labels escape.")


@dataclass(frozen=True)
class GridSpec:
    sigma_lo: float
    sigma_hi: float
    t_lo: float
    t_hi: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.sigma_lo < self.sigma_hi and self.t_lo < self.t_hi):
            raise DomainError("grid needs sigma_lo < sigma_hi and t_lo < t_hi")
        if self.nx < 8 or self.ny < 8:
            raise DomainError("grid needs at least 8 samples per axis")
        if self.t_lo < 0:
            raise DomainError("only the upper half plane is traced")
        if self.sigma_lo < -2:
            raise DomainError("grid must stay in Re(s) >= -2")

    @classmethod
    def from_steps(cls, sigma_lo, sigma_hi, t_lo, t_hi, dsigma=0.01, dt=0.005):
        nx = int(round((sigma_hi - sigma_lo) / dsigma)) + 1
        ny = int(round((t_hi - t_lo) / dt)) + 1
        return cls(sigma_lo, sigma_hi, t_lo, t_hi, max(nx, 8), max(ny, 8))

    @property
    def sigmas(self) -> np.ndarray:
        return np.linspace(self.sigma_lo, self.sigma_hi, self.nx)

    @property
    def ts(self) -> np.ndarray:
        t = np.linspace(self.t_lo, self.t_hi, self.ny)
        return np.maximum(t, T_FLOOR)

    @property
    def dsigma(self) -> float:
        return (self.sigma_hi - self.sigma_lo) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return (self.t_hi - self.t_lo) / (self.ny - 1)

    def pole_cell(self) -> tuple[int, int] | None:
        """Cell (row, col) holding s = 1, if the grid reaches down to the real axis."""
        if self.t_lo > self.dt or not (self.sigma_lo < 1 <= self.sigma_hi):
            return None
        c = min(int(math.ceil((1 - self.sigma_lo) / self.dsigma - 1e-9)) - 1, self.nx - 2)
        return (0, max(c, 0))


@dataclass
class Field:
    spec: GridSpec
    values: np.ndarray                      # (ny, nx) complex
    masked: list[tuple[int, int]]
    zero_cells: list[tuple[int, int, complex]] = field(default_factory=list)


def _rows(spec: GridSpec, r0: int, r1: int, workers: int = 1, block: int = 2048) -> np.ndarray:
    ts = spec.ts[r0:r1]
    chunks = [ts[i:i + block] for i in range(0, len(ts), block)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda c: zeta_grid(spec.sigmas, c), chunks))
    else:
        parts = [zeta_grid(spec.sigmas, c) for c in chunks]
    return np.concatenate(parts)


def _both_change(vals: np.ndarray) -> np.ndarray:
    out = None
    for comp in (vals.real, vals.imag):
        p = comp > 0
        ch = ((p[:-1, :-1] != p[:-1, 1:]) | (p[1:, :-1] != p[1:, 1:])
              | (p[:-1, :-1] != p[1:, :-1]) | (p[:-1, 1:] != p[1:, 1:]))
        out = ch if out is None else out & ch
    return out


def _refine_zero_cells(spec, vals, r0):
    """Cells where both Re and Im change sign: re-sample at 2x (cell centre) to localise zeros."""
    rr, cc = np.nonzero(_both_change(vals))
    if not len(rr):
        return []
    sig = spec.sigmas[cc] + spec.dsigma / 2
    t = spec.ts[rr + r0] + spec.dt / 2
    mid = zeta_array(sig + 1j * t)
    return [(int(r + r0), int(c), complex(m)) for r, c, m in zip(rr, cc, mid)]


def sample_grid(spec: GridSpec, workers: int = 1) -> Field:
    """zeta at every grid node; the cell holding the pole is masked."""
    vals = _rows(spec, 0, spec.ny, workers)
    pc = spec.pole_cell()
    masked = [pc] if pc else []
    return Field(spec, vals, masked, _refine_zero_cells(spec, vals, 0))


# --------------------------------------------------------------- contouring

def _component(vals, parity):
    return vals.imag if parity == THICK else vals.real


def _march(spec, f, r0, parity, masked):
    """Segments (pairs of global edge keys) for the cells of rows r0 .. r0+len(f)-2.

    Returns (segments, gaps).  Saddle cells are resolved by evaluating zeta at the
    cell centre; a centre value indistinguishable from zero is a gap.
    """
    nx = spec.nx
    nan = np.isnan(f)
    pos = f > 0
    bot = pos[:-1, :-1] != pos[:-1, 1:]
    top = pos[1:, :-1] != pos[1:, 1:]
    lef = pos[:-1, :-1] != pos[1:, :-1]
    rig = pos[:-1, 1:] != pos[1:, 1:]
    dead = nan[:-1, :-1] | nan[:-1, 1:] | nan[1:, :-1] | nan[1:, 1:]
    for (mr, mc) in masked:
        if r0 <= mr < r0 + f.shape[0] - 1:
            dead[mr - r0, mc] = True
    cnt = bot.astype(np.int8) + top + lef + rig
    cnt[dead] = 0
    R, C = np.meshgrid(np.arange(f.shape[0] - 1) + r0, np.arange(nx - 1), indexing="ij")
    base = (R.astype(np.int64) * nx + C) << 1
    kb = base
    kt = base + (nx << 1)
    kl = base | 1
    kr = (base + 2) | 1
    keys = np.stack([kb, kr, kt, kl], axis=-1)
    flags = np.stack([bot, rig, top, lef], axis=-1)

    two = cnt == 2
    sel = flags[two]
    k2 = keys[two][sel].reshape(-1, 2)

    four = np.nonzero(cnt == 4)
    segs = [k2]
    gaps = []
    if len(four[0]):
        rr, cc = four
        sig = spec.sigmas[cc] + spec.dsigma / 2
        tt = spec.ts[rr + r0] + spec.dt / 2
        centre = zeta_array(sig + 1j * tt)
        cv = _component(centre, parity)
        ok = np.abs(cv) > 1e-12 * np.maximum(1, np.abs(centre))
        for r, c in zip(rr[~ok], cc[~ok]):
            gaps.append((int(r + r0), int(c)))
        rr, cc, cv = rr[ok], cc[ok], cv[ok]
        k = keys[rr, cc]
        joined = (cv > 0) == pos[rr, cc]
        # corners 00 and 11 joined through the centre: cut off corners 01 and 10
        a = k[:, [0, 2]]
        b = np.where(joined[:, None], k[:, [1, 3]], k[:, [3, 1]])
        segs.append(np.stack([a[:, 0], b[:, 0]], axis=1))
        segs.append(np.stack([a[:, 1], b[:, 1]], axis=1))
    return np.concatenate(segs) if segs else np.empty((0, 2), np.int64), gaps


def _key_geometry(spec, keys):
    """Edge endpoints for each key: (sigma_a, t_a, sigma_b, t_b, is_vertical)."""
    node = keys >> 1
    vert = (keys & 1).astype(bool)
    r = node // spec.nx
    c = node % spec.nx
    sig, ts = spec.sigmas, spec.ts
    sa, ta = sig[c], ts[r]
    sb = np.where(vert, sa, sig[np.minimum(c + 1, spec.nx - 1)])
    tb = np.where(vert, ts[np.minimum(r + 1, spec.ny - 1)], ta)
    return sa, ta, sb, tb, vert


def polish(spec, keys, parity, tol=VERTEX_TOL, max_iter=40):
    """Newton along each edge from its midpoint, safeguarded by bisection.

    Returns (points (n, 2), residual |level| per point).  Starting from the
    midpoint keeps the result independent of how the grid was blocked.
    """
    keys = np.asarray(keys, dtype=np.int64)
    sa, ta, sb, tb, vert = _key_geometry(spec, keys)
    lo = np.where(vert, ta, sa)
    hi = np.where(vert, tb, sb)
    fixed = np.where(vert, sa, ta)

    def s_of(x):
        return np.where(vert, fixed + 1j * x, x + 1j * fixed)

    def level(v):
        return _component(v, parity)

    flo = level(zeta_array(s_of(lo)))
    x = 0.5 * (lo + hi)
    res = np.full(len(keys), np.inf)
    active = np.ones(len(keys), dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        s = np.where(vert[idx], fixed[idx] + 1j * x[idx], x[idx] + 1j * fixed[idx])
        v = zeta_array(s)
        f = level(v)
        res[idx] = np.abs(f)
        done = np.abs(f) <= 0.1 * tol
        active[idx[done]] = False
        idx, f, s = idx[~done], f[~done], s[~done]
        if not len(idx):
            break
        d = zeta_prime_array(s)
        v_ = vert[idx]
        if parity == THICK:
            df = np.where(v_, d.real, d.imag)
        else:
            df = np.where(v_, -d.imag, d.real)
        # shrink the bracket, then step
        same = (f > 0) == (flo[idx] > 0)
        lo[idx] = np.where(same, x[idx], lo[idx])
        flo[idx] = np.where(same, f, flo[idx])
        hi[idx] = np.where(same, hi[idx], x[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x[idx] - f / df
        inside = np.isfinite(step) & (step > lo[idx]) & (step < hi[idx])
        x[idx] = np.where(inside, step, 0.5 * (lo[idx] + hi[idx]))
        stuck = (hi[idx] - lo[idx]) < 1e-15 * np.maximum(1, np.abs(x[idx]))
        active[idx[stuck]] = False
    pts = np.where(vert[:, None], np.stack([fixed, x], 1), np.stack([x, fixed], 1))
    return pts, res


# ------------------------------------------------------------------ curves

@dataclass
class LevelCurve:
    parity: str
    points: np.ndarray                   # (n, 2) columns sigma, t
    ends: tuple[str, str] | None         # None for a closed loop
    escapes_right: bool | None = None
    asym_index: int | None = None
    labels: tuple[int, ...] = ()
    residual: float = 0.0
    sigma_hi: float = 0.0

    @property
    def label(self) -> int | None:
        return min(self.labels) if self.labels else None

    @property
    def closed(self) -> bool:
        return self.ends is None


def _end_kind(spec, key, masked_keys, gap_keys):
    if key in masked_keys:
        return "pole"
    if key in gap_keys:
        return "gap"
    node, vert = key >> 1, key & 1
    r, c = divmod(node, spec.nx)
    if vert:
        if c == 0:
            return "left"
        if c == spec.nx - 1:
            return "right"
    else:
        if r == 0:
            return "bottom"
        if r == spec.ny - 1:
            return "top"
    return "gap"


def _cell_keys(spec, cells):
    out = set()
    nx = spec.nx
    for r, c in cells:
        base = (r * nx + c) << 1
        out.update((base, base + (nx << 1), base | 1, (base + 2) | 1))
    return out


def _link(segments: np.ndarray):
    """Chains of edge keys from the segment graph (paths first, then cycles)."""
    adj = defaultdict(list)
    for a, b in segments.tolist():
        adj[a].append(b)
        adj[b].append(a)
    seen = set()
    chains = []
    starts = sorted(k for k, v in adj.items() if len(v) == 1)
    for closed, pool in ((False, starts), (True, sorted(adj))):
        for s in pool:
            if s in seen:
                continue
            chain = [s]
            seen.add(s)
            prev, cur = None, s
            while True:
                nxt = [n for n in adj[cur] if n != prev and n not in seen]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                chain.append(cur)
                seen.add(cur)
            chains.append((chain, closed))
    return chains


def _assemble(spec, segments, parity, gaps, masked):
    if not len(segments):
        return []
    segments = np.unique(np.sort(segments, axis=1), axis=0)
    chains = _link(segments)
    all_keys = np.unique(segments)
    pts, res = polish(spec, all_keys, parity)
    pos = {k: i for i, k in enumerate(all_keys.tolist())}
    masked_keys = _cell_keys(spec, masked)
    gap_keys = _cell_keys(spec, gaps)
    curves = []
    for chain, closed in chains:
        idx = [pos[k] for k in chain]
        p = pts[idx]
        if closed:
            p = np.vstack([p, p[:1]])
            ends = None
        else:
            ends = (_end_kind(spec, chain[0], masked_keys, gap_keys),
                    _end_kind(spec, chain[-1], masked_keys, gap_keys))
            # orient: a left end comes first, the lower of two left ends first
            flip = (ends[1] == "left" and (ends[0] != "left" or p[-1, 1] < p[0, 1]))
            if flip:
                p = p[::-1]
                ends = (ends[1], ends[0])
        curves.append(LevelCurve(parity, p, ends, residual=float(res[idx].max()),
                                 sigma_hi=spec.sigma_hi))
    curves.sort(key=lambda c: (c.points[0, 1], c.points[0, 0]))
    return curves


def trace_level_curves(fld: Field, parity: str) -> list[LevelCurve]:
    """Polylines of Im zeta = 0 (thick) or Re zeta = 0 (thin) over a sampled field.

    A single component's level set is smooth through simple zeros of zeta, so
    the only junctions are saddles of that component; these are split by the
    centre-value decider.  Cells the decider cannot settle are left as gaps.
    """
    if parity not in (THICK, THIN):
        raise DomainError(f"parity must be {THICK!r} or {THIN!r}")
    f = _component(fld.values, parity)
    segs, gaps = _march(fld.spec, f, 0, parity, fld.masked)
    curves = _assemble(fld.spec, segs, parity, gaps, fld.masked)
    # escape needs room to the right of sigma = 2; narrower grids leave it undecided
    if fld.spec.sigma_hi >= 3:
        for c in curves:
            c.escapes_right, c.asym_index = classify_escape(c)
    return curves


def classify_escape(curve: LevelCurve, sigma_right: float = 2.0):
    """(escapes_right, asym_index); (None, None) when the grid boundary cuts the decision."""
    if curve.sigma_hi < sigma_right + 1:
        raise DomainError("escape classification needs the grid to reach sigma_right + 1")
    if curve.parity == THIN:
        return False, None
    if curve.closed:
        return False, None
    ends = curve.ends
    if "right" not in ends:
        if "top" in ends or "gap" in ends or "bottom" in ends:
            if curve.points[:, 0].max() >= sigma_right:
                return None, None
            if "left" in ends and ends.count("left") == 1:
                return None, None
        return False, None
    p = curve.points if ends[1] == "right" else curve.points[::-1]
    below = np.nonzero(p[:, 0] < sigma_right)[0]
    tail = p[below[-1] + 1:] if len(below) else p
    if len(tail) < 2:
        return None, None
    monotone = bool(np.all(np.diff(tail[:, 0]) >= -1e-9))
    bounded = float(np.ptp(tail[:, 1])) < math.pi / (2 * LN2)
    if not (monotone and bounded):
        return False, None
    return True, int(round(tail[-1, 1] * LN2 / math.pi))


# ---------------------------------------------------------------- numbering

def reference_phase(sigma: float, t_hi: float, step: float = 0.01):
    """Unwrapped arg zeta(sigma + it) on [0, t_hi].

    zeta is real on the real axis, so the phase starts at 0 or pi by the sign
    of zeta(sigma); the first sample sits slightly above the axis and its
    raw angle may read -pi instead of pi.
    """
    t = np.arange(0.0, t_hi + step, step)
    t[0] = T_FLOOR
    v = zeta_array(sigma + 1j * t)
    ph = np.unwrap(np.angle(v))
    start = 0.0 if v[0].real > 0 else math.pi
    return t, v, ph - ph[0] + start


def phase_labels(sigma: float, t_cross: np.ndarray, t_hi: float) -> np.ndarray:
    """Line numbers of reference-line crossings from the phase of zeta there.

    Thick and thin crossings sit at phases k*pi/2; the number is 1 - 2*phi/pi,
    so numbers fall as the phase winds forward and line 1 is where phi = 0.
    """
    t, v, ph = reference_phase(sigma, max(t_hi, float(np.max(t_cross, initial=0))) + 0.02)
    i = np.clip(np.searchsorted(t, t_cross) - 1, 0, len(t) - 1)
    here = zeta_array(sigma + 1j * np.asarray(t_cross))
    phi = ph[i] + np.angle(here / v[i])
    return np.rint(1 - 2 * phi / math.pi).astype(int)


@dataclass
class Crossing:
    t: float
    parity: str
    label: int | None
    curve: int
    raw: int = 0


@dataclass
class Numbering:
    crossings: list[Crossing]
    violations: list[tuple[float, int]]
    unnumbered: list[Crossing]
    scheme: str = "phase"


def assign_numbers(curves: list[LevelCurve], reference_sigma: float = -1.0,
                   scheme: str = "phase", gaps: list | None = None,
                   t_hi: float | None = None) -> Numbering:
    """Number the crossings of the line sigma = reference_sigma.

    scheme "count" orders crossings by t and numbers them 1, 2, 3, ...
    scheme "phase" numbers each crossing by the winding of arg zeta along the
    reference line (1 - 2*phi/pi), which makes the count start at the
    crossing where phi first returns to 0 above the pole.
    Crossings numbered 0 or below are returned as unnumbered.
    """
    cr = []
    for ci, c in enumerate(curves):
        if c.closed:
            continue
        for end, pt in ((c.ends[0], c.points[0]), (c.ends[1], c.points[-1])):
            if end == "left":
                if abs(pt[0] - reference_sigma) > 1e-9:
                    raise DomainError("curves were not traced from the reference line")
                cr.append(Crossing(float(pt[1]), c.parity, None, ci))
    cr.sort(key=lambda x: x.t)
    for i, x in enumerate(cr, 1):
        x.raw = i
    gap_t = min((g[0] for g in gaps), default=None) if gaps else None
    if scheme == "count":
        for x in cr:
            x.label = x.raw
    elif scheme == "phase":
        if cr:
            th = t_hi if t_hi is not None else cr[-1].t
            labs = phase_labels(reference_sigma, np.array([x.t for x in cr]), th)
            for x, lab in zip(cr, labs):
                x.label = int(lab)
    else:
        raise DomainError(f"unknown numbering scheme {scheme!r}")
    if gap_t is not None:
        for x in cr:
            if x.t > gap_t:
                x.label = None
    numbered = [x for x in cr if x.label is not None and x.label >= 1]
    unnumbered = [x for x in cr if x.label is None or x.label < 1]
    for x in unnumbered:
        x.label = None
    violations = []
    for a, b in zip(numbered, numbered[1:]):
        if b.label != a.label + 1:
            violations.append((b.t, b.label))
    for x in numbered:
        if (x.label % 2 == 1) != (x.parity == THICK):
            violations.append((x.t, x.label))
    by_curve = defaultdict(list)
    for x in numbered:
        by_curve[x.curve].append(x.label)
    for ci, c in enumerate(curves):
        c.labels = tuple(sorted(by_curve.get(ci, ())))
    return Numbering(numbered, sorted(set(violations)), unnumbered, scheme)


def sq_membership(label: int) -> SeqId:
    if label < 1:
        raise DomainError("line numbers start at 1")
    if label % 2 == 0:
        raise DomainError("even labels belong to thin lines, which carry no sequence class")
    return {5: SeqId.SQ1, 1: SeqId.SQ2, 3: SeqId.SQ3}[label % 6]


# ---------------------------------------------------------- escape heights

def escape_height(t_start: float, sigma_from: float, sigma_to: float = 6.0,
                  step: float = 0.25) -> float:
    """Follow a thick escaping line from (sigma_from, t_start) rightward; its t at sigma_to."""
    t = t_start
    for sig in np.append(np.arange(sigma_from + step, sigma_to, step), sigma_to):
        for _ in range(30):
            s = complex(sig, t)
            f = zeta_array(np.array([s]))[0].imag
            d = zeta_prime_array(np.array([s]))[0].real   # d/dt Im zeta
            dt = f / d
            t -= dt
            if abs(dt) < 1e-13 * max(1.0, abs(t)):
                break
    return float(t)


# ------------------------------------------------------------------- report

@dataclass
class LabelRow:
    label: int
    parity: str
    escapes: bool | None
    asym_index: int | None
    sq_class: str | None
    t_at_reference: float


@dataclass
class XrayReport:
    t_max: float
    spec: GridSpec
    curves: list[LevelCurve]
    numbering: Numbering
    rows: list[LabelRow]
    gaps: list[tuple[int, int]]
    escape_heights: dict[int, float]
    landmarks: dict
    loops: dict | None
    note: str = VACUITY_NOTE
    count_labels: dict = field(default_factory=dict)

    @property
    def escaping_labels(self) -> list[int]:
        return [r.label for r in self.rows if r.parity == THICK and r.escapes]

    def labels_in(self, seq: SeqId) -> list[int]:
        return [r.label for r in self.rows if r.sq_class == seq.value and r.escapes]

    def row(self, label: int) -> LabelRow | None:
        for r in self.rows:
            if r.label == label:
                return r
        return None


def _trace_streaming(spec, workers, block_rows):
    """Marching squares over row blocks; returns curves of both parities and gaps."""
    segs = {THICK: [], THIN: []}
    gaps = {THICK: [], THIN: []}
    masked = [spec.pole_cell()] if spec.pole_cell() else []
    r0 = 0
    while r0 < spec.ny - 1:
        r1 = min(spec.ny, r0 + block_rows + 1)
        vals = _rows(spec, r0, r1, workers)
        for par in (THICK, THIN):
            s, g = _march(spec, _component(vals, par), r0, par, masked)
            segs[par].append(s)
            gaps[par].extend(g)
        r0 = r1 - 1
    curves = []
    for par in (THICK, THIN):
        sg = np.concatenate(segs[par]) if segs[par] else np.empty((0, 2), np.int64)
        curves.extend(_assemble(spec, sg, par, gaps[par], masked))
    for c in curves:
        c.escapes_right, c.asym_index = classify_escape(c)
    return curves, gaps[THICK] + gaps[THIN], masked


def _thin_loops(rows_by_label, curves, lo, hi, cutter):
    loops = []
    for c in curves:
        if c.parity == THIN and len(c.labels) == 2 and lo < c.labels[0] and c.labels[1] < hi:
            loops.append(c.labels)
    loops.sort()
    cut = [lp for lp in loops if lp[0] < cutter < lp[1]]
    return {"between": (lo, hi), "loops": loops, "count": len(loops),
            "cut_by": cutter, "cut_loops": cut,
            "cutter_escapes": bool(rows_by_label.get(cutter) and rows_by_label[cutter].escapes)}


def xray_report(t_max: float, sigma_lo: float = -1.0, sigma_hi: float = 3.0,
                dsigma: float = 0.01, dt: float = 0.005, workers: int = 1,
                block_rows: int = 4000, scheme: str = "phase",
                escape_sigma: float = 6.0) -> XrayReport:
    if not (0 < t_max <= 480):
        raise DomainError("t_max must lie in (0, 480]")
    spec = GridSpec.from_steps(sigma_lo, sigma_hi, 0.0, t_max, dsigma, dt)
    curves, gaps, _ = _trace_streaming(spec, workers, block_rows)
    gap_t = [(spec.ts[r], c) for r, c in gaps]
    counted = assign_numbers(curves, sigma_lo, "count", gaps=gap_t, t_hi=t_max)
    # the primary scheme runs last so its labels stay on the curves
    numbering = assign_numbers(curves, sigma_lo, scheme, gaps=gap_t, t_hi=t_max)
    rows = []
    for x in numbering.crossings:
        c = curves[x.curve]
        sq = sq_membership(x.label).value if x.label % 2 else None
        rows.append(LabelRow(x.label, x.parity, c.escapes_right, c.asym_index, sq, x.t))
    heights = {}
    for c in curves:
        if c.escapes_right and c.asym_index is not None:
            end = c.points[-1] if c.ends[1] == "right" else c.points[0]
            heights[c.asym_index] = escape_height(float(end[1]), float(end[0]), escape_sigma)
    by_label = {r.label: r for r in rows}
    loops = None
    lo, hi, cutter = REFERENCE_PARALLEL
    if lo in by_label and hi in by_label:
        loops = _thin_loops(by_label, curves, lo, hi, cutter)
    rep = XrayReport(t_max, spec, curves, numbering, rows, gaps, heights, {}, loops,
                     count_labels={x.raw: x.t for x in counted.crossings})
    rep.landmarks = landmark_comparison(rep)
    return rep


def landmark_comparison(rep: XrayReport) -> dict:
    """Published reference labels checked against the measured topography."""
    top = max((r.label for r in rep.rows), default=0)
    sq3 = set(rep.labels_in(SeqId.SQ3))
    expected = {x for x in REFERENCE_SQ3_ESCAPING if x <= top}
    out = {
        "max_label": top,
        "sq3_expected": sorted(expected),
        "sq3_measured": sorted(sq3),
        "sq3_missing": sorted(expected - sq3),
        "sq3_extra": sorted(sq3 - expected),
    }
    for lab in REFERENCE_NON_ESCAPING + REFERENCE_SQ1_ESCAPING:
        r = rep.row(lab)
        out[f"escapes_{lab}"] = None if r is None else r.escapes
    out["non_escaping_ok"] = all(out[f"escapes_{x}"] is False for x in REFERENCE_NON_ESCAPING if x <= top)
    out["sq1_escaping_ok"] = all(out[f"escapes_{x}"] for x in REFERENCE_SQ1_ESCAPING if x <= top)
    return out
