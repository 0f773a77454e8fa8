"""Sub-sequences SQ 1-X / SQ 2-X, their derivation graph and the periodicity tables.

A sub-sequence SQ b-X inside a host sequence is the progression X*c where the
cofactor c runs over Sequence b without its leading 1 (c = 5, 11, 17, ... for
b = 1 and c = 7, 13, 19, ... for b = 2).  The host is implied: X*c must land in
SQ1 or SQ2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError
from .sieve import oracle_primes_up_to
from .wheel import SeqId, base_for, check_u64, seq_of

_FIRST_COFACTOR = {1: 5, 2: 7}
_COFACTOR_RESIDUE = {1: 5, 2: 1}


class NodeClass(str, Enum):
    MAIN = "main"
    DIRECT = "direct"
    INTERNAL = "internal"
    NONDIRECT = "nondirect"


@dataclass(frozen=True, order=True)
class SubseqName:
    base: int
    stretch: int

    def __post_init__(self):
        if self.base not in (1, 2):
            raise DomainError("base must be 1 or 2")
        if self.stretch < 5 or self.stretch % 6 not in (1, 5):
            raise DomainError(f"stretch factor {self.stretch} must be >= 5 and coprime to 6")

    @classmethod
    def parse(cls, text: str) -> "SubseqName":
        b, x = text.replace("SQ", "").strip().split("-")
        return cls(int(b), int(x))

    @classmethod
    def within(cls, stretch: int, host: SeqId) -> "SubseqName":
        return cls(base_for(stretch, host), stretch)

    @property
    def host(self) -> SeqId:
        return seq_of(self.stretch * _COFACTOR_RESIDUE[self.base])

    @property
    def first_cofactor(self) -> int:
        return _FIRST_COFACTOR[self.base]

    def cofactor(self, n: int) -> int:
        return self.first_cofactor + 6 * n

    def member(self, n: int) -> int:
        if n < 0:
            raise DomainError("member index must be nonnegative")
        return check_u64(self.stretch * self.cofactor(n))

    def contains(self, v: int) -> bool:
        q, r = divmod(v, self.stretch)
        return r == 0 and q >= self.first_cofactor and q % 6 == _COFACTOR_RESIDUE[self.base]

    def members_up_to(self, limit: int) -> range:
        return range(self.stretch * self.first_cofactor, limit + 1, 6 * self.stretch)

    def __str__(self):
        return f"SQ {self.base}-{self.stretch}"


def subsequence_member(name: SubseqName, n: int) -> int:
    return name.member(n)


@dataclass
class DerivationNode:
    name: SubseqName
    cls: NodeClass
    parent: SubseqName | None
    origin_value: int
    truncated: bool = False

    @property
    def host(self) -> SeqId:
        return self.name.host


@dataclass
class DerivationGraph:
    host: SeqId
    value_limit: int
    nodes: dict[SubseqName, DerivationNode] = field(default_factory=dict)
    edges: list[tuple[SubseqName | None, SubseqName, NodeClass, int]] = field(default_factory=list)

    def ordered(self) -> list[DerivationNode]:
        return sorted(self.nodes.values(), key=lambda n: (n.origin_value, n.name.stretch, n.name.base))

    def of_class(self, *classes: NodeClass) -> list[DerivationNode]:
        return [n for n in self.ordered() if n.cls in classes]

    def names(self) -> set[str]:
        return {str(n) for n in self.nodes}


def main_names(host: SeqId) -> tuple[SubseqName, SubseqName]:
    """The two spawning sub-sequences of a host: the 5- and 7-periodicities."""
    if host not in (SeqId.SQ1, SeqId.SQ2):
        raise DomainError("host must be SQ1 or SQ2")
    return SubseqName.within(7, host), SubseqName.within(5, host)


def _small_primes(limit: int) -> list[int]:
    return [p for p in oracle_primes_up_to(max(limit, 2)) if p >= 5]


def derive_children(node: DerivationNode, depth_limit: int | None = 1, value_limit: int = 10**4,
                    _primes: list[int] | None = None) -> list[DerivationNode]:
    """Sub-sequences spawned by ``node`` up to ``depth_limit`` generations.

    For each prime g the cofactors of ``node`` divisible by g are g*m.  When
    m = 1 occurs in a main node, that member is the first appearance of g in the
    host and starts the g-periodicity (a direct child).  The composite cofactors
    g*m, m >= 5, form the sub-sequence with stretch s*g (internal under a main
    node, nondirect otherwise).
    """
    if value_limit < 25:
        raise DomainError("value_limit must be at least 25")
    if depth_limit is not None and depth_limit <= 0:
        return []
    s = node.name.stretch
    host = node.host
    mains = set(main_names(host))
    primes = _primes if _primes is not None else _small_primes(value_limit // s)
    is_main = node.cls is NodeClass.MAIN
    out = []
    r_c = _COFACTOR_RESIDUE[node.name.base]
    for g in primes:
        if s * g > value_limit:
            break
        m_res = (r_c * g) % 6
        if m_res == 1 and is_main:
            name = SubseqName.within(g, host)
            if name not in mains and s * g <= value_limit:
                out.append(DerivationNode(name, NodeClass.DIRECT, node.name, s * g))
        m0 = 5 if m_res == 5 else 7
        origin = s * g * m0
        if origin <= value_limit:
            cls = NodeClass.INTERNAL if is_main else NodeClass.NONDIRECT
            base = 1 if m_res == 5 else 2
            out.append(DerivationNode(SubseqName(base, s * g), cls, node.name, origin))
    if depth_limit is None or depth_limit > 1:
        nxt = None if depth_limit is None else depth_limit - 1
        for child in list(out):
            out.extend(derive_children(child, nxt, value_limit, primes))
    out.sort(key=lambda n: (n.origin_value, n.name.stretch))
    return out


def build_derivation_graph(host: SeqId, value_limit: int, depth_limit: int | None = None
                           ) -> DerivationGraph:
    """Graph rooted at ``host``: both main nodes and every descendant spawned below the limit.

    A sub-sequence reachable along several paths keeps the strongest class
    (main > direct > internal > nondirect); every derivation is kept as an edge.
    """
    value_limit = max(value_limit, 25)
    g = DerivationGraph(host, value_limit)
    primes = _small_primes(value_limit // 5)
    rank = {NodeClass.MAIN: 0, NodeClass.DIRECT: 1, NodeClass.INTERNAL: 2, NodeClass.NONDIRECT: 3}
    frontier = []
    for name in main_names(host):
        node = DerivationNode(name, NodeClass.MAIN, None, name.member(0))
        g.nodes[name] = node
        g.edges.append((None, name, NodeClass.MAIN, node.origin_value))
        frontier.append(node)
    depth = 0
    while frontier and (depth_limit is None or depth < depth_limit):
        depth += 1
        nxt = []
        for parent in frontier:
            for child in derive_children(parent, 1, value_limit, primes):
                g.edges.append((parent.name, child.name, child.cls, child.origin_value))
                have = g.nodes.get(child.name)
                if have is None:
                    g.nodes[child.name] = child
                    nxt.append(child)
                elif rank[child.cls] < rank[have.cls]:
                    have.cls, have.parent, have.origin_value = child.cls, child.parent, child.origin_value
        frontier = sorted(nxt, key=lambda n: (n.origin_value, n.name.stretch))
    if frontier:
        for n in frontier:
            n.truncated = True
    g.edges.sort(key=lambda e: (e[3], e[1].stretch, -1 if e[0] is None else e[0].stretch))
    return g


def _member_mask(names, host: SeqId, limit: int) -> np.ndarray:
    """Boolean mask over host indices (value = offset + 6i) of values in any listed sub-sequence."""
    off = host.offset
    mask = np.zeros((limit - off) // 6 + 1, dtype=bool)
    for name in names:
        start = name.stretch * name.first_cofactor
        if start > limit:
            continue
        # members step by 6*X in value, i.e. by X in host index
        mask[(start - off) // 6::name.stretch] = True
    return mask


@dataclass
class CoverageReport:
    host: SeqId
    value_limit: int
    composites: int
    covered: int
    uncovered_values: list[int]
    uncovered_composites: list[int]
    redundant_only: list[int]
    primes_match: bool
    covering: dict[int, list[str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.primes_match and not self.uncovered_composites and not self.redundant_only


def coverage_check(host: SeqId, value_limit: int, explain: tuple[int, ...] = (),
                   graph: DerivationGraph | None = None) -> CoverageReport:
    """Check that main and direct sub-sequences alone account for every composite of ``host``."""
    if host not in (SeqId.SQ1, SeqId.SQ2):
        raise DomainError("host must be SQ1 or SQ2")
    off = host.offset
    if value_limit < off:
        return CoverageReport(host, value_limit, 0, 0, [], [], [], True)
    if graph is None:
        graph = build_derivation_graph(host, value_limit, depth_limit=1)
    essential = [n.name for n in graph.of_class(NodeClass.MAIN, NodeClass.DIRECT)]
    redundant = [n.name for n in graph.of_class(NodeClass.INTERNAL, NodeClass.NONDIRECT)]
    covered = _member_mask(essential, host, value_limit)
    extra = _member_mask(redundant, host, value_limit)
    values = off + 6 * np.arange(len(covered), dtype=np.int64)
    flags = np.zeros(value_limit + 1, dtype=bool)
    flags[oracle_primes_up_to(value_limit)] = True
    is_prime = flags[values]
    unit = values == 1
    composite = ~is_prime & ~unit
    uncovered = values[~covered & ~unit]
    report = CoverageReport(
        host=host,
        value_limit=value_limit,
        composites=int(composite.sum()),
        covered=int(covered.sum()),
        uncovered_values=uncovered.tolist(),
        uncovered_composites=values[composite & ~covered].tolist(),
        redundant_only=values[extra & ~covered].tolist(),
        primes_match=bool(np.array_equal(uncovered, values[is_prime])),
    )
    for v in explain:
        report.covering[v] = [str(n.name) for n in graph.ordered() if n.name.contains(v)]
    return report


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class AtlasRow:
    value: int
    host: str
    path: str
    label: str
    cls: str
    member: int | None = None

    def factors(self) -> list[int]:
        return [int(f) for f in self.path.replace("x", " ").split()] if self.path else []


@dataclass
class AtlasTable:
    kind: str
    rows: list[AtlasRow]
    params: dict = field(default_factory=dict)

    def rows_for_member(self, m: int) -> list[AtlasRow]:
        return [r for r in self.rows if r.member == m]


TABLE7 = {"A": (5, SeqId.SQ1), "B": (5, SeqId.SQ2), "C": (7, SeqId.SQ2)}


def _fmt(parts) -> str:
    return " ".join(f"{p}x" for p in parts[:-1]) + f" {parts[-1]}"


def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            seg = spf[p * p::p]
            seg[seg == 0] = p
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    return spf


def _factorize(v: int, spf) -> list[int]:
    out = []
    while v > 1:
        p = int(spf[v])
        out.append(p)
        v //= p
    return out


def _chains(prefix: list[int], rest: int, floor: int, spf):
    """Nondecreasing splittings rest = g * r with prime g >= floor and r >= g, recursively."""
    for g in sorted(set(_factorize(rest, spf))):
        if g < floor or g < 5:
            continue
        r = rest // g
        if r < g:
            continue
        chain = prefix + [g, r]
        yield chain
        yield from _chains(prefix + [g], r, g, spf)


def _label(parts: list[int]) -> str:
    stretch = int(np.prod(parts[:-1]))
    last = parts[-1]
    return f"SQ {1 if last % 6 == 5 else 2}-{stretch}"


def periodicity_table(p: int, host: SeqId, limit: int, kind: str) -> AtlasTable:
    """Rows "p x m" of the p-periodicity in ``host`` followed by every further splitting of m."""
    name = SubseqName.within(p, host)
    spf = _spf_table(max(limit // p, 2))
    rows = []
    for v in name.members_up_to(limit):
        m = v // p
        rows.append(AtlasRow(v, host.value, _fmt([p, m]), str(name), "periodic", m))
        for chain in _chains([p], m, 5, spf):
            rows.append(AtlasRow(v, host.value, _fmt(chain), _label(chain), f"further-{len(chain) - 2}", m))
    return AtlasTable(kind, rows, {"factor": p, "host": host.value, "limit": limit})


def emit_table(kind: str, limit: int = 400, variant: str = "B") -> AtlasTable:
    """Reproduce one of the atlas tables as ordered rows (value, host, path, label, class)."""
    kind = str(kind).lower().removeprefix("table")
    if kind == "1":
        spf = _spf_table(max(limit, 2))
        rows = []
        for v in range(1, limit + 1):
            seq = seq_of(v)
            if seq not in (SeqId.SQ1, SeqId.SQ2):
                continue
            if v == 1:
                rows.append(AtlasRow(v, seq.value, "", "", "unit"))
                continue
            fs = _factorize(v, spf)
            if len(fs) == 1:
                rows.append(AtlasRow(v, seq.value, "", "", "prime"))
            else:
                x = fs[0]
                parts = [x, v // x]
                rows.append(AtlasRow(v, seq.value, " ".join(f"{f}x" for f in fs[:-1]) + f" {fs[-1]}",
                                     _label(parts), "non-prime"))
        return AtlasTable("table1", rows, {"limit": limit})
    if kind == "3":
        rows = []
        for host in (SeqId.SQ1, SeqId.SQ2):
            for x in (5, 7):
                name = SubseqName.within(x, host)
                for v in name.members_up_to(limit):
                    rows.append(AtlasRow(v, host.value, _fmt([x, v // x]), str(name), NodeClass.MAIN.value, v // x))
        rows.sort(key=lambda r: (r.host, int(r.label.split("-")[1]), r.value))
        return AtlasTable("table3", rows, {"limit": limit})
    if kind == "4":
        return periodicity_table(7, SeqId.SQ1, limit, "table4")
    if kind == "5":
        return periodicity_table(11, SeqId.SQ2, limit, "table5")
    if kind == "7":
        variant = variant.upper()
        if variant not in TABLE7:
            raise DomainError(f"unknown table 7 variant {variant!r}")
        p, host = TABLE7[variant]
        return periodicity_table(p, host, limit, f"table7{variant}")
    raise DomainError(f"unknown table kind {kind!r}")
