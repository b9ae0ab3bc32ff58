"""Orbit catalogs: enumeration, counting, dimensions, closures, Hasse data.

A catalog lists one entry per orbit of the block Borel on the flag
variety of the pair: the normal form, a realized rational representative,
its full rank signature, the orbit dimension (computed from Lie-algebra
stabilizers, always over the rationals), and whether the orbit is closed.
The candidate partial order is entry-wise signature dominance, which rank
semicontinuity makes a necessary condition for closure; its transitive
reduction is emitted as a DOT digraph but never claimed to be the closure
order itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .flags import (Composition, Flag, complete_to_invertible)
from .invariants import (JFamily, Signature, dominates, invariant_family,
                         signature, verify_family_invariance)
from .linalg import QQ, integer_rank
from .normalforms import (CaseTag, InfinitePairError, NonInjectiveError,
                          NormalForm, UnsupportedCaseError, case0_normal_forms,
                          case3prime_normal_forms, classify_pair, has_catalog,
                          pattern_candidates, counterexample_pair)


@dataclass(frozen=True)
class CatalogEntry:
    nf: NormalForm
    flag: Flag              # rational representative
    sig: Signature
    dim: int
    closed: bool


@dataclass(frozen=True)
class OrbitCatalog:
    case: CaseTag
    nn: Composition
    mm: Composition
    family: JFamily
    entries: tuple[CatalogEntry, ...]
    covers: Optional[tuple[tuple[int, int], ...]] = None


@dataclass(frozen=True)
class HasseDiagram:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]   # (lower, upper) cover pairs


_COVER_EAGER_LIMIT = 400


def enumerate_orbits(nn: Composition, mm: Composition,
                     with_covers: Optional[bool] = None) -> OrbitCatalog:
    return _enumerate_cached(nn.parts, mm.parts,
                             with_covers if with_covers is not None else -1)


@lru_cache(maxsize=None)
def _enumerate_cached(nn_parts, mm_parts, with_covers_flag):
    nn = Composition(nn_parts)
    mm = Composition(mm_parts)
    tag = classify_pair(nn, mm)
    if tag is None:
        raise InfinitePairError(
            f"pair (nn={nn} | mm={mm}) has infinitely many orbits")
    if not tag.injective:
        witnesses = None
        try:
            witnesses = counterexample_pair(nn, mm)
        except (UnsupportedCaseError, ValueError):
            pass
        raise NonInjectiveError(
            f"case {tag} of (nn={nn} | mm={mm}) is not separated by signatures; "
            "enumeration refused", witnesses=witnesses)
    if not has_catalog(tag):
        raise UnsupportedCaseError(
            f"case {tag} of (nn={nn} | mm={mm}) is separable but has no "
            "classification; enumeration unavailable")

    fam = invariant_family(nn, mm)
    verify_family_invariance(fam, trials=4)

    if tag.label == "0":
        forms = case0_normal_forms(nn, mm)
    elif tag.label == "III'":
        forms = case3prime_normal_forms(nn, mm)
    else:
        forms = pattern_candidates(tag, nn, mm)

    by_sig: dict[tuple[int, ...], tuple[str, NormalForm, Flag]] = {}
    for nf in forms:
        flag = nf.realize(QQ)
        values = signature(flag, fam).values
        key = nf.serialize()
        known = by_sig.get(values)
        if known is None or key < known[0]:
            by_sig[values] = (key, nf, flag)

    if tag.label in ("0", "III'") and len(by_sig) != len(forms):
        raise AssertionError(
            f"normal forms of case {tag} are not signature-separated: "
            f"{len(forms)} forms, {len(by_sig)} signatures")

    entries = []
    for values, (key, nf, flag) in by_sig.items():
        sig = Signature(fam, values)
        dim = orbit_dimension(flag, nn)
        entries.append(CatalogEntry(nf, flag, sig, dim, is_closed_flag(flag, nn)))
    entries.sort(key=lambda e: (e.dim, e.nf.serialize()))

    cat = OrbitCatalog(tag, nn, mm, fam, tuple(entries))
    want_covers = with_covers_flag == 1 or (
        with_covers_flag == -1 and len(entries) <= _COVER_EAGER_LIMIT)
    if want_covers:
        cat = replace(cat, covers=hasse_candidate(cat).edges)
    return cat


def enumeration_count(nn: Composition, mm: Composition) -> int:
    """Number of orbits by direct normal-form generation.

    For the exactly-classified cases (two blocks on both sides, or one
    row block of size one) this counts the combinatorial normal forms
    without realizing them; other cases fall back to the full catalog.
    """
    tag = classify_pair(nn, mm)
    if tag is None:
        raise InfinitePairError(f"pair ({nn}, {mm}) is infinite")
    if tag.label == "0":
        return len(case0_normal_forms(nn, mm))
    if tag.label == "III'":
        return len(case3prime_normal_forms(nn, mm))
    return len(enumerate_orbits(nn, mm).entries)


def count_multiplicity_free(n: int, mm: Composition) -> int:
    """Closed-form orbit count for the pair with row blocks ``(n-1, 1)``.

    ``(1/n) * multinomial(n; m) * sum_k sigma_k(m) / (k-1)!`` with sigma_k
    the elementary symmetric functions of the column block sizes; the
    result is always integral, and a non-integral value signals misuse.
    """
    if mm.n != n:
        raise ValueError("mm must be a composition of n")
    parts = mm.parts
    multinom = math.factorial(n)
    for p in parts:
        multinom //= math.factorial(p)
    # elementary symmetric values via prod (1 + m_j x)
    coeffs = [1]
    for p in parts:
        coeffs = [a + p * b for a, b in
                  zip(coeffs + [0], [0] + coeffs)]
    total = Fraction(0)
    for k in range(1, len(parts) + 1):
        total += Fraction(coeffs[k], math.factorial(k - 1))
    value = Fraction(multinom, n) * total
    if value.denominator != 1:
        raise ValueError(f"count formula returned non-integer {value}")
    return int(value)


# ---------------------------------------------------------------------------
# dimension and closedness
# ---------------------------------------------------------------------------


def orbit_dimension(f: Flag, nn: Composition) -> int:
    """dim of the block-Borel orbit through ``f`` (rational Lie algebra).

    The stabilizer subalgebra is cut out of b' by the linear conditions
    ``(g^{-1} X g)_{ij} = 0`` over the strictly-lower block positions of
    the column parabolic, where g is the deterministic invertible
    completion of the representative; the orbit dimension equals the rank
    of that constraint matrix.
    """
    if f.field is not QQ:
        raise ValueError("orbit dimensions are computed over Q")
    n = f.n
    g = complete_to_invertible(f.rep)
    ginv = g.inverse()
    mm = f.typ

    coords = [(a, b)
              for blk in range(len(nn))
              for a in nn.block_range(blk)
              for b in nn.block_range(blk) if a <= b]
    rows: list[list[int]] = []
    for i in range(n):
        for j in range(n):
            if mm.block_of(i) <= mm.block_of(j):
                continue
            row = [ginv[i, a] * g[b, j] for a, b in coords]
            lcm = 1
            for x in row:
                lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
            rows.append([int(x * lcm) for x in row])
    if not rows:
        return 0
    return integer_rank(rows)


def is_closed_flag(f: Flag, nn: Composition) -> bool:
    """Closedness = being a fixed point of the block Borel.

    A flag is fixed exactly when each of its subspaces is spanned by
    standard basis vectors whose indices form a prefix of every row
    block (torus-invariance forces coordinate spans, triangularity forces
    prefixes).
    """
    F = f.field
    rep = f.rep
    one, zero = F.one, F.zero
    col_rows = []
    for j in range(rep.cols):
        col = rep.column(j)
        support = [i for i, x in enumerate(col) if x != zero]
        if len(support) != 1 or col[support[0]] != one:
            return False
        col_rows.append(support[0])
    ps = f.typ.prefix_sums()
    for t in range(1, len(f.typ)):
        occupied = set(col_rows[:ps[t]])
        for b in range(len(nn)):
            rows = list(nn.block_range(b))
            hit = [i for i, r in enumerate(rows) if r in occupied]
            if hit and hit != list(range(len(hit))):
                return False
    return True


def is_closed(nf: NormalForm, nn: Composition) -> bool:
    return is_closed_flag(nf.realize(QQ), nn)


# ---------------------------------------------------------------------------
# dominance order
# ---------------------------------------------------------------------------


class DominanceDimensionError(RuntimeError):
    """A dominance cover fails to increase the orbit dimension."""


def hasse_candidate(cat: OrbitCatalog) -> HasseDiagram:
    """Transitive reduction of signature dominance over the catalog.

    Guard: every cover must strictly increase the orbit dimension (a
    consequence of closures being unions of smaller orbits); violations
    are reported, never repaired.
    """
    n = len(cat.entries)
    sigs = [e.sig for e in cat.entries]
    less: list[set[int]] = [set() for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and sigs[a].values != sigs[b].values \
                    and dominates(sigs[a], sigs[b]):
                less[a].add(b)
    edges = []
    for a in range(n):
        for b in less[a]:
            if not any(b in less[c] for c in less[a] if c != b):
                edges.append((a, b))
    offenders = [(a, b) for a, b in edges
                 if cat.entries[a].dim >= cat.entries[b].dim]
    if offenders:
        raise DominanceDimensionError(
            f"covers without dimension increase: {offenders}")
    return HasseDiagram(tuple(range(n)), tuple(sorted(edges)))


def emit_dot(h: HasseDiagram, cat: OrbitCatalog) -> str:
    """Deterministic DOT digraph, ranked by orbit dimension.

    The edge set is the dominance transitive reduction; whether it equals
    the true closure order is not certified here.
    """
    lines = [
        "// orbit poset candidate: signature-dominance transitive reduction",
        "// (dominance is necessary for closure; equality is not certified)",
        "digraph orbits {",
        "  rankdir=BT;",
        "  node [shape=box];",
    ]
    by_dim: dict[int, list[int]] = {}
    for i in h.nodes:
        by_dim.setdefault(cat.entries[i].dim, []).append(i)
    for d in sorted(by_dim):
        ids = " ".join(f"n{i};" for i in sorted(by_dim[d]))
        lines.append(f"  {{ rank=same; {ids} }}")
    for i in h.nodes:
        label = cat.entries[i].nf.serialize().replace('"', r'\"')
        lines.append(f'  n{i} [label="dim={cat.entries[i].dim} {label}"];')
    for a, b in h.edges:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# catalog text format
# ---------------------------------------------------------------------------


def catalog_to_text(cat: OrbitCatalog) -> str:
    lines = [f"case={cat.case.label} nn={cat.nn} mm={cat.mm} "
             f"count={len(cat.entries)}"]
    for i, e in enumerate(cat.entries):
        lines.append(f"entry {i} dim={e.dim} closed={int(e.closed)} "
                     f"sig={e.sig.hash()} nf={e.nf.serialize()}")
    covers = cat.covers
    if covers is None:
        covers = hasse_candidate(cat).edges
    for a, b in covers:
        lines.append(f"cover {a} {b}")
    return "\n".join(lines) + "\n"
