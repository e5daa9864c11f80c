"""Bounded enumeration of finite models, countermodel search for consecutions,
seeded random model generators, and an exhaustive validity sweep.

Enumeration is deterministic and restartable: worlds are labelled ``0..n-1``,
partial orders are generated as transitive strict relations compatible with
the integer order (every finite poset has such a labelling, so the searched
space is exhaustive up to isomorphism), upsets are generated directly rather
than filtered from all subsets, and neighbourhood value maps are enumerated
pointwise.  ``find_countermodel`` returns the first hit in enumeration order;
with several workers the space is partitioned by cell and the globally least
hit is reported, so outcomes do not depend on the worker count.

The vectorized sweep (``sweep_inm_validity``) checks a batch of formulas for
validity over every intuitionistic neighbourhood model within bounds using
bitmask tables over candidate-neighbourhood pairs; it is an optimized
equivalent of running ``find_countermodel`` per formula and is cross-checked
against that reference in the test suite.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .folm import FOMStructure, IFOMStructure, eval_modal_ifom
from .models import (CNModel, IK2Model, INModel, NbhdModel, check_ik2_frame,
                     check_full, check_inm, eval_inm, truth_set_classical,
                     truth_set_cnm, truth_set_ik2, truth_set_inm)
from .syntax import (And, Atom, Box, Consecution, Dia, FALSUM, Falsum, Formula,
                     Implies, Nabla, Or, in_dialect)

KINDS = ("inm", "cnm", "ik2", "ifom", "classical")


@dataclass(frozen=True)
class SearchBounds:
    max_worlds: int
    max_nbhds: int
    max_atoms: int
    require_coherent: bool = False
    require_cartesian: bool = False
    require_full: bool = False

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_nbhds < 0 or self.max_atoms < 0:
            raise ValueError("bounds must be positive (neighbourhoods/atoms may be zero)")


@dataclass
class CounterexampleFound:
    model: object
    world: object
    index: tuple  # (cell index, offset within cell); worker-count independent


@dataclass
class NoneWithinBounds:
    examined: int
    elapsed: float
    timed_out: bool = False


@dataclass
class RefutedAt:
    model: object
    world: object


@dataclass
class UnrefutedWithinBounds:
    examined: int
    elapsed: float
    timed_out: bool = False


# ---------------------------------------------------------------------------
# Frames: posets and upsets
# ---------------------------------------------------------------------------

def strict_posets(n: int) -> list:
    """Transitive strict relations on 0..n-1 with edges pointing up the
    integer order, in bitmask order."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for mask in range(1 << len(pairs)):
        strict = frozenset(pairs[k] for k in range(len(pairs)) if mask >> k & 1)
        if all((a, c) in strict
               for (a, b) in strict for (b2, c) in strict if b2 == b):
            out.append(strict)
    return out


def reflexive(n: int, strict) -> frozenset:
    return frozenset((i, i) for i in range(n)) | strict


def upsets_of_poset(n: int, leq) -> list:
    """All upsets, generated directly: deciding worlds from the top of the
    integer order down, a world may join only if its successors already did."""
    out = []
    chosen: set = set()

    def go(w: int):
        if w < 0:
            out.append(frozenset(chosen))
            return
        go(w - 1)
        if all(v in chosen for v in range(w + 1, n) if (w, v) in leq):
            chosen.add(w)
            go(w - 1)
            chosen.discard(w)

    go(n - 1)
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s))))


def _subsets(n: int) -> list:
    return [frozenset(j for j in range(n) if m >> j & 1) for m in range(1 << n)]


def _upward_closed_sets(worlds, rel) -> list:
    out = []
    items = sorted(worlds)
    for mask in range(1 << len(items)):
        s = frozenset(items[k] for k in range(len(items)) if mask >> k & 1)
        if all(v in s for w in s for v in worlds if (w, v) in rel):
            out.append(s)
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s, key=str))))


# ---------------------------------------------------------------------------
# Enumeration cells (the unit of worker partitioning)
# ---------------------------------------------------------------------------

def _cells(kind: str, bounds: SearchBounds) -> list:
    if kind == "classical":
        return [(n, None) for n in range(1, bounds.max_worlds + 1)]
    if kind == "cnm":
        out = []
        for n in range(1, bounds.max_worlds + 1):
            offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
            for mask in range(1 << len(offdiag)):
                extra = frozenset(offdiag[k] for k in range(len(offdiag)) if mask >> k & 1)
                rel = reflexive(n, extra)
                if all((a, c) in rel for (a, b) in rel for (b2, c) in rel if b2 == b):
                    out.append((n, extra))
        return out
    out = []
    for n in range(1, bounds.max_worlds + 1):
        out.extend((n, strict) for strict in strict_posets(n))
    return out


def _inm_candidates(n: int, leq, upsets) -> list:
    subsets = _subsets(n)
    cands = []
    for dom in upsets:
        dom_t = tuple(sorted(dom))
        for values in itertools.product(subsets, repeat=len(dom_t)):
            cands.append((dom_t, values))
    return cands


def _models_in_cell(kind: str, bounds: SearchBounds, cell) -> Iterator:
    n, extra = cell
    if kind == "inm":
        leq = reflexive(n, extra)
        upsets = upsets_of_poset(n, leq)
        cands = _inm_candidates(n, leq, upsets)
        worlds = frozenset(range(n))
        for k in range(bounds.max_nbhds + 1):
            for combo in itertools.combinations(range(len(cands)), k):
                nbhds = {f"a{i}": dict(zip(cands[c][0], cands[c][1]))
                         for i, c in enumerate(combo)}
                for vals in itertools.product(upsets, repeat=bounds.max_atoms):
                    m = INModel(worlds, leq, nbhds,
                                {i: vals[i] for i in range(bounds.max_atoms)})
                    if bounds.require_coherent and not check_inm(m, "coherent").ok:
                        continue
                    if bounds.require_cartesian and not check_inm(m, "cartesian").ok:
                        continue
                    yield m
    elif kind == "classical":
        subsets = _subsets(n)
        worlds = frozenset(range(n))
        for k in range(bounds.max_nbhds + 1):
            for pool in itertools.combinations(range(len(subsets)), k):
                pool_sets = [subsets[i] for i in pool]
                pool_choices = [frozenset(sel) for r in range(len(pool_sets) + 1)
                                for sel in itertools.combinations(pool_sets, r)]
                for nf_choice in itertools.product(pool_choices, repeat=n):
                    for vals in itertools.product(subsets, repeat=bounds.max_atoms):
                        yield NbhdModel(worlds, dict(enumerate(nf_choice)),
                                        {i: vals[i] for i in range(bounds.max_atoms)})
    elif kind == "cnm":
        rel = reflexive(n, extra)
        worlds = frozenset(range(n))
        upsets = _upward_closed_sets(range(n), rel)
        subsets = _subsets(n)
        per_world = [frozenset(sel) for r in range(bounds.max_nbhds + 1)
                     for sel in itertools.combinations(subsets, r)]
        for gamma_choice in itertools.product(per_world, repeat=n):
            for vals in itertools.product(upsets, repeat=bounds.max_atoms):
                m = CNModel(worlds, rel, dict(enumerate(gamma_choice)),
                            {i: vals[i] for i in range(bounds.max_atoms)})
                if bounds.require_full and not check_full(m):
                    continue
                yield m
    elif kind == "ik2":
        leq = reflexive(n, extra)
        worlds = frozenset(range(n))
        upsets = upsets_of_poset(n, leq)
        all_pairs = [(i, j) for i in range(n) for j in range(n)]
        rels = [frozenset(all_pairs[k] for k in range(len(all_pairs)) if mask >> k & 1)
                for mask in range(1 << len(all_pairs))]
        for relN in rels:
            for relE in rels:
                m0 = IK2Model(worlds, leq, relN, relE, {})
                if not check_ik2_frame(m0).ok:
                    continue
                for vals in itertools.product(upsets, repeat=bounds.max_atoms):
                    yield IK2Model(worlds, leq, relN, relE,
                                   {i: vals[i] for i in range(bounds.max_atoms)})
    elif kind == "ifom":
        yield from _ifom_in_cell(bounds, n, extra)
    else:
        raise ValueError(f"unknown model kind {kind!r}")


def _supersets(base: frozenset, pool: Sequence) -> list:
    extra = [x for x in pool if x not in base]
    return [base | frozenset(sel) for r in range(len(extra) + 1)
            for sel in itertools.combinations(extra, r)]


def _ifom_in_cell(bounds: SearchBounds, n: int, strict) -> Iterator:
    leq = reflexive(n, strict)
    state_pool = tuple(range(bounds.max_worlds))
    nbhd_pool = tuple(range(bounds.max_nbhds))
    atoms = range(bounds.max_atoms)

    def below(w):
        return [v for v in range(w) if (v, w) in leq]

    def go(w: int, interp: dict):
        if w == n:
            yield IFOMStructure(frozenset(range(n)), leq, dict(interp))
            return
        lows = [interp[v] for v in below(w)]
        base_s = frozenset().union(*(m.states for m in lows)) if lows else frozenset()
        base_n = frozenset().union(*(m.nbhds for m in lows)) if lows else frozenset()
        base_rn = frozenset().union(*(m.relN for m in lows)) if lows else frozenset()
        base_re = frozenset().union(*(m.relE for m in lows)) if lows else frozenset()
        base_p = {i: (frozenset().union(*(m.preds.get(i, frozenset()) for m in lows))
                      if lows else frozenset()) for i in atoms}
        for states in _supersets(base_s, state_pool):
            if not states:
                continue
            for nbhds in _supersets(base_n, nbhd_pool):
                rn_pool = [(x, a) for x in sorted(states) for a in sorted(nbhds)]
                re_pool = [(a, x) for a in sorted(nbhds) for x in sorted(states)]
                for relN in _supersets(base_rn, rn_pool):
                    for relE in _supersets(base_re, re_pool):
                        for pred_sets in itertools.product(
                                *(_supersets(base_p[i], sorted(states)) for i in atoms)):
                            interp[w] = FOMStructure(
                                states, nbhds, relN, relE,
                                {i: pred_sets[i] for i in atoms})
                            yield from go(w + 1, interp)
                            del interp[w]

    yield from go(0, {})


def enumerate_models(kind: str, bounds: SearchBounds, dedup: bool = False) -> Iterator:
    """Deterministic, restartable stream of all models of ``kind`` within the
    bounds.  ``dedup`` drops isomorphic duplicates (intuitionistic
    neighbourhood models only; quadratic, meant for small bounds)."""
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    seen: list = []
    for cell in _cells(kind, bounds):
        for m in _models_in_cell(kind, bounds, cell):
            if dedup:
                if kind != "inm":
                    raise ValueError("dedup is only supported for inm models")
                from .models import find_isomorphism
                if any(find_isomorphism(m, old) for old in seen):
                    continue
                seen.append(m)
            yield m


# ---------------------------------------------------------------------------
# Countermodel search
# ---------------------------------------------------------------------------

_EVALUATORS = {
    "inm": (truth_set_inm, ("modal",)),
    "classical": (truth_set_classical, ("modal",)),
    "cnm": (truth_set_cnm, ("modal", "nabla")),
    "ik2": (truth_set_ik2, ("bimodal",)),
}


def _violating_world(kind: str, model, consec: Consecution):
    """Least world (by label) satisfying the context but not the conclusion."""
    if kind == "ifom":
        pairs = sorted(((w, x) for w in model.worlds for x in model.interp[w].states),
                       key=str)
        for (w, x) in pairs:
            if all(eval_modal_ifom(model, w, x, g) for g in consec.context) \
                    and not eval_modal_ifom(model, w, x, consec.conclusion):
                return (w, x)
        return None
    truth_set, _ = _EVALUATORS[kind]
    good = model.worlds
    for g in sorted(consec.context, key=str):
        good = good & truth_set(model, g)
        if not good:
            return None
    bad = good - truth_set(model, consec.conclusion)
    return min(bad, key=str) if bad else None


def _check_dialect(kind: str, consec: Consecution) -> None:
    dialects = ("modal",) if kind == "ifom" else _EVALUATORS[kind][1]
    for f in set(consec.context) | {consec.conclusion}:
        if not any(in_dialect(f, d) for d in dialects):
            raise ValueError(f"formula dialect does not match model kind {kind!r}")


def _scan_cells(args):
    kind, bounds, cells, consec, deadline = args
    examined = 0
    for cell_index, cell in cells:
        base = 0
        for m in _models_in_cell(kind, bounds, cell):
            examined += 1
            base += 1
            if deadline is not None and examined % 256 == 0 and time.monotonic() > deadline:
                return examined, None, True
            world = _violating_world(kind, m, consec)
            if world is not None:
                return examined, (cell_index, base - 1, m, world), False
    return examined, None, False


def find_countermodel(consec: Consecution, kind: str, bounds: SearchBounds,
                      timeout_ms: Optional[int] = None, workers: int = 1):
    """First model and world (in enumeration order) where the whole context
    holds and the conclusion fails; ``NoneWithinBounds`` otherwise."""
    _check_dialect(kind, consec)
    start = time.monotonic()
    deadline = None if timeout_ms is None else start + timeout_ms / 1000.0
    cells = list(enumerate(_cells(kind, bounds)))
    examined = 0
    timed_out = False
    if workers <= 1:
        examined, hit, timed_out = _scan_cells((kind, bounds, cells, consec, deadline))
        if hit is not None:
            cell_index, offset, model, world = hit
            return CounterexampleFound(model, world, (cell_index, offset))
        return NoneWithinBounds(examined, time.monotonic() - start, timed_out)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for wave_start in range(0, len(cells), workers):
            wave = cells[wave_start:wave_start + workers]
            jobs = [pool.submit(_scan_cells, (kind, bounds, [c], consec, deadline))
                    for c in wave]
            hits = []
            for job in jobs:
                got, hit, t_out = job.result()
                examined += got
                timed_out = timed_out or t_out
                if hit is not None:
                    hits.append(hit)
            if hits:
                cell_index, offset, model, world = min(hits, key=lambda h: (h[0], h[1]))
                return CounterexampleFound(model, world, (cell_index, offset))
            if timed_out:
                break
    return NoneWithinBounds(examined, time.monotonic() - start, timed_out)


def oracle_consequence(context: Iterable[Formula], phi: Formula, kind: str,
                       bounds: SearchBounds, timeout_ms: Optional[int] = None,
                       workers: int = 1):
    """Bounded refutation oracle: a found counterexample refutes the
    consequence; exhausting the bounds certifies nothing beyond them."""
    consec = Consecution(frozenset(context), phi)
    result = find_countermodel(consec, kind, bounds, timeout_ms, workers)
    if isinstance(result, CounterexampleFound):
        return RefutedAt(result.model, result.world)
    return UnrefutedWithinBounds(result.examined, result.elapsed, result.timed_out)


# ---------------------------------------------------------------------------
# Random model generators (seeded)
# ---------------------------------------------------------------------------

def random_poset(rng, n: int, edge_prob: float = 0.4) -> frozenset:
    strict = {(i, j) for i in range(n) for j in range(i + 1, n)
              if rng.random() < edge_prob}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(strict):
            for (b2, c) in list(strict):
                if b2 == b and (a, c) not in strict:
                    strict.add((a, c))
                    changed = True
    return reflexive(n, frozenset(strict))


def _random_upset(rng, worlds, leq) -> frozenset:
    seed = {w for w in worlds if rng.random() < 0.4}
    return frozenset(v for v in worlds if any((w, v) in leq for w in seed))


def random_inm(rng, bounds: SearchBounds) -> INModel:
    n = rng.randint(1, bounds.max_worlds)
    worlds = frozenset(range(n))
    leq = random_poset(rng, n)
    nbhds = {}
    for i in range(rng.randint(0, bounds.max_nbhds)):
        dom = _random_upset(rng, worlds, leq)
        nbhds[f"a{i}"] = {w: frozenset(v for v in worlds if rng.random() < 0.5)
                          for w in dom}
    val = {i: _random_upset(rng, worlds, leq) for i in range(bounds.max_atoms)}
    return INModel(worlds, leq, nbhds, val)


def random_coherent_inm(rng, bounds: SearchBounds, attempts: int = 40) -> INModel:
    """Rejection-sample coherent models, falling back to a constructive family
    (increasing upset-valued neighbourhoods are always coherent)."""
    for _ in range(attempts):
        m = random_inm(rng, bounds)
        if check_inm(m, "coherent").ok:
            return m
    n = rng.randint(1, bounds.max_worlds)
    worlds = frozenset(range(n))
    leq = random_poset(rng, n)
    nbhds = {}
    for i in range(rng.randint(0, bounds.max_nbhds)):
        dom = _random_upset(rng, worlds, leq)
        base = {w: _random_upset(rng, worlds, leq) for w in dom}
        # close values upward along the order so both coherence conditions hold
        values = {w: frozenset().union(base[w],
                                       *(base[v] for v in dom if (v, w) in leq))
                  for w in dom}
        nbhds[f"a{i}"] = values
    val = {i: _random_upset(rng, worlds, leq) for i in range(bounds.max_atoms)}
    m = INModel(worlds, leq, nbhds, val)
    assert check_inm(m, "coherent").ok
    return m


def random_cnm(rng, bounds: SearchBounds) -> CNModel:
    n = rng.randint(1, bounds.max_worlds)
    worlds = frozenset(range(n))
    extra = {(i, j) for i in range(n) for j in range(n)
             if i != j and rng.random() < 0.3}
    rel = set(reflexive(n, frozenset(extra)))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (b2, c) in list(rel):
                if b2 == b and (a, c) not in rel:
                    rel.add((a, c))
                    changed = True
    rel = frozenset(rel)
    gamma = {w: frozenset(frozenset(v for v in worlds if rng.random() < 0.5)
                          for _ in range(rng.randint(0, bounds.max_nbhds)))
             for w in worlds}
    val = {}
    for i in range(bounds.max_atoms):
        seed = {w for w in worlds if rng.random() < 0.4}
        val[i] = frozenset(v for v in worlds if any((w, v) in rel for w in seed))
    return CNModel(worlds, rel, gamma, val)


def random_ifom(rng, max_worlds: int = 4, max_states: int = 3,
                max_nbhds: int = 2, max_atoms: int = 2) -> IFOMStructure:
    n = rng.randint(1, max_worlds)
    leq = random_poset(rng, n)
    order = list(range(n))
    interp = {}
    for w in order:
        lows = [interp[v] for v in range(w) if (v, w) in leq]
        states = set().union(*(m.states for m in lows)) if lows else set()
        nbhds = set().union(*(m.nbhds for m in lows)) if lows else set()
        relN = set().union(*(m.relN for m in lows)) if lows else set()
        relE = set().union(*(m.relE for m in lows)) if lows else set()
        preds = {i: set().union(*(m.preds.get(i, frozenset()) for m in lows))
                 if lows else set() for i in range(max_atoms)}
        for d in range(max_states):
            if f"d{d}" not in states and rng.random() < 0.5:
                states.add(f"d{d}")
        if not states:
            states.add("d0")
        for a in range(max_nbhds):
            if f"n{a}" not in nbhds and rng.random() < 0.4:
                nbhds.add(f"n{a}")
        for x in states:
            for a in nbhds:
                if rng.random() < 0.4:
                    relN.add((x, a))
                if rng.random() < 0.4:
                    relE.add((a, x))
        for i in range(max_atoms):
            for x in states:
                if rng.random() < 0.3:
                    preds[i].add(x)
        interp[w] = FOMStructure(frozenset(states), frozenset(nbhds),
                                 frozenset(relN), frozenset(relE),
                                 {i: frozenset(preds[i]) for i in range(max_atoms)})
    return IFOMStructure(frozenset(order), leq, interp)


def random_formula(rng, max_depth: int, atom_count: int = 2,
                   dialect: str = "modal", max_nodes: int = 24) -> Formula:
    """Random formula whose modal depth (modalities and implications) stays
    within ``max_depth``; a node budget keeps trees finite."""
    modal_ops = {"modal": [Box, Dia], "nabla": [Nabla]}.get(dialect, [Box, Dia])
    remaining = [max_nodes]

    def go(budget: int) -> Formula:
        remaining[0] -= 1
        choices = ["atom", "atom", "falsum", "and", "or"]
        if budget > 0:
            choices += ["implies", "modal", "modal"]
        pick = rng.choice(choices) if remaining[0] > 0 else rng.choice(["atom", "falsum"])
        if pick == "atom":
            return Atom(rng.randrange(atom_count)) if atom_count else FALSUM
        if pick == "falsum":
            return FALSUM
        if pick == "and":
            return And(go(budget), go(budget))
        if pick == "or":
            return Or(go(budget), go(budget))
        if pick == "implies":
            return Implies(go(budget - 1), go(budget - 1))
        return rng.choice(modal_ops)(go(budget - 1))

    return go(max_depth)


# ---------------------------------------------------------------------------
# Vectorized exhaustive validity sweep (intuitionistic neighbourhood models)
# ---------------------------------------------------------------------------

def _mask_of(s, n: int) -> int:
    return sum(1 << w for w in s)


def sweep_inm_validity(formulas: Sequence[Formula], bounds: SearchBounds):
    """For each formula, scan every intuitionistic neighbourhood model within
    the bounds (neighbourhood count at most two) and report ``None`` when the
    formula holds at every world of every model, else a verified witness
    ``(model, world)``.

    Models with two neighbourhoods are evaluated in bulk as bitmask arrays
    indexed by candidate pairs; the diagonal covers singleton models and the
    empty neighbourhood set is evaluated separately.
    """
    if bounds.max_nbhds > 2:
        raise ValueError("the vectorized sweep supports at most two neighbourhoods")
    results: list = [None] * len(formulas)
    pending = set(range(len(formulas)))
    for n in range(1, bounds.max_worlds + 1):
        for strict in strict_posets(n):
            if not pending:
                return results
            _sweep_cell(formulas, bounds, n, strict, results, pending)
    return results


def _sweep_cell(formulas, bounds, n, strict, results, pending):
    if n > 8:
        raise ValueError("the vectorized sweep supports at most eight worlds")
    leq = reflexive(n, strict)
    full = (1 << n) - 1
    upsets = upsets_of_poset(n, leq)
    upset_masks = [_mask_of(s, n) for s in upsets]
    up_mask = [sum(1 << v for v in range(n) if (w, v) in leq) for w in range(n)]
    down = np.zeros(1 << n, dtype=np.uint8)
    for m in range(1 << n):
        acc = 0
        for w in range(n):
            if any(m >> v & 1 for v in range(n) if (w, v) in leq):
                acc |= 1 << w
        down[m] = acc

    cands = _inm_candidates(n, leq, upsets)
    s_count = len(cands)
    dom_mask = [ _mask_of(c[0], n) for c in cands]
    val_mask = [[0] * n for _ in range(s_count)]
    for ci, (dom_t, values) in enumerate(cands):
        for w, value in zip(dom_t, values):
            val_mask[ci][w] = _mask_of(value, n)

    box_tab = np.zeros((s_count, 1 << n), dtype=np.uint8)
    dia_tab = np.zeros((s_count, 1 << n), dtype=np.uint8)
    for ci in range(s_count):
        dm = dom_mask[ci]
        vm = val_mask[ci]
        for t in range(1 << n):
            b = d = 0
            for w in range(n):
                ok_box = bool(dm >> w & 1)
                ok_dia = True
                for v in range(n):
                    if up_mask[w] >> v & 1 and dm >> v & 1:
                        if vm[v] & ~t:
                            ok_box = False
                        if not (vm[v] & t):
                            ok_dia = False
                if ok_box:
                    b |= 1 << w
                if ok_dia:
                    d |= 1 << w
            box_tab[ci, t] = b
            dia_tab[ci, t] = d
    rows = np.arange(s_count)[:, None]
    cols = np.arange(s_count)[None, :]

    def pair_eval(phi, valuation, memo):
        if phi in memo:
            return memo[phi]
        if isinstance(phi, Atom):
            r = np.full((s_count, s_count), valuation.get(phi.index, 0), dtype=np.uint8)
        elif isinstance(phi, Falsum):
            r = np.zeros((s_count, s_count), dtype=np.uint8)
        elif isinstance(phi, And):
            r = pair_eval(phi.left, valuation, memo) & pair_eval(phi.right, valuation, memo)
        elif isinstance(phi, Or):
            r = pair_eval(phi.left, valuation, memo) | pair_eval(phi.right, valuation, memo)
        elif isinstance(phi, Implies):
            x = pair_eval(phi.left, valuation, memo)
            y = pair_eval(phi.right, valuation, memo)
            r = full & ~down[x & (full ^ y)]
        elif isinstance(phi, Box):
            t = pair_eval(phi.sub, valuation, memo)
            r = box_tab[rows, t] | box_tab[cols, t]
        elif isinstance(phi, Dia):
            t = pair_eval(phi.sub, valuation, memo)
            r = dia_tab[rows, t] & dia_tab[cols, t]
        else:
            raise TypeError(f"not a modal-dialect formula: {phi!r}")
        memo[phi] = r
        return r

    def scalar_eval(phi, valuation, memo):
        # the empty neighbourhood set: box never holds, diamond always
        if phi in memo:
            return memo[phi]
        if isinstance(phi, Atom):
            r = valuation.get(phi.index, 0)
        elif isinstance(phi, Falsum):
            r = 0
        elif isinstance(phi, And):
            r = scalar_eval(phi.left, valuation, memo) & scalar_eval(phi.right, valuation, memo)
        elif isinstance(phi, Or):
            r = scalar_eval(phi.left, valuation, memo) | scalar_eval(phi.right, valuation, memo)
        elif isinstance(phi, Implies):
            x = scalar_eval(phi.left, valuation, memo)
            y = scalar_eval(phi.right, valuation, memo)
            r = full & ~int(down[x & (full ^ y)])
        elif isinstance(phi, Box):
            scalar_eval(phi.sub, valuation, memo)
            r = 0
        elif isinstance(phi, Dia):
            scalar_eval(phi.sub, valuation, memo)
            r = full
        else:
            raise TypeError(f"not a modal-dialect formula: {phi!r}")
        memo[phi] = r
        return r

    def realize(ci, cj, valuation_sets):
        names = {}
        picks = [ci] if cj is None else [ci, cj]
        for i, c in enumerate(picks):
            dom_t, values = cands[c]
            names[f"a{i}"] = dict(zip(dom_t, values))
        return INModel(frozenset(range(n)), leq, names,
                       {i: valuation_sets[i] for i in range(len(valuation_sets))})

    for vals in itertools.product(range(len(upsets)), repeat=bounds.max_atoms):
        valuation = {i: upset_masks[v] for i, v in enumerate(vals)}
        valuation_sets = [upsets[v] for v in vals]
        memo_pair: dict = {}
        memo_scalar: dict = {}
        for fi in sorted(pending):
            phi = formulas[fi]
            sc = scalar_eval(phi, valuation, memo_scalar)
            if sc != full:
                world = min(w for w in range(n) if not sc >> w & 1)
                model = INModel(frozenset(range(n)), leq, {},
                                {i: valuation_sets[i] for i in range(len(valuation_sets))})
                results[fi] = (model, world)
                pending.discard(fi)
                continue
            if bounds.max_nbhds == 0 or s_count == 0:
                continue
            arr = pair_eval(phi, valuation, memo_pair)
            if bounds.max_nbhds == 1:
                arr = arr.diagonal()
            bad = np.argwhere(arr != full)
            if bad.size:
                first = bad[0]
                if bounds.max_nbhds == 1:
                    ci, cj = int(first[0]), None
                    mask = int(arr[first[0]])
                else:
                    ci, cj = int(first[0]), int(first[1])
                    mask = int(arr[first[0], first[1]])
                    if ci == cj:
                        cj = None
                world = min(w for w in range(n) if not mask >> w & 1)
                model = realize(ci, cj, valuation_sets)
                assert not eval_inm(model, world, phi)  # witnesses must re-check
                results[fi] = (model, world)
                pending.discard(fi)
