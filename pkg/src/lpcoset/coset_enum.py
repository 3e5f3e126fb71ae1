"""Todd-Coxeter coset enumeration over a finite presentation.

Two table forms: a mutable engine used while enumerating (rows indexed by
coset id with a union-find over ids, a deduction stack, and a coincidence
queue) and an immutable snapshot (:class:`CosetTable`) used by everything
else.  Signed letters map to column indices so that a column's inverse is
``col ^ 1``.  Coset ids are dense positive integers; ids freed by
coincidences are never reused within a run, and snapshots are compressed
back to 1..n preserving id order.

Strategies: ``felsch`` (deduction driven, the default) processes every
relator rotation through each new edge, which keeps tables small on
relator-heavy covering presentations; ``hlt`` (relator driven) sweeps
relators coset by coset, optionally running a coincidence-only lookahead
pass when the coset limit is hit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, PreconditionError
from .perms import Permutation, PermutationRep
from .presentations import FinitePresentation, SubgroupSpec
from .words import Alphabet, Word, _require_same_alphabet

DEFAULT_MAX_COSETS = 10**6


def _col_of(letter: int) -> int:
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _col_word(w: Word) -> tuple[int, ...]:
    return tuple(_col_of(x) for x in w.letters)


def _inverse_col_word(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(c ^ 1 for c in reversed(w))


def _cyclically_reduce(w: Sequence[int]) -> tuple[int, ...]:
    w = list(w)
    while len(w) >= 2 and w[0] == w[-1] ^ 1:
        w = w[1:-1]
    return tuple(w)


@dataclass(frozen=True)
class CosetTable:
    """Action of the generators on cosets 1..n; entry 0 means undefined.

    ``rows[c - 1][col]`` is the image of coset c under the column's signed
    letter.  Whenever an entry is defined its mirror is too, so defined
    entries always satisfy the action-consistency invariant.
    """

    alphabet: Alphabet
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        ncols = 2 * len(self.alphabet)
        for c, row in enumerate(rows, start=1):
            if len(row) != ncols:
                raise InputError(f"row {c} has {len(row)} entries, expected {ncols}")
            for col, d in enumerate(row):
                if d == 0:
                    continue
                if not 1 <= d <= n:
                    raise InputError(f"entry {d} out of range in row {c}")
                if rows[d - 1][col ^ 1] != c:
                    raise InputError(
                        f"action inconsistency: {c} -> {d} lacks mirror on column {col ^ 1}"
                    )

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def is_closed(self) -> bool:
        return all(all(d != 0 for d in row) for row in self.rows)

    def entry(self, coset: int, letter: int) -> int:
        """Raw table entry (0 when undefined)."""
        return self.rows[coset - 1][_col_of(letter)]


def trace(table: CosetTable, start: int, w: Word) -> int | None:
    """Follow ``w`` letter by letter from ``start``; None when undefined."""
    if not 1 <= start <= table.size:
        raise InputError(f"coset {start} out of range 1..{table.size}")
    _require_same_alphabet(table.alphabet, w.alphabet)
    c = start
    rows = table.rows
    for x in w.letters:
        c = rows[c - 1][_col_of(x)]
        if c == 0:
            return None
    return c


class _Overflow(Exception):
    pass


class _Engine:
    """Mutable enumeration state; rows are 1-based with ``tab[0]`` unused."""

    def __init__(self, ncols: int, max_cosets: int, max_steps: int | None = None):
        self.ncols = ncols
        self.tab: list[list[int] | None] = [None, [0] * ncols]
        self.p = [0, 1]
        self.ndead = 0
        self.steps = 0
        self.max_cosets = max_cosets
        self.max_steps = max_steps
        self.deductions: list[tuple[int, int]] = []
        self.track_deductions = True

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int) -> "_Engine":
        eng = cls(ncols, max_cosets=len(rows) + 1)
        eng.tab = [None] + [list(r) for r in rows]
        eng.p = list(range(len(rows) + 1))
        return eng

    @property
    def alive(self) -> int:
        return len(self.tab) - 1 - self.ndead

    def find(self, c: int) -> int:
        p = self.p
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def define(self, a: int, col: int) -> int:
        """Adjoin a fresh coset as the image of ``a`` under ``col``."""
        if self.alive >= self.max_cosets:
            raise _Overflow
        self.steps += 1
        if self.max_steps is not None and self.steps > self.max_steps:
            raise _Overflow
        b = len(self.tab)
        self.tab.append([0] * self.ncols)
        self.p.append(b)
        self.tab[a][col] = b
        self.tab[b][col ^ 1] = a
        if self.track_deductions:
            self.deductions.append((a, col))
        return b

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.p[b] = a
        self.ndead += 1
        queue.append(b)

    def coincide(self, a: int, b: int) -> None:
        """Identify two cosets and propagate until the table is consistent.

        Rows of dying cosets are migrated eagerly; every edge that is
        re-established on a survivor is pushed as a deduction so relator
        scans stay complete after the merge.
        """
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            dead = queue[i]
            i += 1
            row = self.tab[dead]
            for col in range(self.ncols):
                f = row[col]
                if f == 0:
                    continue
                row[col] = 0
                if self.tab[f][col ^ 1] == dead:
                    self.tab[f][col ^ 1] = 0
                mu = self.find(dead)
                nu = self.find(f)
                t = self.tab[mu][col]
                if t != 0:
                    self._merge(nu, t, queue)
                else:
                    t = self.tab[nu][col ^ 1]
                    if t != 0:
                        self._merge(mu, t, queue)
                    else:
                        self.tab[mu][col] = nu
                        self.tab[nu][col ^ 1] = mu
                if self.track_deductions:
                    self.deductions.append((mu, col))

    def scan(self, a: int, w: Sequence[int]) -> None:
        """Trace the cycle ``w`` based at ``a``; deduce or coincide."""
        tab = self.tab
        f = a
        i = 0
        r = len(w)
        while i < r:
            t = tab[f][w[i]]
            if t == 0:
                break
            f = t
            i += 1
        else:
            if f != a:
                self.coincide(f, a)
            return
        b = a
        j = r
        while j > i:
            t = tab[b][w[j - 1] ^ 1]
            if t == 0:
                break
            b = t
            j -= 1
        if j == i:
            if f != b:
                self.coincide(f, b)
        elif j == i + 1:
            tab[f][w[i]] = b
            tab[b][w[i] ^ 1] = f
            if self.track_deductions:
                self.deductions.append((f, w[i]))

    def scan_fill(self, a: int, w: Sequence[int]) -> None:
        """Scan, defining new cosets until the cycle closes."""
        tab = self.tab
        f = a
        i = 0
        r = len(w)
        b = a
        j = r
        while True:
            while i < j:
                t = tab[f][w[i]]
                if t == 0:
                    break
                f = t
                i += 1
            if i == j:
                if f != b:
                    self.coincide(f, b)
                return
            while j > i:
                t = tab[b][w[j - 1] ^ 1]
                if t == 0:
                    break
                b = t
                j -= 1
            if j == i:
                if f != b:
                    self.coincide(f, b)
                return
            if j == i + 1:
                tab[f][w[i]] = b
                tab[b][w[i] ^ 1] = f
                if self.track_deductions:
                    self.deductions.append((f, w[i]))
                return
            f = self.define(f, w[i])
            i += 1

    def process_deductions(self, rot_by_col: list[list[tuple[int, ...]]]) -> None:
        while self.deductions:
            a, col = self.deductions.pop()
            if self.p[a] == a:
                for w in rot_by_col[col]:
                    self.scan(a, w)
                    if self.p[a] != a:
                        break
            if self.p[a] != a:
                continue
            b = self.tab[a][col]
            if b and self.p[b] == b:
                for w in rot_by_col[col ^ 1]:
                    self.scan(b, w)
                    if self.p[b] != b:
                        break

    def live_cosets(self) -> list[int]:
        return [c for c in range(1, len(self.tab)) if self.p[c] == c]

    def snapshot(self, alphabet: Alphabet) -> CosetTable:
        """Compress live cosets to 1..n in id order."""
        live = self.live_cosets()
        newid = {c: i + 1 for i, c in enumerate(live)}
        rows = []
        for c in live:
            row = []
            for d in self.tab[c]:
                row.append(newid[self.find(d)] if d else 0)
            rows.append(tuple(row))
        return CosetTable(alphabet, tuple(rows))


def _rotation_index(ncols: int, relators: Iterable[tuple[int, ...]]):
    """Rotations of each relator and its inverse, bucketed by first column."""
    buckets: list[list[tuple[int, ...]]] = [[] for _ in range(ncols)]
    seen: list[set] = [set() for _ in range(ncols)]
    for w in relators:
        for u in (w, _inverse_col_word(w)):
            for i in range(len(u)):
                rot = u[i:] + u[:i]
                if rot not in seen[rot[0]]:
                    seen[rot[0]].add(rot)
                    buckets[rot[0]].append(rot)
    return buckets


def _prepared_relators(fp: FinitePresentation) -> list[tuple[int, ...]]:
    out = []
    seen = set()
    for r in fp.relators:
        w = _cyclically_reduce(_col_word(r))
        if w and w not in seen:
            seen.add(w)
            out.append(w)
    return out


def todd_coxeter(
    fp: FinitePresentation,
    sub: SubgroupSpec,
    *,
    max_cosets: int = DEFAULT_MAX_COSETS,
    max_steps: int | None = None,
    strategy: str = "felsch",
    hlt_lookahead: bool = False,
) -> CosetTable | None:
    """Enumerate the cosets of ``sub`` modulo the relators of ``fp``.

    Returns the closed table, or ``None`` when a limit was hit (a normal
    outcome that callers treat as a signal to escalate).  The closed table
    is verified before being returned: every relator closes from every
    coset and every subgroup generator closes from coset 1.
    """
    _require_same_alphabet(fp.alphabet, sub.alphabet)
    if max_cosets < 1:
        raise InputError("max_cosets must be positive")
    if max_steps is not None and max_steps < 1:
        raise InputError("max_steps must be positive")
    if strategy not in ("felsch", "hlt"):
        raise InputError(f"unknown strategy {strategy!r}")
    ncols = 2 * len(fp.alphabet)
    relators = _prepared_relators(fp)
    subgens = [w for w in (_col_word(g) for g in sub.generators) if w]
    eng = _Engine(ncols, max_cosets, max_steps)
    try:
        if strategy == "felsch":
            _run_felsch(eng, relators, subgens)
        else:
            _run_hlt(eng, relators, subgens, hlt_lookahead)
    except _Overflow:
        return None
    table = eng.snapshot(fp.alphabet)
    _verify_closed(table, fp, sub)
    return table


def _run_felsch(eng: _Engine, relators, subgens) -> None:
    rot_by_col = _rotation_index(eng.ncols, relators)
    for w in subgens:
        eng.scan_fill(1, w)
        eng.process_deductions(rot_by_col)
    a = 1
    while a < len(eng.tab):
        if eng.p[a] == a:
            for col in range(eng.ncols):
                if eng.p[a] != a:
                    break
                if eng.tab[a][col] == 0:
                    eng.define(a, col)
                    eng.process_deductions(rot_by_col)
        a += 1


def _run_hlt(eng: _Engine, relators, subgens, lookahead: bool) -> None:
    eng.track_deductions = False

    def sweep() -> None:
        for w in subgens:
            eng.scan_fill(1, w)
        a = 1
        while a < len(eng.tab):
            if eng.p[a] == a:
                for w in relators:
                    eng.scan_fill(a, w)
                    if eng.p[a] != a:
                        break
                if eng.p[a] == a:
                    for col in range(eng.ncols):
                        if eng.tab[a][col] == 0:
                            eng.define(a, col)
            a += 1

    while True:
        before = (len(eng.tab), eng.ndead)
        try:
            sweep()
        except _Overflow:
            if not lookahead:
                raise
            dead_before = eng.ndead
            for a in eng.live_cosets():
                for w in relators:
                    if eng.p[a] != a:
                        break
                    eng.scan(a, w)
            if eng.ndead == dead_before:
                raise
            continue
        # Coincidences can graft unscanned edges onto already-processed
        # rows; sweep again until a pass changes nothing.
        if (len(eng.tab), eng.ndead) == before:
            return


def _verify_closed(table: CosetTable, fp: FinitePresentation, sub: SubgroupSpec) -> None:
    if not table.is_closed:
        raise RuntimeError("enumeration stopped with an incomplete table")
    for c in range(1, table.size + 1):
        for r in fp.relators:
            if trace(table, c, r) != c:
                raise RuntimeError(f"relator {r} does not close from coset {c}")
    for g in sub.generators:
        if trace(table, 1, g) != 1:
            raise RuntimeError(f"subgroup generator {g} does not fix coset 1")


def merge_coincidence(table: CosetTable, c: int, d: int) -> CosetTable:
    """Identify cosets c and d and close under the induced identifications."""
    return merge_coincidences(table, [(c, d)])


def merge_coincidences(
    table: CosetTable, pairs: Iterable[tuple[int, int]]
) -> CosetTable:
    ncols = 2 * len(table.alphabet)
    eng = _Engine.from_rows(table.rows, ncols)
    eng.track_deductions = False
    for c, d in pairs:
        if not (1 <= c <= table.size and 1 <= d <= table.size):
            raise InputError(f"coset pair ({c}, {d}) out of range")
        eng.coincide(eng.find(c), eng.find(d))
    return eng.snapshot(table.alphabet)


def standardize(table: CosetTable) -> CosetTable:
    """Relabel cosets in breadth-first discovery order over the generators.

    Two closed tables describe the same subgroup of the same presentation
    exactly when their standardized forms are identical.
    """
    if not table.is_closed:
        raise PreconditionError("standardize requires a closed table")
    n = table.size
    ngens = len(table.alphabet)
    newid = {1: 1}
    order = [1]
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        for g in range(ngens):
            d = table.rows[c - 1][2 * g]
            if d not in newid:
                newid[d] = len(order) + 1
                order.append(d)
    if len(order) != n:
        raise PreconditionError("table is not transitive from coset 1")
    rows: list[tuple[int, ...]] = [()] * n
    for c in range(1, n + 1):
        rows[newid[c] - 1] = tuple(newid[d] for d in table.rows[c - 1])
    return CosetTable(table.alphabet, tuple(rows))


def to_perm_rep(table: CosetTable) -> PermutationRep:
    """The permutation action of each generator on the cosets."""
    if not table.is_closed:
        raise PreconditionError("permutation representation requires a closed table")
    perms = []
    for g in range(len(table.alphabet)):
        perms.append(
            Permutation(tuple(table.rows[c][2 * g] for c in range(table.size)))
        )
    return PermutationRep(table.alphabet, table.size, tuple(perms))


def table_from_rep(rep: PermutationRep) -> CosetTable:
    """The closed table whose generator actions are the given permutations."""
    rows = []
    for c in range(1, rep.degree + 1):
        row = []
        for g in range(len(rep.alphabet)):
            row.append(rep.perms[g].apply(c))
            row.append(rep.perms[g].inverse().apply(c))
        rows.append(tuple(row))
    return CosetTable(rep.alphabet, tuple(rows))


def coset_representatives(table: CosetTable) -> list[Word]:
    """Shortest transversal words, breadth-first, generators before inverses."""
    if not table.is_closed:
        raise PreconditionError("transversal requires a closed table")
    ngens = len(table.alphabet)
    step_letters = [g + 1 for g in range(ngens)] + [-(g + 1) for g in range(ngens)]
    reps: list[Word | None] = [None] * (table.size + 1)
    reps[1] = Word.identity(table.alphabet)
    order = [1]
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        for x in step_letters:
            d = table.rows[c - 1][_col_of(x)]
            if reps[d] is None:
                reps[d] = reps[c] * Word.generator(table.alphabet, abs(x)) ** (
                    1 if x > 0 else -1
                )
                order.append(d)
    return [reps[c] for c in range(1, table.size + 1)]


def schreier_generators(table: CosetTable) -> tuple[Word, ...]:
    """Generators of the subgroup fixing coset 1: u * x * (rep of u x)^-1.

    Freely reduced, identity entries dropped, exact duplicates kept once.
    """
    reps = coset_representatives(table)
    out = []
    seen = set()
    for c in range(1, table.size + 1):
        for g in range(len(table.alphabet)):
            d = table.rows[c - 1][2 * g]
            word = reps[c - 1] * Word.generator(table.alphabet, g + 1) * reps[d - 1].inverse()
            if word.is_identity or word.letters in seen:
                continue
            seen.add(word.letters)
            out.append(word)
    return tuple(out)


def dump_table(table: CosetTable) -> str:
    """One line per coset: targets under generators, then under inverses."""
    ngens = len(table.alphabet)
    cols = [2 * g for g in range(ngens)] + [2 * g + 1 for g in range(ngens)]
    lines = []
    for row in table.rows:
        lines.append("\t".join(str(row[col]) for col in cols))
    return "\n".join(lines) + "\n"


def parse_table_dump(alphabet: Alphabet, text: str) -> CosetTable:
    from .errors import ParseError

    ngens = len(alphabet)
    cols = [2 * g for g in range(ngens)] + [2 * g + 1 for g in range(ngens)]
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 * ngens:
            raise ParseError(
                f"line {lineno}: expected {2 * ngens} entries, got {len(parts)}"
            )
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer table entry") from None
        row = [0] * (2 * ngens)
        for col, v in zip(cols, values):
            row[col] = v
        rows.append(tuple(row))
    try:
        return CosetTable(alphabet, tuple(rows))
    except InputError as exc:
        raise ParseError(f"inconsistent table dump: {exc}") from exc
