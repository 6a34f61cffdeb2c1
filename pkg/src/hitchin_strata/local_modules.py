"""Invariants of rank-1 torsion-free modules at A_n curve singularities.

Two families of local rings inside their normalizations, truncated at
order N and handled by exact linear algebra over rationals:

  * A_even(n) ~ A_{2n}:   R = C[[t^2, t^{2n+1}]] inside R~ = C[[t]]
    (parametrized so that r -> t^{2n+1}, s -> t^2, which does satisfy
    r^2 = s^{2n+1}); modules M_k = R + R t^k for odd k in [1, 2n+1].
  * A_odd(n) ~ A_{2n-1}:  R = C[[(t,t), (t^n, -t^n)]] inside
    R~ = C[[t]] x C[[t]]; modules M_k = R + R (t^k, 0) for k in [0, n].

Computed per module: ell = dim(M/R); the conductor (largest ideal of the
normalization contained in M, per branch) and the a-invariants
a = dim(R~/C) per branch; and the torsion of M (x)_R R~, i.e. the kernel
of the multiplication map to R~, from a finite presentation.  The kernel
has total dimension 2*ell and splits into two eigenspaces of the cover
involution (t -> -t, resp. branch swap); b is the dimension of the
anti-invariant eigenspace, which is the invariant the closed-form
classification refers to (its published basis {s_i} spans exactly that
eigenspace).  Both numbers are reported and all dimensions are checked
for truncation stability at N and N+4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

A_EVEN = "A_even"
A_ODD = "A_odd"

ONE = Fraction(1)


class TruncationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Sparse exact linear algebra: vectors are dicts index -> Fraction.


def _sub_scaled(vec, row, c):
    for k, v in row.items():
        nv = vec.get(k, 0) - c * v
        if nv:
            vec[k] = nv
        else:
            vec.pop(k, None)


def _reduce(rows, vec):
    """Residual of vec after elimination against echelon rows (pivot->row)."""
    vec = {k: Fraction(v) for k, v in vec.items() if v}
    while True:
        common = [k for k in vec if k in rows]
        if not common:
            return vec
        k = min(common)
        _sub_scaled(vec, rows[k], vec[k])


class Echelon:
    """Row-echelon accumulator over exact rationals."""

    def __init__(self):
        self.rows = {}

    def insert(self, vec) -> bool:
        red = _reduce(self.rows, vec)
        if not red:
            return False
        pivot = min(red)
        c = red[pivot]
        self.rows[pivot] = {k: v / c for k, v in red.items()}
        return True

    def contains(self, vec) -> bool:
        return not _reduce(self.rows, vec)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def copy(self) -> "Echelon":
        out = Echelon()
        out.rows = {k: dict(r) for k, r in self.rows.items()}
        return out


def _nullspace(columns):
    """Coefficient combinations (dict col-index -> Fraction) spanning the
    kernel of the map sending unit vectors to the given columns."""
    rows = {}  # pivot -> (row, combo)
    null = []
    for i, col in enumerate(columns):
        vec = {k: Fraction(v) for k, v in col.items() if v}
        combo = {i: ONE}
        while True:
            common = [k for k in vec if k in rows]
            if not common:
                break
            k = min(common)
            c = vec[k]
            rvec, rcombo = rows[k]
            _sub_scaled(vec, rvec, c)
            _sub_scaled(combo, rcombo, c)
        if vec:
            pivot = min(vec)
            c = vec[pivot]
            rows[pivot] = (
                {k: v / c for k, v in vec.items()},
                {k: v / c for k, v in combo.items()},
            )
        else:
            null.append(combo)
    return null


# ---------------------------------------------------------------------------
# Truncated rings.


@dataclass(frozen=True)
class TruncatedRing:
    singularity: str  # A_EVEN or A_ODD
    n: int
    N: int

    def __post_init__(self):
        if self.singularity not in (A_EVEN, A_ODD):
            raise ValueError(f"unknown singularity family {self.singularity!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.N < 2 * (2 * self.n + 2):
            raise TruncationError(
                f"N = {self.N} too small; need N >= {2 * (2 * self.n + 2)}"
            )

    # Normalization R~ as a vector space.  A_even: index j <-> t^j.
    # A_odd: index 2j + branch <-> t^j on that branch.
    @property
    def branches(self) -> int:
        return 1 if self.singularity == A_EVEN else 2

    @property
    def dim(self) -> int:
        return self.branches * self.N

    def monomial(self, exp: int, branch: int = 0):
        return {self.branches * exp + branch: ONE}

    def mul(self, a, b):
        """Truncated product in R~ (branchwise convolution)."""
        br = self.branches
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                if br == 2 and i % 2 != j % 2:
                    continue
                e = i // br + j // br
                if e >= self.N:
                    continue
                k = br * e + i % br
                nv = out.get(k, 0) + x * y
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def r_basis(self):
        """Basis of the truncated local ring inside R~."""
        if self.singularity == A_EVEN:
            exps = [j for j in range(self.N) if j % 2 == 0 or j >= 2 * self.n + 1]
            return [self.monomial(j) for j in exps]
        out = []
        for i in range(min(self.n, self.N)):
            out.append({2 * i: ONE, 2 * i + 1: ONE})
        for j in range(self.n, self.N):
            out.append(self.monomial(j, 0))
            out.append(self.monomial(j, 1))
        return out

    def module_generator(self, k: int):
        """The second generator of M_k (the first is 1)."""
        self.check_k(k)
        if self.singularity == A_EVEN:
            return self.monomial(k)
        return self.monomial(k, 0)

    def check_k(self, k: int):
        if self.singularity == A_EVEN:
            if not (1 <= k <= 2 * self.n + 1 and k % 2 == 1):
                raise ValueError(f"k must be odd in [1, {2 * self.n + 1}], got {k}")
        else:
            if not 0 <= k <= self.n:
                raise ValueError(f"k must be in [0, {self.n}], got {k}")

    def legal_k(self):
        if self.singularity == A_EVEN:
            return list(range(1, 2 * self.n + 2, 2))
        return list(range(self.n + 1))

    def involution(self, vec):
        """The cover involution on R~: t -> -t, resp. branch swap."""
        out = {}
        for i, v in vec.items():
            if self.singularity == A_EVEN:
                out[i] = -v if i % 2 == 1 else v
            else:
                out[i ^ 1] = v
        return out


def build_ring(singularity: str, n: int, N: int | None = None) -> TruncatedRing:
    if N is None:
        N = 2 * (2 * n + 2)
    return TruncatedRing(singularity, n, N)


# ---------------------------------------------------------------------------
# Invariants.


@dataclass(frozen=True)
class LocalModuleInvariants:
    ell: int
    a_values: tuple[int, ...]
    b: int
    delta: int
    tor_total: int


def _pair(vec_a, vec_b, dim):
    out = {k: v for k, v in vec_a.items()}
    for k, v in vec_b.items():
        out[k + dim] = v
    return out


def _split(vec, dim):
    a = {k: v for k, v in vec.items() if k < dim}
    b = {k - dim: v for k, v in vec.items() if k >= dim}
    return a, b


def _invariants_once(ring: TruncatedRing, k: int) -> LocalModuleInvariants:
    r_basis = ring.r_basis()
    g2 = ring.module_generator(k)

    span_r = Echelon()
    for v in r_basis:
        span_r.insert(v)
    delta = ring.dim - span_r.dim

    m_basis = list(r_basis) + [ring.mul(g2, v) for v in r_basis]
    span_m = Echelon()
    for v in m_basis:
        span_m.insert(v)
    ell = span_m.dim - span_r.dim

    # Conductor per branch: the largest c with t^j in M for all j >= c.
    a_values = []
    for branch in range(ring.branches):
        c = ring.N
        for j in range(ring.N - 1, -1, -1):
            if span_m.contains(ring.monomial(j, branch)):
                c = j
            else:
                break
        a_values.append(c)

    # Torsion of M (x)_R R~ presented as R~^2 / W with generators (1, g2):
    # W is the R~-span of the syzygies of (1, g2) over R.
    dim = ring.dim
    columns = r_basis + [ring.mul(g2, v) for v in r_basis]
    syz_combos = _nullspace(columns)
    nr = len(r_basis)
    syz_pairs = []
    for combo in syz_combos:
        f, g = {}, {}
        for idx, coef in combo.items():
            base = r_basis[idx % nr]
            target = f if idx < nr else g
            for kk, vv in base.items():
                nv = target.get(kk, 0) + coef * vv
                if nv:
                    target[kk] = nv
                else:
                    target.pop(kk, None)
        syz_pairs.append((f, g))

    span_w = Echelon()
    for f, g in syz_pairs:
        for e in range(ring.N):
            for branch in range(ring.branches):
                u = ring.monomial(e, branch)
                vec = _pair(ring.mul(f, u), ring.mul(g, u), dim)
                if vec:
                    span_w.insert(vec)
    dim_w = span_w.dim

    # Kernel of the multiplication map on R~^2: (a, b) with a = -g2*b.
    span_kw = span_w.copy()
    reps = []
    for e in range(ring.N):
        for branch in range(ring.branches):
            b_part = ring.monomial(e, branch)
            a_part = {kk: -vv for kk, vv in ring.mul(g2, b_part).items()}
            vec = _pair(a_part, b_part, dim)
            if span_kw.insert(vec):
                reps.append(vec)
    tor_total = span_kw.dim - dim_w

    # Eigenspace split of the involution on the torsion quotient.
    def sigma_pair(vec):
        a, bb = _split(vec, dim)
        sa = ring.involution(a)
        sb = ring.involution(bb)
        if ring.singularity == A_EVEN:
            new_a = sa
        else:
            tk_diag = {2 * k: ONE, 2 * k + 1: ONE} if k < ring.N else {}
            shift = ring.mul(tk_diag, sb)
            new_a = dict(sa)
            for kk, vv in shift.items():
                nv = new_a.get(kk, 0) + vv
                if nv:
                    new_a[kk] = nv
                else:
                    new_a.pop(kk, None)
        new_b = {kk: -vv for kk, vv in sb.items()}
        return _pair(new_a, new_b, dim)

    minus_span = span_w.copy()
    plus_span = span_w.copy()
    b_minus = 0
    b_plus = 0
    for v in reps:
        sv = sigma_pair(v)
        diff = dict(sv)
        _sub_scaled(diff, v, ONE)  # sigma(v) - v: nonzero mod W on the -1 part
        if minus_span.insert(diff):
            b_minus += 1
        tot = dict(sv)
        _sub_scaled(tot, v, -ONE)  # sigma(v) + v: nonzero mod W on the +1 part
        if plus_span.insert(tot):
            b_plus += 1
    assert b_minus + b_plus == tor_total, "eigenspace split must exhaust the torsion"

    # Re-verify the explicit anti-invariant torsion basis {s_i}.
    s_span = span_w.copy()
    s_count = 0
    if ring.singularity == A_EVEN:
        exps = [k + 2 * i for i in range((2 * ring.n + 1 - k) // 2)]
        s_vectors = [
            _pair({e: -ONE}, {e - k: ONE}, dim) for e in exps
        ]
    else:
        s_vectors = [
            _pair(
                {2 * i: -ONE},
                {2 * (i - k): ONE, 2 * (i - k) + 1: ONE},
                dim,
            )
            for i in range(k, ring.n)
        ]
    for sv in s_vectors:
        if s_span.insert(sv):
            s_count += 1
    assert s_count == len(s_vectors), "claimed torsion elements must be independent"
    assert s_count == b_minus, "anti-invariant torsion must match the explicit basis"

    return LocalModuleInvariants(
        ell=ell,
        a_values=tuple(a_values),
        b=b_minus,
        delta=delta,
        tor_total=tor_total,
    )


def invariants(ring: TruncatedRing, k: int) -> LocalModuleInvariants:
    """Module invariants at truncation N, re-verified at N+4."""
    first = _invariants_once(ring, k)
    bigger = TruncatedRing(ring.singularity, ring.n, ring.N + 4)
    second = _invariants_once(bigger, k)
    if first != second:
        raise TruncationError(
            f"invariants unstable between N={ring.N} and N={ring.N + 4}: "
            f"{first} vs {second}"
        )
    return first


def closed_form(singularity: str, n: int, k: int) -> LocalModuleInvariants:
    """The classification's closed-form invariants."""
    if singularity == A_EVEN:
        ell = (2 * n + 1 - k) // 2
        return LocalModuleInvariants(ell, (2 * n - 2 * ell,), ell, n, 2 * ell)
    ell = n - k
    return LocalModuleInvariants(ell, (n - ell, n - ell), ell, n, 2 * ell)


@dataclass(frozen=True)
class ClassificationReport:
    singularity: str
    n_max: int
    rows: tuple  # (n, k, computed, expected)
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_classification(singularity: str, n_max: int, N: int | None = None) -> ClassificationReport:
    """Sweep all modules up to n_max and compare against the closed forms."""
    rows = []
    failures = []
    for n in range(1, n_max + 1):
        ring = build_ring(singularity, n, N)
        for k in ring.legal_k():
            computed = invariants(ring, k)
            expected = closed_form(singularity, n, k)
            rows.append((n, k, computed, expected))
            if computed != expected:
                failures.append((n, k, computed, expected))
    return ClassificationReport(singularity, n_max, tuple(rows), tuple(failures))
