"""s-decompositions, perfection and Fontaine-Mazur L-invariants.

For a marked index s with t = t_F(s) we work in the subquotient
Q = F_t / F_{s-1}, written in the basis eps_1..eps_r (r = t - s + 1) given by
the images of the adapted generators g_s..g_t.  A decomposition is
Q = <e_s> + L + <e_t> with e_s = eps_1 in every component.

The defining conditions are linear once the eigenvalue alpha_t is fixed, so
every solution set is an affine family.  We keep finitely many
representatives of each family: the particular solution, its shifts by each
homogeneous direction, and solutions of the extra linear constraints that
perfection forces on the Fil lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import linalg as la
from .errors import NotMarked, NotStronglyMarked
from .phin_module import FilteredPhiNModule, quotient, sub
from .refinement import (
    Refinement,
    dual_refinement,
    marked_indices,
)


@dataclass(frozen=True)
class SDecomposition:
    s: int
    t: int
    ambient: FilteredPhiNModule  # F_t / F_{s-1}
    e_s: tuple  # per component
    e_t: tuple  # per component
    L_block: tuple  # per component list of basis vectors
    k_s: tuple  # per tau
    k_t: tuple  # per tau


@dataclass(frozen=True)
class PerfectWitness:
    k_s_prime: tuple
    k_t_prime: tuple
    L: tuple


def subquotient(R: Refinement, s: int, t: int) -> FilteredPhiNModule:
    """F_t / F_{s-1} in the basis of images of g_s..g_t."""
    D, f = R.module, R.f
    S = sub(D, [list(R.generators[c][:t]) for c in range(f)], checked=False)
    lower = [la.unit_vector(t, k) for k in range(s - 1)]
    upper = [la.unit_vector(t, k) for k in range(s - 1, t)]
    return quotient(S, [lower] * f, [upper] * f, checked=False)


def _cyclic_prefix(Q: FilteredPhiNModule, c: int) -> tuple:
    """phi[c] phi[c+1] ... phi[f-1], which carries component 0 to component c."""
    out = la.identity(Q.n)
    if c == 0:
        return out
    for k in range(c, Q.ctx.f):
        out = la.matmul(out, Q.phi[k])
    return out


def _affine_representatives(particular, directions) -> list:
    if particular is None:
        return []
    reps = [particular]
    for d in directions:
        reps.append(la.vadd(particular, d))
    if len(directions) > 1:
        total = particular
        for d in directions:
            total = la.vadd(total, d)
        reps.append(total)
    return reps


def _dedupe(vectors) -> list:
    seen, out = set(), []
    for v in vectors:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _solve_top(Q: FilteredPhiNModule, alpha_t) -> tuple:
    """Affine family of x with phi^f x = alpha_t x and N x = eps_1 (component 0)."""
    r = Q.n
    a = Q.phi_f(0)
    rows = list(la.matsub(a, la.scale(alpha_t, la.identity(r)))) + list(Q.N[0])
    rhs = [0] * r + list(la.unit_vector(r, 0))
    return la.solve(rows, rhs, r)


def _solve_middle(Q: FilteredPhiNModule, alpha_s) -> tuple:
    """Affine family of functionals h on W = <eps_2..eps_{r-1}> whose graph
    {w + h(w) eps_1} is phi^f- and N-stable on component 0."""
    r = Q.n
    m = r - 2
    a = Q.phi_f(0)
    nmat = Q.N[0]
    W = range(1, r - 1)
    rows, rhs = [], []
    # h (A_W - alpha_s) = A_{1W}  and  h N_W = N_{1W}, read column by column
    for col in W:
        rows.append(tuple(a[k][col] - (alpha_s if k == col else 0) for k in W))
        rhs.append(a[0][col])
        rows.append(tuple(nmat[k][col] for k in W))
        rhs.append(nmat[0][col])
    return la.solve(rows, rhs, m), rows, rhs


def _middle_basis(h, r: int) -> list:
    return [
        tuple(h[k - 1] if i == 0 else (1 if i == k else 0) for i in range(r)) for k in range(1, r - 1)
    ]


def find_s_decompositions(D: FilteredPhiNModule, R: Refinement, s: int) -> list[SDecomposition]:
    marks = marked_indices(R)
    if s not in marks.t:
        raise NotMarked(f"index {s} is not marked for this refinement")
    t = marks.t[s]
    data = R.data
    alpha_s, alpha_t = data.alphas[s - 1], data.alphas[t - 1]
    Q = subquotient(R, s, t)
    r, f = Q.n, Q.ctx.f
    k_s = data.weights[s - 1]
    k_t = data.weights[t - 1]
    eps1 = la.unit_vector(r, 0)
    prefix = [_cyclic_prefix(Q, c) for c in range(f)]

    x0, x_dirs = _solve_top(Q, alpha_t)
    if x0 is None:
        return []
    # N_c P_c x does not depend on the homogeneous part, so the scale is fixed.
    scales = []
    for c in range(f):
        image = la.matvec(Q.N[c], la.matvec(prefix[c], x0))
        scales.append(1 / la.coordinates([eps1], image)[0])

    xs = _affine_representatives(x0, x_dirs)
    xs += _constrained_top(Q, x0, x_dirs, prefix, scales, k_s, k_t)
    xs = _dedupe(xs)

    if r >= 3:
        (h0, h_dirs), rows, rhs = _solve_middle(Q, alpha_s)
        if h0 is None:
            return []
        generic_hs = _affine_representatives(h0, h_dirs)

    out = []
    for x in xs:
        e_t = tuple(la.vscale(scales[c], la.matvec(prefix[c], x)) for c in range(f))
        if r >= 3:
            hs = generic_hs + _constrained_middle(Q, rows, rhs, prefix, scales, x, e_t, k_s, k_t)
            hs = _dedupe(hs)
        else:
            hs = [()]
        for h in hs:
            L0 = _middle_basis(h, r) if r >= 3 else []
            L_block = tuple(tuple(la.matvec(prefix[c], v) for v in L0) for c in range(f))
            out.append(SDecomposition(s, t, Q, (eps1,) * f, e_t, L_block, k_s, k_t))
    return out


def _constrained_top(Q, x0, x_dirs, prefix, scales, k_s, k_t) -> list:
    """Members of the x-family for which, for some choice of levels
    k_s < k'_tau <= k_t, each Fil^{k'_tau} contains e_t + a_tau e_s."""
    if not x_dirs:
        return []
    r, deg = Q.n, Q.ctx.degree
    d = len(x_dirs)
    eps1 = la.unit_vector(r, 0)
    nvars = d + deg  # u_1..u_d, then a_tau
    blocks = []
    for tau in range(deg):
        c = Q.component_of(tau)
        base = la.vscale(scales[c], la.matvec(prefix[c], x0))
        dir_images = [la.vscale(scales[c], la.matvec(prefix[c], y)) for y in x_dirs]
        options = []
        for level in range(k_s[tau] + 1, k_t[tau] + 1):
            rows, rhs = [], []
            for row in la.annihilator(Q.fil(tau, level), r):
                coeffs = [la.dot(row, y) for y in dir_images] + [0] * deg
                coeffs[d + tau] = la.dot(row, eps1)
                rows.append(tuple(coeffs))
                rhs.append(-la.dot(row, base))
            options.append((rows, rhs))
        if not options:
            return []
        blocks.append(options)
    out = []
    for choice in product(*blocks):
        rows = [row for rs, _ in choice for row in rs]
        rhs = [b for _, bs in choice for b in bs]
        sol, kernel = la.solve(rows, rhs, nvars) if rows else (tuple([0] * nvars), [])
        if sol is None:
            continue
        for u in _affine_representatives(sol, kernel):
            x = x0
            for coeff, y in zip(u[:d], x_dirs):
                x = la.vadd(x, la.vscale(coeff, y))
            out.append(x)
    return out


def _constrained_middle(Q, rows, rhs, prefix, scales, x, e_t, k_s, k_t) -> list:
    """Members of the h-family compatible with the Fil line that the pair
    <e_s, e_t> carries: Fil^{k_t+1} lies in L, and Fil^{k'_t} projects into
    the line through e_t + L_tau e_s modulo L."""
    r, m, f = Q.n, Q.n - 2, Q.ctx.f
    pair = [[la.unit_vector(r, 0), e_t[c]] for c in range(f)]
    M = sub(Q, pair, checked=False)
    rows, rhs = list(rows), list(rhs)
    for tau in range(Q.ctx.degree):
        c = Q.component_of(tau)
        back = la.inverse(prefix[c])
        for v in Q.fil(tau, k_t[tau] + 1):
            u = la.matvec(back, v)
            rows.append(tuple([0] * m))
            rhs.append(u[r - 1])
            rows.append(tuple(u[1 : r - 1]))
            rhs.append(u[0])
        steps = M.canonical_filtration(tau)
        if len(steps) != 2 or steps[0][0] != k_s[tau]:
            return []
        level, line = steps[1]
        ratio = _line_ratio(line)
        if ratio is None:
            return []
        # in prefix coordinates e_s = eps_1 / rho and e_t = scale * x
        rho = la.matvec(prefix[c], la.unit_vector(r, 0))[0]
        z1 = scales[c] * x[0] + ratio / rho
        zr = scales[c] * x[r - 1]
        zw = [scales[c] * x[k] for k in range(1, r - 1)]
        for v in Q.fil(tau, level):
            u = la.matvec(back, v)
            # det [[u_1 - h.u_W, u_r], [z_1 - h.z_W, z_r]] = 0
            coeffs = tuple(-u[k] * zr + u[r - 1] * zw[k - 1] for k in range(1, r - 1))
            rows.append(coeffs)
            rhs.append(-(u[0] * zr - u[r - 1] * z1))
    sol, kernel = la.solve(rows, rhs, m)
    return _affine_representatives(sol, kernel)


# --- perfection ----------------------------------------------------------------


def _line_ratio(basis) -> Fraction | None:
    """For a line spanned by a e_s + b e_t with b != 0, the ratio a / b."""
    if len(basis) != 1:
        return None
    a, b = basis[0]
    if b == 0:
        return None
    return a / b


def is_perfect(dec: SDecomposition) -> PerfectWitness | None:
    Q = dec.ambient
    f = Q.ctx.f
    pair = [[dec.e_s[c], dec.e_t[c]] for c in range(f)]
    M = sub(Q, pair, checked=False)
    QL = quotient(Q, [list(dec.L_block[c]) for c in range(f)], pair, checked=False)
    ks_p, kt_p, Ls = [], [], []
    for tau in range(Q.ctx.degree):
        ks, kt = dec.k_s[tau], dec.k_t[tau]
        if ks >= kt:
            return None
        m_steps = M.canonical_filtration(tau)
        q_steps = QL.canonical_filtration(tau)
        if len(m_steps) != 2 or len(q_steps) != 2:
            return None
        (m_lo, m_full), (m_hi, m_line) = m_steps
        (q_lo, q_full), (q_hi, q_line) = q_steps
        if m_lo != ks or q_hi != kt or len(m_full) != 2 or len(q_full) != 2:
            return None
        if not (ks <= q_lo < m_hi <= kt):
            return None
        L_sub, L_quo = _line_ratio(m_line), _line_ratio(q_line)
        if L_sub is None or L_sub != L_quo:
            return None
        ks_p.append(q_lo)
        kt_p.append(m_hi)
        Ls.append(L_sub)
    return PerfectWitness(tuple(ks_p), tuple(kt_p), tuple(Ls))


def perfect_decompositions(D, R, s) -> list[tuple[SDecomposition, PerfectWitness]]:
    out = []
    for dec in find_s_decompositions(D, R, s):
        w = is_perfect(dec)
        if w is not None:
            out.append((dec, w))
    return out


def is_strongly_marked(D: FilteredPhiNModule, R: Refinement, s: int) -> bool:
    if s not in marked_indices(R).t:
        return False
    return bool(perfect_decompositions(D, R, s))


def l_invariant(D: FilteredPhiNModule, R: Refinement, s: int, t: int | None = None) -> tuple:
    marks = marked_indices(R)
    if s not in marks.t or (t is not None and marks.t[s] != t):
        raise NotMarked(f"({s}, {t}) is not a marked pair")
    found = perfect_decompositions(D, R, s)
    if not found:
        raise NotStronglyMarked(f"no perfect {s}-decomposition exists")
    return found[0][1].L


@dataclass
class WellDefinedReport:
    s: int
    t: int
    decompositions: int
    perfect: int
    values: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return len(set(self.values)) <= 1

    @property
    def value(self):
        return self.values[0] if self.values else None


def check_well_defined(D: FilteredPhiNModule, R: Refinement, s: int, t: int | None = None) -> WellDefinedReport:
    marks = marked_indices(R)
    if s not in marks.t:
        raise NotStronglyMarked(f"index {s} is not marked")
    decs = find_s_decompositions(D, R, s)
    values = [w.L for w in (is_perfect(d) for d in decs) if w is not None]
    if not values:
        raise NotStronglyMarked(f"no perfect {s}-decomposition exists")
    return WellDefinedReport(s, marks.t[s], len(decs), len(values), values)


@dataclass(frozen=True)
class DualityReport:
    s: int
    t: int
    dual_s: int
    dual_t: int | None
    marked_in_dual: bool
    strongly_marked: bool
    strongly_marked_in_dual: bool

    @property
    def holds(self) -> bool:
        return (
            self.marked_in_dual
            and self.dual_t == self.dual_s + (self.t - self.s)
            and self.strongly_marked == self.strongly_marked_in_dual
        )


def duality_transport(D: FilteredPhiNModule, R: Refinement, s: int) -> DualityReport:
    marks = marked_indices(R)
    if s not in marks.t:
        raise NotMarked(f"index {s} is not marked")
    t = marks.t[s]
    n = R.n
    Rd = dual_refinement(R)
    Dd = Rd.module
    ds = n + 1 - t
    dmarks = marked_indices(Rd)
    return DualityReport(
        s=s,
        t=t,
        dual_s=ds,
        dual_t=dmarks.t.get(ds),
        marked_in_dual=ds in dmarks.t,
        strongly_marked=is_strongly_marked(D, R, s),
        strongly_marked_in_dual=is_strongly_marked(Dd, Rd, ds),
    )
