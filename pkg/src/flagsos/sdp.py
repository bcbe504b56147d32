"""Block SDP assembly, a dense interior-point solver, and exact rounding.

The solver handles linear matrix inequalities

    minimize  c^T z   subject to   X(z) := sum_j z_j F_j - F0  >= 0,

with X block-diagonal, by feasible-start path following: exact Newton
centering of the log-det barrier along a geometrically decreasing central
path, with the dual read off as the barrier multiplier.  All shipped
instances are tiny, so the implementation favors robustness and determinism
over scale.  Exactness lives entirely in the rounding stage: floats never
touch a certificate that has not been re-validated in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import ratlinalg as rl
from .errors import BudgetError, FlagSosError, InfeasibleError, RoundingError
from .flagcalc import PairDensityTable, pair_density_table
from .graphs import Graph, IntersectionType, a_free_masks, enumerate_A_free, enumerate_flags
from .poly import MPoly
from .symrep import YMatrix, irrep_dimension

PSD_DIM_BUDGET = 50
CONSTRAINT_BUDGET = 200

Blocks = list[np.ndarray]


# --- exact PSD checks ---------------------------------------------------------


def check_psd_rational(m: list[list[Fraction]]) -> bool:
    """Exact PSD decision for a rational symmetric matrix (pivoted LDL^T)."""
    ok, _ = rl.ldlt_psd(m)
    return ok


def psd_rank(m: list[list[Fraction]]) -> int:
    ok, rnk = rl.ldlt_psd(m)
    if not ok:
        raise FlagSosError("matrix is not PSD")
    return rnk


# --- the LMI interior-point solver ---------------------------------------------


@dataclass
class LmiProblem:
    c: np.ndarray           # objective over z
    F0: Blocks
    Fs: list[Blocks]        # one block list per variable
    names: list[str] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return len(self.Fs)

    @property
    def block_sizes(self) -> list[int]:
        return [b.shape[0] for b in self.F0]


@dataclass
class LmiSolution:
    status: str
    z: np.ndarray
    X: Blocks
    Y: Blocks
    gap: float
    iterations: int
    pobj: float
    dobj: float


def _bdot(a: Blocks, b: Blocks) -> float:
    return float(sum(np.tensordot(x, y) for x, y in zip(a, b)))


def _bcombine(Fs: list[Blocks], dz: np.ndarray, minus: Blocks | None = None) -> Blocks:
    sizes = [b.shape for b in (minus if minus is not None else Fs[0])]
    out = [np.zeros(s) for s in sizes]
    for j, Fj in enumerate(Fs):
        if dz[j]:
            for k in range(len(out)):
                out[k] += dz[j] * Fj[k]
    if minus is not None:
        for k in range(len(out)):
            out[k] -= minus[k]
    return out


def _blocks_at(prob: LmiProblem, z: np.ndarray) -> Blocks:
    X = _bcombine(prob.Fs, z, minus=prob.F0)
    return [0.5 * (x + x.T) for x in X]


def _min_eig(X: Blocks) -> float:
    return min(float(np.linalg.eigvalsh(x).min()) for x in X)


def solve_lmi(
    prob: LmiProblem,
    z_start: np.ndarray,
    tol: float = 1e-10,
    max_iters: int = 1500,
    box: float = 1e6,
) -> LmiSolution:
    """Feasible-start path-following interior-point method on the LMI form.

    Newton-centers the log-det barrier along a geometrically decreasing
    central path; the dual iterate is the exact barrier multiplier
    Y = mu X^{-1}, so the reported duality gap at the final center is
    mu * (total block dimension).  Variables are boxed at +-box so the
    analytic center exists even when a variable binds no constraint.
    Deterministic for fixed parameters.
    """
    base_dim = sum(prob.block_sizes)
    if base_dim > PSD_DIM_BUDGET:
        raise BudgetError(f"total PSD dimension {base_dim} exceeds budget {PSD_DIM_BUDGET}")
    nv = prob.nvars

    # augment with the variable box: blocks (box - z_j) and (box + z_j)
    box = max(box, 100.0 * (1.0 + float(np.abs(np.asarray(z_start)).max() if nv else 0.0)))
    F0 = list(prob.F0) + [np.array([[-box]]) for _ in range(2 * nv)]
    Fs = []
    for j in range(nv):
        blocks = list(prob.Fs[j])
        for jj in range(nv):
            blocks.append(np.array([[-1.0 if jj == j else 0.0]]))
            blocks.append(np.array([[1.0 if jj == j else 0.0]]))
        Fs.append(blocks)
    prob = LmiProblem(c=prob.c, F0=F0, Fs=Fs, names=prob.names)
    sizes = prob.block_sizes
    total_dim = sum(sizes)

    z = np.array(z_start, dtype=float)
    X = _blocks_at(prob, z)
    if _min_eig(X) <= 0:
        raise FlagSosError("interior-point start is not strictly feasible")

    cnorm = float(np.abs(prob.c).max()) or 1.0
    mu = max(1.0, cnorm)
    mu_final = tol / max(total_dim, 1)
    iterations = 0
    status = "optimal"

    def inverses(Xb: Blocks) -> Blocks:
        out = []
        for x in Xb:
            w, u = np.linalg.eigh(x)
            w = np.clip(w, 1e-280, None)
            out.append((u / w) @ u.T)
        return out

    while True:
        # Newton centering for the current mu
        for _ in range(60):
            iterations += 1
            if iterations > max_iters:
                status = "max_iterations"
                break
            Xinv = inverses(X)
            g = np.array(
                [prob.c[j] / mu - _bdot([Xinv[k] for k in range(len(sizes))], prob.Fs[j]) for j in range(nv)]
            )
            H = np.empty((nv, nv))
            XiF = [[Xinv[k] @ prob.Fs[j][k] for k in range(len(sizes))] for j in range(nv)]
            for i in range(nv):
                for j in range(i, nv):
                    H[i, j] = H[j, i] = sum(
                        float(np.tensordot(XiF[i][k], XiF[j][k].T)) for k in range(len(sizes))
                    )
            try:
                dz = -np.linalg.solve(H + 1e-14 * np.eye(nv), g)
            except np.linalg.LinAlgError:
                dz = -np.linalg.lstsq(H, g, rcond=None)[0]
            decrement = float(-g @ dz)
            if not np.isfinite(decrement) or decrement < 0:
                dz = -g
                decrement = float(g @ g)
            # backtracking line search on the barrier merit
            step = 1.0
            base = float(prob.c @ z) / mu - sum(
                float(np.linalg.slogdet(x)[1]) for x in X
            )
            accepted = False
            for _ in range(60):
                z_new = z + step * dz
                X_new = _blocks_at(prob, z_new)
                if _min_eig(X_new) > 0:
                    val = float(prob.c @ z_new) / mu - sum(
                        float(np.linalg.slogdet(x)[1]) for x in X_new
                    )
                    if val <= base - 0.25 * step * decrement + 1e-12 * abs(base):
                        accepted = True
                        break
                step *= 0.5
            if not accepted:
                break
            z, X = z_new, X_new
            if decrement * min(step, 1.0) < 1e-13 or decrement < 1e-10:
                break
        if status == "max_iterations" or mu <= mu_final:
            break
        mu = max(mu * 0.2, mu_final * 0.999)

    if status == "optimal" and nv and float(np.abs(z).max()) > 0.9 * box:
        status = "near_box_bound"  # objective likely unbounded over the LMI
    Xinv = inverses(X)
    Y = [mu * xi for xi in Xinv]
    gap = _bdot(X, Y)
    pobj = float(prob.c @ z)
    # the centered barrier multiplier certifies the optimum within the gap,
    # so this is the honest dual value at the final center
    return LmiSolution(
        status=status,
        z=z,
        X=X,
        Y=Y,
        gap=gap,
        iterations=iterations,
        pobj=pobj,
        dobj=pobj - gap,
    )


# --- symmetric matrix variable helpers ------------------------------------------


def _vech_indices(k: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(k) for b in range(a, k)]


def _sym_basis(k: int, a: int, b: int) -> np.ndarray:
    m = np.zeros((k, k))
    m[a, b] = m[b, a] = 1.0
    return m


def _matrix_from_vech(k: int, vals) -> list[list[Fraction]]:
    out = [[Fraction(0)] * k for _ in range(k)]
    for (a, b), v in zip(_vech_indices(k), vals):
        out[a][b] = out[b][a] = Fraction(v)
    return out


# --- the flag SDP ---------------------------------------------------------------


@dataclass(frozen=True)
class FlagSdpInstance:
    """min alpha s.t. d(1_H) + <Q, C_H> <= alpha per host, Q >= 0."""

    table: PairDensityTable
    host_densities: tuple[Fraction, ...]
    forbidden: Graph
    type_: IntersectionType
    flag_size: int
    host_size: int

    @property
    def flag_count(self) -> int:
        return len(self.table.flags)

    @property
    def host_count(self) -> int:
        return len(self.table.hosts)

    def to_json(self) -> dict:
        return {
            "kind": "flag-sdp",
            "table": self.table.to_json(),
            "host_densities": [str(x) for x in self.host_densities],
            "forbidden": self.forbidden.to_json(),
            "type": self.type_.to_json(),
            "flag_size": self.flag_size,
            "host_size": self.host_size,
        }

    @staticmethod
    def from_json(obj) -> "FlagSdpInstance":
        return FlagSdpInstance(
            PairDensityTable.from_json(obj["table"]),
            tuple(Fraction(x) for x in obj["host_densities"]),
            Graph.from_json(obj["forbidden"]),
            IntersectionType.from_json(obj["type"]),
            int(obj["flag_size"]),
            int(obj["host_size"]),
        )


def assemble_flag_sdp(t: IntersectionType, f: int, m: int, a: Graph) -> FlagSdpInstance:
    """Enumerate hosts and flags, build the exact pair-density table, and wrap
    them as the standard flag SDP instance."""
    if m < 2 * f - t.size:
        raise FlagSosError(f"need m >= 2f - t = {2 * f - t.size}, got m={m}")
    hosts = enumerate_A_free(m, a)
    flags = enumerate_flags(t, f, a)
    table = pair_density_table(flags, hosts)
    dens = tuple(Fraction(h.edge_count, comb(m, 2)) for h in hosts)
    return FlagSdpInstance(table, dens, a, t, f, m)


def flag_objectives(inst: FlagSdpInstance, q: list[list[Fraction]]) -> list[Fraction]:
    """Exact a_H = <Q, C_H> per host for a rational Q."""
    k = inst.flag_count
    out = []
    for hk in range(inst.host_count):
        total = Fraction(0)
        for a in range(k):
            for b in range(k):
                total += q[a][b] * inst.table.value(a, b, hk)
        out.append(total)
    return out


def exact_flag_bound(inst: FlagSdpInstance, q: list[list[Fraction]]) -> Fraction:
    """alpha = max_H (d(1_H) + <Q, C_H>), exact."""
    return max(d + a for d, a in zip(inst.host_densities, flag_objectives(inst, q)))


def _flag_lmi(inst: FlagSdpInstance) -> LmiProblem:
    k = inst.flag_count
    vech = _vech_indices(k)
    nv = 1 + len(vech)  # alpha then Q entries
    hosts = inst.host_count
    sizes = [k] + [1] * hosts
    F0 = [np.zeros((k, k))] + [np.array([[float(d)]]) for d in inst.host_densities]
    Fs = []
    c = np.zeros(nv)
    c[0] = 1.0
    # alpha
    Fa = [np.zeros((k, k))] + [np.array([[1.0]]) for _ in range(hosts)]
    Fs.append(Fa)
    for a, b in vech:
        blocks = [_sym_basis(k, a, b)]
        for hk in range(hosts):
            coeff = inst.table.value(a, b, hk) * (1 if a == b else 2)
            blocks.append(np.array([[-float(coeff)]]))
        Fs.append(blocks)
    return LmiProblem(c=c, F0=F0, Fs=Fs, names=["alpha"] + [f"q{a}{b}" for a, b in vech])


@dataclass
class SdpSolution:
    """Numeric solver output: objective, PSD blocks, and convergence data."""

    objective: float
    blocks: dict[str, np.ndarray]
    gap: float
    iterations: int
    status: str
    extra: dict = field(default_factory=dict)


def solve_sdp(instance, tol: float = 1e-10, max_iters: int = 1500) -> SdpSolution:
    """Solve a flag or GP instance numerically (interior point)."""
    if isinstance(instance, FlagSdpInstance):
        if instance.host_count > CONSTRAINT_BUDGET:
            raise BudgetError("too many host constraints")
        prob = _flag_lmi(instance)
        k = instance.flag_count
        z0 = np.zeros(prob.nvars)
        for idx, (a, b) in enumerate(_vech_indices(k), start=1):
            if a == b:
                z0[idx] = 1.0
        z0[0] = 2.0 + float(max(instance.host_densities)) + k  # strict host slack
        sol = solve_lmi(prob, z0, tol=tol, max_iters=max_iters)
        if sol.status != "optimal":
            raise FlagSosError(f"solver did not converge: {sol.status} (gap {sol.gap:.2e})")
        k = instance.flag_count
        q = np.zeros((k, k))
        for (a, b), v in zip(_vech_indices(k), sol.z[1:]):
            q[a, b] = q[b, a] = v
        return SdpSolution(
            objective=float(sol.z[0]),
            blocks={"Q": q},
            gap=sol.gap,
            iterations=sol.iterations,
            status=sol.status,
        )
    if isinstance(instance, GpSdpInstance):
        return solve_gp(instance, tol=tol, max_iters=max_iters)
    raise FlagSosError(f"unknown instance type {type(instance)!r}")


# --- the restricted GP block SDP --------------------------------------------------


@dataclass(frozen=True)
class GpSdpInstance:
    """Find Q_lam >= 0 with target == sum_lam n_lam <Q_lam, Y_lam> (mod the ideal).

    Equality is imposed exactly: either as evaluations on every A-free
    characteristic vector (n <= 6) or as coefficient-level identity (n = 7).
    The Y matrices are over unnormalized basis polynomials, so the unknown
    blocks absorb the basis norms; PSD-ness is unaffected.
    """

    target: MPoly
    n: int
    partitions: tuple[tuple[int, ...], ...]
    y_matrices: dict
    forbidden: Graph
    mode: str  # "evaluations" or "coefficients"
    minimize_bound: bool = False  # solve for alpha with target alpha*1 - target

    def n_lambda(self, lam) -> int:
        return irrep_dimension(lam)

    def to_json(self) -> dict:
        return {
            "kind": "gp-sdp",
            "target": self.target.to_json(),
            "n": self.n,
            "partitions": [list(lam) for lam in self.partitions],
            "y_matrices": {",".join(map(str, lam)): ym.to_json() for lam, ym in self.y_matrices.items()},
            "forbidden": self.forbidden.to_json(),
            "mode": self.mode,
            "minimize_bound": self.minimize_bound,
        }

    @staticmethod
    def from_json(obj) -> "GpSdpInstance":
        parts = tuple(tuple(lam) for lam in obj["partitions"])
        ys = {
            tuple(int(x) for x in key.split(",")): YMatrix.from_json(val)
            for key, val in obj["y_matrices"].items()
        }
        return GpSdpInstance(
            MPoly.from_json(obj["target"]),
            int(obj["n"]),
            parts,
            ys,
            Graph.from_json(obj["forbidden"]),
            obj["mode"],
            bool(obj.get("minimize_bound", False)),
        )


def _random_invariance_probe(target: MPoly, n: int):
    import random

    from .poly import EdgePermAction

    rng = random.Random(20240)
    for _ in range(20):
        sigma = EdgePermAction(tuple(rng.sample(range(1, n + 1), n)))
        if target.act(sigma) != target:
            raise FlagSosError("GP target polynomial is not S_n-invariant")


def assemble_gp_sdp(
    target: MPoly,
    hook_t: int,
    basis,
    forbidden: Graph,
    mode: str | None = None,
    minimize_bound: bool = False,
    partitions: list | None = None,
) -> GpSdpInstance:
    """Build the restricted GP instance for the partitions lex >= the hook.

    An explicit partition list overrides the hook restriction (used to probe
    what a further-restricted block set can or cannot certify).
    """
    from .symrep import partitions_lex_geq, y_matrix

    n = target.n
    _random_invariance_probe(target, n)
    if partitions is not None:
        parts = [tuple(lam) for lam in partitions]
    else:
        parts = [lam for lam in partitions_lex_geq(n, hook_t)]
    ys = {}
    for lam in parts:
        if basis.blocks_for(lam):
            ys[lam] = y_matrix(basis, lam)
    missing = [lam for lam in parts if lam not in ys]
    for lam in missing:
        from .symrep import multiplicity

        if multiplicity(lam, n, basis.d) > 0:
            raise FlagSosError(f"basis is missing the nonempty partition block {lam}")
    parts = [lam for lam in parts if lam in ys]
    if mode is None:
        mode = "evaluations" if n <= 6 else "coefficients"
    if mode == "evaluations" and n > 6:
        raise BudgetError("evaluation mode needs n <= 6")
    return GpSdpInstance(target, n, tuple(parts), ys, forbidden, mode, minimize_bound)


def gp_linear_system(inst: GpSdpInstance):
    """The exact linear system A z = b, z = [alpha?] + vech entries of each block."""
    cols: list[tuple] = []
    if inst.minimize_bound:
        cols.append(("alpha",))
    for lam in inst.partitions:
        k = inst.y_matrices[lam].size
        for a, b in _vech_indices(k):
            cols.append((lam, a, b))

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def row_for(value_of_entry, target_value):
        row = []
        for col in cols:
            if col == ("alpha",):
                row.append(Fraction(-1))  # alpha moves to the left-hand side
                continue
            lam, a, b = col
            ym = inst.y_matrices[lam]
            mult = 1 if a == b else 2
            row.append(Fraction(inst.n_lambda(lam) * mult) * value_of_entry(lam, a, b))
        rows.append(row)
        rhs.append(target_value)

    if inst.mode == "evaluations":
        seen = set()
        for mask in a_free_masks(inst.n, inst.forbidden):
            key_vals = []
            for lam in inst.partitions:
                ym = inst.y_matrices[lam]
                for a, b in _vech_indices(ym.size):
                    key_vals.append(ym.entries[a][b].evaluate(mask))
            tval = inst.target.evaluate(mask)
            key = (tuple(key_vals), tval)
            if key in seen:
                continue
            seen.add(key)
            vals = dict()
            i = 0
            for lam in inst.partitions:
                ym = inst.y_matrices[lam]
                for a, b in _vech_indices(ym.size):
                    vals[(lam, a, b)] = key_vals[i]
                    i += 1
            row_for(lambda lam, a, b: vals[(lam, a, b)], -tval if inst.minimize_bound else tval)
    else:
        monos = set(inst.target.terms)
        for lam in inst.partitions:
            ym = inst.y_matrices[lam]
            for a, b in _vech_indices(ym.size):
                monos.update(ym.entries[a][b].terms)
        for mono in sorted(monos):
            tcoef = inst.target.terms.get(mono, Fraction(0))
            if inst.minimize_bound:
                # alpha contributes only to the constant monomial
                alpha_coef = Fraction(-1) if mono == 0 else Fraction(0)
                row = [alpha_coef]
            else:
                row = []
            for lam in inst.partitions:
                ym = inst.y_matrices[lam]
                for a, b in _vech_indices(ym.size):
                    mult = 1 if a == b else 2
                    row.append(
                        Fraction(inst.n_lambda(lam) * mult) * ym.entries[a][b].terms.get(mono, Fraction(0))
                    )
            rows.append(row)
            rhs.append(-tcoef if inst.minimize_bound else tcoef)
    return cols, rows, rhs


def _blocks_from_z(inst: GpSdpInstance, cols, z) -> dict:
    out = {}
    i = 1 if inst.minimize_bound else 0
    for lam in inst.partitions:
        k = inst.y_matrices[lam].size
        cnt = len(_vech_indices(k))
        out[lam] = _matrix_from_vech(k, z[i : i + cnt])
        i += cnt
    return out


@dataclass
class GpSolution:
    status: str
    blocks: dict
    bound: Fraction | None
    nullity: int
    objective: float
    gap: float
    iterations: int
    exact: bool


def solve_gp(inst: GpSdpInstance, tol: float = 1e-10, max_iters: int = 1500) -> SdpSolution:
    gp = solve_gp_exact(inst, tol=tol, max_iters=max_iters)
    blocks = {
        "Q_" + ",".join(map(str, lam)): np.array([[float(x) for x in row] for row in m])
        for lam, m in gp.blocks.items()
    }
    return SdpSolution(
        objective=gp.objective,
        blocks=blocks,
        gap=gp.gap,
        iterations=gp.iterations,
        status=gp.status,
        extra={"exact_blocks": gp.blocks, "bound": gp.bound, "nullity": gp.nullity, "exact": gp.exact},
    )


def solve_gp_exact(inst: GpSdpInstance, tol: float = 1e-10, max_iters: int = 1500) -> GpSolution:
    """Solve the GP instance with exact linear elimination plus (when the
    solution set has positive dimension) the interior-point solver on the
    reduced coordinates, followed by exact rational reconstruction."""
    cols, rows, rhs = gp_linear_system(inst)
    z0 = rl.solve(rows, rhs)
    if z0 is None:
        raise InfeasibleError("the GP linear system is inconsistent: no block values satisfy the identity")
    null = rl.nullspace(rows)
    nullity = len(null)

    if nullity == 0:
        blocks = _blocks_from_z(inst, cols, z0)
        feasible = all(check_psd_rational(m) for m in blocks.values())
        if not feasible:
            raise InfeasibleError("unique solution of the GP identity is not PSD")
        bound = z0[0] if inst.minimize_bound else None
        return GpSolution("optimal", blocks, bound, 0, float(bound) if bound is not None else 0.0, 0.0, 0, True)

    # reduced problem over w: z = z0 + N w
    nv = nullity
    sizes = []
    entry_maps = []  # per block: (k, list over vech of (affine const, coeffs))
    i = 1 if inst.minimize_bound else 0
    for lam in inst.partitions:
        k = inst.y_matrices[lam].size
        sizes.append(k)
        vech = _vech_indices(k)
        const = [float(z0[i + t]) for t in range(len(vech))]
        coefs = [[float(null[w][i + t]) for t in range(len(vech))] for w in range(nv)]
        entry_maps.append((k, vech, const, coefs))
        i += len(vech)

    # feasibility via max t with X - tI >= 0, t capped at 1 and |w| boxed;
    # blocks: each Q block, then the t-cap block, then 2*nv box blocks
    R = 1e4
    names = [f"w{j}" for j in range(nv)] + ["t"]
    F0 = []
    for (k, vech, const, coefs) in entry_maps:
        m = np.zeros((k, k))
        for (a, b), v in zip(vech, const):
            m[a, b] = m[b, a] = v
        F0.append(-m)
    F0.append(np.array([[-1.0]]))           # 1 - t >= 0
    for _ in range(nv):
        F0.append(np.array([[-R]]))         # R - w >= 0
        F0.append(np.array([[-R]]))         # R + w >= 0
    Fs = []
    for j in range(nv):
        blocks = []
        for bi, (k, vech, const, coefs) in enumerate(entry_maps):
            m = np.zeros((k, k))
            for (a, b), v in zip(vech, coefs[j]):
                m[a, b] = m[b, a] = v
            blocks.append(m)
        blocks.append(np.array([[0.0]]))
        for jj in range(nv):
            blocks.append(np.array([[-1.0 if jj == j else 0.0]]))
            blocks.append(np.array([[1.0 if jj == j else 0.0]]))
        Fs.append(blocks)
    tb = []
    for (k, vech, const, coefs) in entry_maps:
        tb.append(-np.eye(k))
    tb.append(np.array([[-1.0]]))
    for _ in range(nv):
        tb.append(np.array([[0.0]]))
        tb.append(np.array([[0.0]]))
    Fs.append(tb)

    c = np.zeros(nv + 1)
    c[-1] = -1.0  # maximize t
    prob = LmiProblem(c=c, F0=F0, Fs=Fs, names=names)
    # constructive strict start: w = 0, t well below the smallest eigenvalue
    const_eigs = [float(np.linalg.eigvalsh(-f).min()) for f in F0[: len(entry_maps)]]
    t0 = min(min(const_eigs), 0.0) - 1.0
    z_start = np.zeros(nv + 1)
    z_start[-1] = t0
    sol = solve_lmi(prob, z_start, tol=tol, max_iters=max_iters)
    tstar = float(sol.z[-1])
    w_feas = sol.z[:-1].copy()
    w_num = w_feas
    if tstar < 1e-9:
        # no interior: the PSD set may still touch the affine family at
        # isolated points, so try exact reconstruction before giving up
        for denom in (10**2, 10**4, 10**6, 10**9):
            w_rat = [Fraction(float(x)).limit_denominator(denom) for x in w_feas]
            z = [z0[i] + sum(w_rat[j] * null[j][i] for j in range(nv)) for i in range(len(z0))]
            cand = _blocks_from_z(inst, cols, z)
            if all(check_psd_rational(m) for m in cand.values()):
                bound = z[0] if inst.minimize_bound else None
                obj = float(bound) if bound is not None else 0.0
                return GpSolution("optimal", cand, bound, nullity, obj, sol.gap, sol.iterations, True)
        raise InfeasibleError(
            f"GP instance has no feasible point: max slack eigenvalue {tstar:.3e}"
        )

    if inst.minimize_bound:
        # phase 2: minimize alpha over the affine family, PSD blocks only,
        # starting from the strictly feasible phase-1 point
        alpha_col = 0
        prob2 = LmiProblem(
            c=np.array([float(null[j][alpha_col]) for j in range(nv)]),
            F0=[f.copy() for f in F0[: len(entry_maps)]],
            Fs=[[b.copy() for b in Fs[j][: len(entry_maps)]] for j in range(nv)],
            names=names[:-1],
        )
        sol2 = solve_lmi(prob2, w_feas, tol=tol, max_iters=max_iters)
        if sol2.status == "optimal":
            w_num = sol2.z
            sol = sol2

    # exact reconstruction: round w (backing toward the interior point when the
    # optimum sits on the PSD boundary), rebuild z, and re-check PSD exactly
    exact = False
    blocks_exact = None
    bound = None
    for mix in (0.0, 1e-9, 1e-6, 1e-3, 1e-1, 1.0):
        w_mixed = (1.0 - mix) * np.asarray(w_num) + mix * np.asarray(w_feas)
        for denom in (10**4, 10**6, 10**9, 10**12):
            w_rat = [Fraction(float(x)).limit_denominator(denom) for x in w_mixed]
            z = [z0[i] + sum(w_rat[j] * null[j][i] for j in range(nv)) for i in range(len(z0))]
            cand = _blocks_from_z(inst, cols, z)
            if all(check_psd_rational(m) for m in cand.values()):
                blocks_exact = cand
                bound = z[0] if inst.minimize_bound else None
                exact = True
                break
        if exact:
            break
    if not exact:
        raise RoundingError("could not reconstruct an exact PSD point near the solver output")

    obj = float(bound) if bound is not None else float(tstar)
    return GpSolution(sol.status, blocks_exact, bound, nullity, obj, sol.gap, sol.iterations, exact)


# --- certificates ------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A rational PSD certificate: blocks keyed by flag set or partition."""

    kind: str  # "flag" or "gp-restricted"
    blocks: dict[str, tuple[tuple[Fraction, ...], ...]]
    bound: Fraction | None
    meta: dict

    def block(self, key: str) -> list[list[Fraction]]:
        return [list(r) for r in self.blocks[key]]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "bound": None if self.bound is None else str(self.bound),
            "blocks": {
                key: [[str(x) for x in row] for row in rows] for key, rows in self.blocks.items()
            },
            "meta": self.meta,
        }

    @staticmethod
    def from_json(obj) -> "Certificate":
        blocks = {
            key: tuple(tuple(Fraction(x) for x in row) for row in rows)
            for key, rows in obj["blocks"].items()
        }
        bound = None if obj.get("bound") is None else Fraction(obj["bound"])
        return Certificate(obj["kind"], blocks, bound, obj.get("meta", {}))


def _freeze(m: list[list[Fraction]]):
    return tuple(tuple(row) for row in m)


def _project_psd(q: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w, u = np.linalg.eigh(0.5 * (q + q.T))
    w = np.maximum(w, floor)
    return (u * w) @ u.T


def round_to_certificate(
    solution: SdpSolution,
    instance,
    denom_bound: int = 10**4,
) -> Certificate:
    """Round a numeric solution to an exact rational PSD certificate.

    Entries are rounded with bounded denominators; if the rounded matrix is
    not exactly PSD it is floored at slightly positive eigenvalues and
    re-rounded with growing denominators.  Emits RoundingError rather than an
    invalid certificate.  For flag instances the bound is recomputed exactly
    from the rounded Q, so any PSD rounding yields a valid certificate.
    """
    if isinstance(instance, FlagSdpInstance):
        q_num = solution.blocks["Q"]
        attempt = q_num
        denom = denom_bound
        for _ in range(4):
            q_rat = [[Fraction(float(x)).limit_denominator(denom) for x in row] for row in attempt]
            for a in range(len(q_rat)):
                for b in range(a + 1, len(q_rat)):
                    q_rat[b][a] = q_rat[a][b]
            if check_psd_rational(q_rat):
                # zero out entries that the bound never needed (directions the
                # solver left floating inside its box)
                bound = exact_flag_bound(instance, q_rat)
                for a in range(len(q_rat)):
                    for b in range(a, len(q_rat)):
                        if q_rat[a][b] == 0:
                            continue
                        saved = q_rat[a][b]
                        q_rat[a][b] = q_rat[b][a] = Fraction(0)
                        if not (check_psd_rational(q_rat) and exact_flag_bound(instance, q_rat) <= bound):
                            q_rat[a][b] = q_rat[b][a] = saved
                bound = exact_flag_bound(instance, q_rat)
                return Certificate(
                    kind="flag",
                    blocks={"Q": _freeze(q_rat)},
                    bound=bound,
                    meta={
                        "type_size": instance.type_.size,
                        "flag_size": instance.flag_size,
                        "host_size": instance.host_size,
                        "forbidden": instance.forbidden.to_json(),
                        "solver_objective": solution.objective,
                        "solver_gap": solution.gap,
                    },
                )
            attempt = _project_psd(attempt)
            denom *= 100
        raise RoundingError(
            "no nearby rational PSD matrix found within the denominator bound",
            residual=float(np.linalg.eigvalsh(q_num).min()),
        )

    if isinstance(instance, GpSdpInstance):
        exact_blocks = solution.extra.get("exact_blocks")
        if exact_blocks is None:
            raise RoundingError("GP solution carries no exact blocks")
        blocks = {}
        for lam, m in exact_blocks.items():
            if not check_psd_rational(m):
                raise RoundingError(f"GP block {lam} failed the exact PSD check")
            blocks["partition:" + ",".join(map(str, lam))] = _freeze(m)
        return Certificate(
            kind="gp-restricted",
            blocks=blocks,
            bound=solution.extra.get("bound"),
            meta={"partitions": [list(l) for l in exact_blocks], "solver_gap": solution.gap},
        )
    raise FlagSosError(f"unknown instance type {type(instance)!r}")
