"""Instance generation, empirical constants, suites and reports."""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import reductions as red
from .forms import (EpsilonAssignment, eval_form_bitile_sum, eval_form_integral,
                    eval_form_trace, eval_lambda_bitile, random_interval_values,
                    telescoped_form, triple_terms)
from .geometry import bitile, down_set, enum_bitiles, is_convex, tile
from .mfcz import (admissible_bitiles, build_exceptional_sets, build_good_function,
                   maximal_intervals_in, verify_replacement)
from .projections import (ProjectionSystem, check_adapted, diagonal_function,
                          fiberwise_function, proj_tile)
from .trees import (Tree, counting_bound_violations, iterate_tree_selection,
                    single_tree_ratio, tree_select, tree_size)
from .walsh import WalshNumber

SCHEMA = 1
SUITES = ("identities", "projections", "tree-selection", "single-tree", "restricted-type",
          "mfcz", "carleson", "bht", "endpoint")


class ConfigError(ValueError):
    pass


# --- exponents ---------------------------------------------------------------

@dataclass(frozen=True)
class ExponentTriple:
    """``(alpha0, alpha1, alpha2)`` with ``sum = 1`` and ``p_i = 1 / alpha_i``."""
    alpha0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if abs(self.alpha0 + self.alpha1 + self.alpha2 - 1) > 1e-12:
            raise ValueError("exponents must sum to 1")

    @property
    def alphas(self) -> tuple[float, float, float]:
        return (self.alpha0, self.alpha1, self.alpha2)

    @property
    def p(self) -> tuple[float, ...]:
        return tuple(np.inf if a == 0 else 1 / a for a in self.alphas)

    @property
    def sigma(self) -> tuple[int, int, int]:
        """Indices in decreasing order of ``alpha`` (stable)."""
        return tuple(sorted(range(3), key=lambda i: -self.alphas[i]))

    def region(self) -> str:
        """Triangle label: ``c``, ``b_i``, ``d_ij``, ``a_i``, or ``other``."""
        al = self.alphas
        if all(0 < a <= 0.5 for a in al):
            return "c"
        for i in range(3):
            rest = [al[j] for j in range(3) if j != i]
            if al[i] > 0.5 and all(a > 0 for a in rest):
                return f"b{i}"
            if al[i] < 0 and all(a > 0.5 for a in rest):
                return f"a{i}"
        for i in range(3):
            for j in range(3):
                if i != j and al[i] < 0 and al[j] > 0.5:
                    return f"d{i}{j}"
        return "other"

    def in_solid_hexagon(self) -> bool:
        return self.region() in ("c", "b0", "b2", "d12", "d10")

    def covered(self, case: str = "diagonal", a: float = 1.0) -> bool:
        """Open exponent range of the strong-type bound for the given structure of ``F0``."""
        a0, a1, a2 = self.alphas
        lo0 = lo1 = 0.0
        hi0 = hi1 = 0.5
        if case == "fiberwise":
            hi0 = 1.0
        elif case == "diagonal" and 1 <= a < 2:
            hi0 = hi1 = 1.0
        return lo0 < a0 < hi0 and lo1 < a1 < hi1 and 0 < a2 < 1


# --- instances ---------------------------------------------------------------

@dataclass
class CaseSpec:
    n: int = 3
    case: str = "diagonal"
    a: float = 1.0
    sizes: tuple[float, float, float] = (1.0, 1.0, 1.0)
    values: str = "signs"           # signs | uniform | ones


def _exact_count(measure: float, cells: int) -> int:
    c = measure * cells
    if not (0 <= measure <= 1) or abs(c - round(c)) > 1e-9:
        raise ValueError(f"|E| = {measure} is not representable with {cells} cells")
    return int(round(c))


def _values(rng, shape, kind):
    if kind == "signs":
        return rng.choice((-1.0, 1.0), size=shape)
    if kind == "uniform":
        return rng.uniform(-1, 1, size=shape)
    if kind == "ones":
        return np.ones(shape)
    raise ValueError(f"unknown value kind {kind!r}")


def make_system(case: str, a: float, n: int, rng) -> ProjectionSystem:
    if case == "diagonal":
        return ProjectionSystem.diagonal(a)
    if case == "fiberwise":
        return ProjectionSystem.fiberwise(rng.integers(0, 1 << n, 1 << n))
    raise ConfigError(f"unknown case {case!r}")


def structured_F0(f: np.ndarray, sys: ProjectionSystem) -> np.ndarray:
    if sys.case == "diagonal":
        return diagonal_function(f, sys.a)
    return fiberwise_function(f, sys.N)


def gen_instance(spec: CaseSpec, seed: int):
    """Random ``(F0, F1, F2, sys, eps)`` with ``|F_i| <= 1_{E_i}`` and ``|E_i| = sizes[i]``."""
    rng = np.random.default_rng(seed)
    N = 1 << spec.n
    c0 = _exact_count(spec.sizes[0], N)
    c1, c2 = (_exact_count(s, N * N) for s in spec.sizes[1:])
    sys = make_system(spec.case, spec.a, spec.n, rng)
    e0 = np.zeros(N)
    e0[rng.choice(N, c0, replace=False)] = 1
    F0 = structured_F0(e0 * _values(rng, N, spec.values), sys)
    Fs = [F0]
    for c in (c1, c2):
        E = np.zeros(N * N)
        E[rng.choice(N * N, c, replace=False)] = 1
        Fs.append(E.reshape(N, N) * _values(rng, (N, N), spec.values))
    eps = EpsilonAssignment.random_signs(int(rng.integers(1 << 31)))
    return Fs[0], Fs[1], Fs[2], sys, eps


def _pool_map(fn, items):
    threads = int(os.environ.get("THT_THREADS", "1") or 1)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


# --- empirical constants -----------------------------------------------------

def aligned_form(F0, F1, F2) -> float:
    """``sup_eps |Lambda^eps|``: with sign-aligned coefficients it is the sum of ``|terms|``."""
    return float(sum(abs(v) for v in triple_terms(F0, F1, F2).values()))


def restricted_denominator(sizes) -> float:
    a0, a1, a2 = sorted(sizes, reverse=True)
    if a2 == 0:
        return 0.0
    return a1**0.5 * a2**0.5 * (1 + np.log(a0 / a1))


def _endpoint_candidates(n: int, sizes, sys: ProjectionSystem):
    """Inputs built on the one-variable example where the log factor is attained.

    ``F1 = g(x0) 1_[0,w1)(x2)``, ``F2 = h(x0) 1_[0,w2)(x1)`` with ``g, h`` on
    ``[0, d)``, and ``f`` matching the signs of ``H(gh)``.
    """
    N = 1 << n
    x = np.arange(N)
    c0 = _exact_count(sizes[0], N)
    _, eps_best = red.kappa(n)
    mult = lambda I: eps_best[-I.scale]           # noqa: E731
    for e in range(n + 1):
        d = 1 << (n - e)                           # support of g, h in cells
        w1, w2 = (s * N * N / d for s in sizes[1:])
        if not (1 <= w1 <= N and 1 <= w2 <= N and w1 == int(w1) and w2 == int(w2)):
            continue
        for sig in ("flat", "haar"):
            g = (x < d) * 1.0
            h = g * (np.where(x < d // 2, 1.0, -1.0) if sig == "haar" and d > 1 else 1.0)
            F1 = (x < w1)[:, None] * g[None, :]
            F2 = h[:, None] * (x < w2)[None, :]
            u = red.haar_multiplier(g * h, mult)
            f = np.where(u >= 0, 1.0, -1.0)
            keep = np.argsort(-np.abs(u), kind="stable")[:c0]
            mask = np.zeros(N)
            mask[keep] = 1
            yield structured_F0(f * mask, sys), F1, F2


def estimate_restricted_constant(sweep, trials: int = 4, seed: int = 0, n: int = 4,
                                 case: str = "diagonal", a: float = 1.0) -> list[dict]:
    """Per size triple: max of ``sup_eps |Lambda| / (a1^1/2 a2^1/2 (1 + log(a0/a1)))``."""
    rows = []
    for idx, sizes in enumerate(sweep):
        sizes = tuple(float(s) for s in sizes)
        den = restricted_denominator(sizes)

        def one(t, sizes=sizes, idx=idx):
            spec = CaseSpec(n, case, a, sizes, ("signs", "ones")[t % 2])
            F0, F1, F2, _, _ = gen_instance(spec, seed * 100003 + idx * 1009 + t)
            return aligned_form(F0, F1, F2)

        vals = _pool_map(one, range(trials))
        best_random = max(vals, default=0.0)
        sys = make_system(case, a, n, np.random.default_rng(seed))
        best_struct = max((aligned_form(*Fs) for Fs in _endpoint_candidates(n, sizes, sys)),
                          default=0.0)
        lam = max(best_random, best_struct)
        rows.append({"n": n, "a0": sizes[0], "a1": sizes[1], "a2": sizes[2],
                     "ratio_a0_a1": sorted(sizes, reverse=True)[0] / sorted(sizes, reverse=True)[1],
                     "lambda": lam, "denominator": den,
                     "constant": lam / den if den > 0 else 0.0,
                     "source": "endpoint" if best_struct >= best_random else "random"})
    return rows


def random_tree(rng, n: int) -> Tree:
    """Top at a random scale, members the down-set truncated at a random depth."""
    k = -int(rng.integers(0, n - 1))
    s = -k
    nw = 1 << max(n + k - 1, 0)
    top = bitile(k, int(rng.integers(1 << s)), int(rng.integers(1 << s)), int(rng.integers(nw)))
    kmin = -int(rng.integers(s, n))
    return Tree(top, frozenset(P for P in down_set(top, n) if P.scale >= kmin))


def estimate_single_tree(n: int, trials: int, seed: int = 0, case: str = "diagonal",
                         a: float = 1.0) -> dict:
    """Max over random trees and ``+-1`` inputs of the single tree ratio with aligned ``eps``."""
    def one(t):
        rng = np.random.default_rng([seed, n, t])
        N = 1 << n
        sys = make_system(case, a, n, rng)
        T = random_tree(rng, n)
        F0 = structured_F0(rng.choice((-1.0, 1.0), N), sys)
        F1, F2 = rng.choice((-1.0, 1.0), (2, N, N))
        sg = {P.triple: float(np.sign(eval_lambda_bitile(P, F0, F1, F2))) for P in T.members}
        eps = EpsilonAssignment(lambda tr: sg.get(tr, 0.0), "aligned")
        return single_tree_ratio(T, F0, F1, F2, eps, sys)

    vals = np.array(_pool_map(one, range(trials)))
    return {"n": n, "trials": trials, "max": float(vals.max()), "mean": float(vals.mean())}


# --- reports -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float | None
    tol: float | None
    status: str                 # pass | fail | warn | skipped
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    resolution: int
    config: dict
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"schema": SCHEMA, "suite": self.suite, "seed": self.seed,
             "resolution": self.resolution, "config": self.config,
             "passed": self.passed, "checks": [asdict(c) for c in self.checks],
             "tables": self.tables}
        if timing:
            d["elapsed"] = self.elapsed
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(_clean(self.to_dict(timing)), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [("check", "status", "value", "tol")]
        for c in self.checks:
            rows.append((c.name, c.status, "-" if c.value is None else f"{c.value:.3e}",
                         "-" if c.tol is None else f"{c.tol:.0e}"))
        w = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(s.ljust(w[i]) for i, s in enumerate(r)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * x for x in w))
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"{self.suite}: {verdict} (n={self.resolution}, seed={self.seed})")
        return "\n".join(lines)

    def to_csv(self, table: str) -> str:
        rows = self.tables[table]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# --- configuration -----------------------------------------------------------

@dataclass
class Config:
    suite: str = "all"
    resolution: int = 3
    seed: int = 0
    trials: int = 4
    case: str = "diagonal"
    a: float = 1.0
    exponents: str = ""
    out_path: str = ""
    tolerance: float = 1e-9

    def validate(self) -> "Config":
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.case not in ("diagonal", "fiberwise"):
            raise ConfigError(f"unknown case {self.case!r}")
        if not 2 <= self.resolution <= 6:
            raise ConfigError("resolution must be between 2 and 6")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        try:
            if self.case == "diagonal":
                ProjectionSystem.diagonal(self.a)
            WalshNumber.from_float(self.a, 16)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.exponents:
            self.exponent_triple()
        return self

    def exponent_triple(self) -> ExponentTriple:
        try:
            vals = [float(v) for v in self.exponents.split(",")]
            if len(vals) == 2:
                vals.append(1 - sum(vals))
            return ExponentTriple(*vals)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad exponents {self.exponents!r}: {e}") from None

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("out_path")
        return d


def parse_config(text: str, overrides: dict | None = None) -> Config:
    """Flat ``key = value`` lines (``#`` comments) plus overrides."""
    raw = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        raw[k.replace("-", "_")] = v
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    types = {f.name: f.type for f in fields(Config)}
    cfg = Config()
    for k, v in raw.items():
        if k not in types:
            raise ConfigError(f"unknown key {k!r}")
        cast = {"int": int, "float": float, "str": str}[types[k]]
        try:
            setattr(cfg, k, cast(v))
        except ValueError:
            raise ConfigError(f"bad value for {k}: {v!r}") from None
    return cfg.validate()


# --- suites ------------------------------------------------------------------

def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _exact(name, value, tol, detail=""):
    return Check(name, float(value), tol, "pass" if value <= tol else "fail", detail)


def _suite_identities(cfg: Config, rng) -> list[Check]:
    n = cfg.resolution
    worst = tele = 0.0
    for _ in range(cfg.trials):
        F = rng.standard_normal((3, 1 << n, 1 << n))
        eps = EpsilonAssignment.random_uniform(int(rng.integers(1 << 31)))
        ref = eval_form_integral(*F, eps)
        others = [eval_form_trace(*F, eps, i) for i in range(3)] + [eval_form_bitile_sum(*F, eps)]
        worst = max([worst] + [_rel(ref, v) for v in others])
        one = EpsilonAssignment.constant(1.0)
        tele = max(tele, _rel(eval_form_integral(*F, one), telescoped_form(*F)))
    return [_exact("three-way form equality", worst, cfg.tolerance),
            _exact("telescoping", tele, cfg.tolerance)]


def _suite_projections(cfg: Config, rng) -> list[Check]:
    n = cfg.resolution
    N = 1 << n
    sys = make_system(cfg.case, cfg.a, n, rng)
    tiles = [tile(k, p0, p2, w) for k in range(0, -n, -1) for p0 in range(1 << -k)
             for p2 in range(1 << -k) for w in range(1 << (n + k))]
    orth = supp = 0.0
    for _ in range(cfg.trials * 10):
        F = rng.standard_normal((N, N))
        i = int(rng.integers(3))
        p, q = (tiles[j] for j in rng.choice(len(tiles), 2, replace=False))
        if not _tiles_disjoint(p, q):
            continue
        orth = max(orth, float(np.abs(proj_tile(i, p, proj_tile(i, q, F, sys), sys)).max()))
        G = proj_tile(i, p, F, sys)
        rows, cols = p.interval((i + 1) % 3), p.interval((i - 1) % 3)
        out = np.ones((N, N), bool)
        w = 1 << (p.scale + n)
        out[rows.pos * w:(rows.pos + 1) * w, cols.pos * w:(cols.pos + 1) * w] = False
        supp = max(supp, float(np.abs(G[out]).max(initial=0.0)))
    bits = enum_bitiles(n)
    split = adapt = 0.0
    for _ in range(cfg.trials):
        P = bits[int(rng.integers(len(bits)))]
        F = rng.standard_normal((N, N))
        i = int(rng.integers(3))
        m = max(n, 1 - P.scale)
        fs = sum(proj_tile(i, p, F, sys, m) for p in P.frequency_split())
        ts = sum(proj_tile(i, p, F, sys, m) for p in P.time_split())
        split = max(split, float(np.abs(fs - ts).max()))
        F0 = structured_F0(rng.standard_normal(N), sys)
        F1, F2 = rng.standard_normal((2, N, N))
        Ps = down_set(P, n)
        adapt = max(adapt, check_adapted(P, Ps, F0, F1, F2, sys))
    return [_exact("orthogonality of disjoint tiles", orth, cfg.tolerance),
            _exact("support exactness", supp, cfg.tolerance),
            _exact("bitile splits agree", split, cfg.tolerance),
            _exact(f"adaptedness ({cfg.case})", adapt, cfg.tolerance)]


def _tiles_disjoint(p, q) -> bool:
    def meet(A, B):
        return A.contains(B) or B.contains(A)
    return not (meet(p.I0, q.I0) and meet(p.I2, q.I2) and meet(p.omega, q.omega))


def _suite_tree_selection(cfg: Config, rng) -> list[Check]:
    n = cfg.resolution
    N = 1 << n
    sys = make_system(cfg.case, cfg.a, n, rng)
    Ps = set(enum_bitiles(n))
    size_bad = count_bad = struct_bad = 0
    for _ in range(cfg.trials):
        F = (rng.random((N, N)) < 0.4) * rng.uniform(-1, 1, (N, N))
        i = int(rng.integers(3))
        lev = int(rng.integers(-1, 3))
        rest, T = tree_select(Ps, i, F, lev, sys, check=False)
        size_bad += tree_size(i, rest, F, sys) > 2.0**-lev * (1 + 1e-12)
        count_bad += len(counting_bound_violations(T, i, F, lev))
        members = [P for t in T for P in t.members]
        struct_bad += (len(members) != len(set(members)) or set(members) | rest != Ps
                       or not is_convex(rest))
    return [_exact("post-selection size bound", size_bad, 0),
            _exact("counting bound", count_bad, 0),
            _exact("partition and convexity", struct_bad, 0)]


def _suite_single_tree(cfg: Config, rng) -> list[Check]:
    r = estimate_single_tree(cfg.resolution, cfg.trials * 25, cfg.seed, cfg.case, cfg.a)
    status = "pass" if np.isfinite(r["max"]) and r["max"] <= 10 else "warn"
    return [Check("single tree constant", r["max"], None, status,
                  f"max over {r['trials']} random trees")]


def _suite_restricted(cfg: Config, rng, tables) -> list[Check]:
    n = cfg.resolution
    sweep = [(1.0, 1 / r, 1 / r) for r in (1, 4, 16, 64) if r <= 4**n]
    rows = estimate_restricted_constant(sweep, cfg.trials, cfg.seed, n, cfg.case, cfg.a)
    tables["restricted-type"] = rows
    c = max(r["constant"] for r in rows)
    status = "pass" if c <= 10 else "warn"
    return [Check("restricted type constant", c, None, status, f"max over {len(rows)} size triples")]


def mfcz_pipeline(n: int, seed: int, p0: float = 2.5, p2: float = 4.0, level: int = 3) -> dict:
    """Exceptional sets, admissible bitiles, trees for ``F~0`` and the good-function swap."""
    rng = np.random.default_rng(seed)
    N = 1 << n
    E0 = rng.random((N, N)) < 0.5
    E2 = np.zeros((N, N), bool)
    E2[rng.integers(0, N, 6), rng.integers(0, N, 6)] = True
    E1 = rng.random((N, N)) < 0.7
    S = build_exceptional_sets(E0, E2, p0, p2, threshold=0.5 * E2.mean() ** (-1 / p2))
    F0 = rng.uniform(-1, 1, (N, N)) * E0 * E0.mean() ** (-1 / p0)
    F1 = rng.uniform(-1, 1, (N, N)) * (E1 & ~S.B1) * E1.mean() ** -0.5
    F2 = rng.uniform(-1, 1, (N, N)) * E2 * E2.mean() ** (-1 / p2)
    Ps = admissible_bitiles(enum_bitiles(n), S.B1)
    levels, _ = iterate_tree_selection(Ps, 0, F0, level)
    J = maximal_intervals_in(S.B2)
    resid = scale = 0.0
    for Tk in levels.values():
        if not len(Tk):
            continue
        G = build_good_function(F2, Tk, J)
        resid = max(resid, verify_replacement(Tk.union(), F0, F1, F2, G.G, B1=S.B1))
        scale = max([scale] + [abs(eval_lambda_bitile(P, F0, F1, F2)) for P in Tk.union()])
    return {"residual": resid, "max_lambda": scale, "B1": S.measure_B1,
            "E2_in_B2": bool((E2 <= S.B2).all())}


def _suite_mfcz(cfg: Config, rng) -> list[Check]:
    # the normalized regime needs at least 32 cells per fiber, whatever the resolution
    outs = [mfcz_pipeline(5, cfg.seed * 1000 + t) for t in range(max(1, cfg.trials // 2))]
    live = max(o["max_lambda"] for o in outs)
    if live > 0:
        rel = max(o["residual"] for o in outs) / live
        first = _exact("replacement identity (relative)", rel, cfg.tolerance)
    else:
        first = Check("replacement identity (relative)", None, cfg.tolerance, "skipped",
                      "no tree carried a nonzero bitile form")
    return [first, _exact("|B1| below 1/2", max(o["B1"] for o in outs), 0.5)]


def _suite_carleson(cfg: Config, rng) -> list[Check]:
    n = cfg.resolution
    N = 1 << n
    worst = agree = 0.0
    for _ in range(cfg.trials):
        f, g = rng.standard_normal((2, N))
        Nf = rng.integers(0, N, N)
        eps = random_interval_values(int(rng.integers(1 << 31)), "uniform")
        lam = eval_form_integral(*red.build_carleson_triple(f, g, Nf), red.per_I0(eps))
        worst = max(worst, _rel(lam, red.carleson_pairing(f, g, eps, Nf)))
        sup, arg = red.max_mod_sup(f, eps)
        agree = max(agree, float(np.abs(np.abs(red.max_mod_haar(f, eps, arg)) - sup).max()))
    return [_exact("carleson identity", worst, cfg.tolerance),
            _exact("sup equals linearized argmax", agree, cfg.tolerance)]


def _suite_bht(cfg: Config, rng) -> list[Check]:
    checks = []
    for L in (1, 2):
        n_in = cfg.resolution - L
        if n_in < 1:
            checks.append(Check(f"bht three-way (L={L})", None, cfg.tolerance, "skipped",
                                "resolution too small for this L"))
            continue
        worst = 0.0
        for _ in range(cfg.trials):
            f, g, h = rng.standard_normal((3, 1 << n_in))
            eps = random_interval_values(int(rng.integers(1 << 31)), "uniform")
            a = red.eval_bht_form(f, g, h, L, eps)
            worst = max(worst, _rel(a, red.eval_bht_expanded(f, g, h, L, eps)),
                        _rel(a, red.eval_bht_projection_form(f, g, h, L, eps)))
        checks.append(_exact(f"bht three-way (L={L})", worst, cfg.tolerance))
    return checks


def _suite_endpoint(cfg: Config, rng, tables) -> list[Check]:
    d = red.endpoint_demo(range(2, 9), cfg.seed, n_identity=cfg.resolution)
    tables["kappa"] = [{"n": n, "kappa": v} for n, v in d["kappa"].items()]
    return [_exact("endpoint identity", d["identity_residual"], cfg.tolerance),
            Check("kappa strictly increasing", float(np.diff(list(d["kappa"].values())).min()), None,
                  "pass" if d["increasing"] else "fail", "smallest consecutive gap"),
            Check("kappa linear lower bound", d["linear_lower_bound"], None,
                  "pass" if d["linear_lower_bound"] > 0 else "fail")]


def run_suite(name: str, config: Config | None = None) -> SuiteReport:
    cfg = Config(**{**asdict(config or Config()), "suite": name}).validate()
    names = SUITES if name == "all" else (name,)
    rep = SuiteReport(name, cfg.seed, cfg.resolution, cfg.as_dict())
    t0 = time.perf_counter()
    for s in names:
        rng = np.random.default_rng([cfg.seed, SUITES.index(s)])
        if s == "identities":
            checks = _suite_identities(cfg, rng)
        elif s == "projections":
            checks = _suite_projections(cfg, rng)
        elif s == "tree-selection":
            checks = _suite_tree_selection(cfg, rng)
        elif s == "single-tree":
            checks = _suite_single_tree(cfg, rng)
        elif s == "restricted-type":
            checks = _suite_restricted(cfg, rng, rep.tables)
        elif s == "mfcz":
            checks = _suite_mfcz(cfg, rng)
        elif s == "carleson":
            checks = _suite_carleson(cfg, rng)
        elif s == "bht":
            checks = _suite_bht(cfg, rng)
        else:
            checks = _suite_endpoint(cfg, rng, rep.tables)
        for c in checks:
            c.name = f"{s}: {c.name}"
        rep.checks += checks
    rep.elapsed = time.perf_counter() - t0
    return rep
