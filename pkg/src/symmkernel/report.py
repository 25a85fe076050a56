"""
Orchestration behind the command line: model configuration, analytic
bounds, numerical degeneracy reports, table and heatmap reproduction, and
the invariant check suites.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np
import scipy

from . import __version__
from .models import (
    GENERATOR_NAME,
    HubbardParams,
    NetworkParams,
    RandomDissipationSpec,
    exchange_operator,
    hubbard_number_ops,
    hubbard_symmetry_ops,
    hubbard_system,
    network_symmetry_basis,
    network_system,
    total_spin_ops,
    xxx_system_casimir,
    xxx_system_random,
)
from .operators import DEFAULT_TOL, Operator, basis_projector, dump_operator, identity
from .superop import (
    GAP_RATIO_MIN,
    MAX_DENSE_SIZE,
    OpenSystem,
    adjoint_liouvillian,
    degeneracy,
    evolve,
    is_strong_symmetry,
    kernel_basis,
    liouvillian,
    vectorize,
)
from .symmetry import (
    IrrepDecomposition,
    algebra_dimension,
    casimir_energy_check,
    distinct_irrep_bound,
    hubbard_bound,
    hubbard_decompose,
    network_bound,
    network_decompose,
    su2_chain_decompose,
)

__all__ = [
    "MODELS",
    "SCHEMA_VERSION",
    "ConfigError",
    "RunConfig",
    "DegeneracyReport",
    "HeatmapDump",
    "CheckResult",
    "build_system",
    "analytic_bound",
    "run_degeneracy",
    "table_rows",
    "write_table_csv",
    "read_table_csv",
    "figure2",
    "canonical_kernel_vector",
    "run_check",
    "CHECK_SUITES",
]

MODELS = ("network", "xxx-random", "xxx-casimir", "hubbard")
SCHEMA_VERSION = 1

# largest --sites per (family, sectors on)
SITE_BUDGET = {
    ("network", True): 50, ("network", False): 50,
    ("xxx", True): 7, ("xxx", False): 6,
    ("hubbard", True): 4, ("hubbard", False): 3,
}


class ConfigError(ValueError):
    """Bad model configuration; the CLI maps it to exit code 2."""


def _family(model: str) -> str:
    return "xxx" if model.startswith("xxx") else model


def _sig(x: float | None, digits: int = 6):
    # a few significant digits keep reports byte-stable across BLAS round-off
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


@dataclass(frozen=True)
class RunConfig:
    """Model selection plus every tunable parameter.

    ``baths`` is either a sequence of site indices (default couplings) or a
    sequence of ``(site, mu_plus, mu_minus)`` triples.
    """

    model: str
    sites: int
    baths: tuple | None = None
    eps_g: float = 0.0
    eps: float = 10.0
    h: float = 20.0
    t_hop: float = 1.0
    u_int: float = 2.0
    gamma: float = 1.0
    interaction: str = "symmetric"
    seed: int = 0
    num_jumps: int = 1
    tol: float = DEFAULT_TOL
    sectors: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.baths is not None:
            object.__setattr__(self, "baths", tuple(
                tuple(b) if isinstance(b, (list, tuple)) else int(b) for b in self.baths
            ))
        minimum = {"network": 2, "xxx": 2, "hubbard": 1}[_family(self.model)]
        if self.sites < minimum:
            raise ConfigError(f"{self.model} needs at least {minimum} sites")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        data = dict(data)
        if isinstance(data.get("baths"), list):
            data["baths"] = tuple(
                (b["site"], b["mu_plus"], b["mu_minus"]) if isinstance(b, Mapping) else b
                for b in data["baths"]
            )
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json_file(cls, path: str | Path, **overrides) -> "RunConfig":
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ConfigError("configuration file must hold a JSON object")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(data)

    def network_params(self) -> NetworkParams:
        energies = dict(eps_g=self.eps_g, eps=self.eps, h=self.h)
        try:
            if self.baths is None:
                return NetworkParams.with_baths(self.sites, (self.sites - 1, self.sites), **energies)
            if all(isinstance(b, tuple) for b in self.baths):
                return NetworkParams(self.sites, self.baths, **energies)
            return NetworkParams.with_baths(self.sites, self.baths, **energies)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def hubbard_params(self) -> HubbardParams:
        if self.u_int == 0:
            raise ConfigError("U = 0 is rejected: the extra symmetry can inflate the degeneracy")
        return HubbardParams(self.sites, self.t_hop, self.u_int, self.gamma, self.interaction)

    def random_spec(self) -> RandomDissipationSpec:
        return RandomDissipationSpec(self.num_jumps, self.seed)


def model_parameters(cfg: RunConfig) -> dict:
    """Full parameter record for a report."""
    if cfg.model == "network":
        p = cfg.network_params()
        return {"N": p.N, "baths": [list(b) for b in p.baths],
                "eps_g": p.eps_g, "eps": p.eps, "h": p.h, "bath_rate": 1.0}
    if cfg.model == "xxx-random":
        return {"N": cfg.sites, "num_jumps": cfg.num_jumps, "rate": 1.0,
                "coupling_distribution": "uniform[-1,1] real and imaginary parts",
                "diagonal_terms": "included"}
    if cfg.model == "xxx-casimir":
        return {"N": cfg.sites, "gamma": cfg.gamma}
    p = cfg.hubbard_params()
    return {"N": p.N, "t_hop": p.t_hop, "U": p.U, "gamma": p.gamma,
            "interaction": p.interaction, "boundary": "open"}


def build_system(cfg: RunConfig) -> tuple[OpenSystem, list[Operator], list[str]]:
    """Open system, diagonal charges usable for sector splitting, and their names."""
    if cfg.model == "network":
        return network_system(cfg.network_params()), [], []
    if cfg.model == "xxx-random":
        sys = xxx_system_random(cfg.sites, cfg.random_spec())
    elif cfg.model == "xxx-casimir":
        sys = xxx_system_casimir(cfg.sites, cfg.gamma)
    else:
        sys = hubbard_system(cfg.hubbard_params())
        return sys, list(hubbard_number_ops(cfg.sites)), ["N_up", "N_down"]
    return sys, [total_spin_ops(cfg.sites)[2]], ["S^z"]


@dataclass(frozen=True)
class Bound:
    analytic_bound: int
    decomposition: IrrepDecomposition
    refined_prediction: int | None = None


def analytic_bound(cfg: RunConfig) -> Bound:
    if cfg.model == "network":
        p = cfg.network_params()
        n = len(p.free_sites)
        if n < 1:
            raise ConfigError("every site is coupled to a bath; the bound needs a free site")
        return Bound(network_bound(n), network_decompose(p.N, n))
    if cfg.model == "hubbard":
        dec = hubbard_decompose(cfg.sites)
        return Bound(hubbard_bound(cfg.sites), dec)
    dec = su2_chain_decompose(cfg.sites)
    refined = None
    if cfg.model == "xxx-casimir":
        refined = sum(m * lab.dim ** 2 for lab, m in dec.labels.items())
    return Bound(distinct_irrep_bound(dec), dec, refined)


def check_budget(cfg: RunConfig) -> None:
    limit = SITE_BUDGET[(_family(cfg.model), cfg.sectors)]
    if cfg.sites > limit:
        hint = " (try --sectors on)" if not cfg.sectors and SITE_BUDGET[(_family(cfg.model), True)] > limit else ""
        raise ConfigError(
            f"{cfg.model} with {cfg.sites} sites exceeds the exact-diagonalization budget "
            f"of {limit} sites{hint}; use the 'bound' command for larger systems"
        )


@dataclass(frozen=True)
class SectorEntry:
    alpha: tuple
    beta: tuple
    block_dim: int
    nullity: int


@dataclass(frozen=True)
class DegeneracyReport:
    model: str
    parameters: dict
    seed: int
    generator: str
    analytic_bound: int
    refined_prediction: int | None
    energies_distinct: bool | None
    decomposition: list
    numerical_degeneracy: int
    charges: list
    sectors: tuple[SectorEntry, ...]
    tolerance: dict
    gap_ratio: float | None
    uncertain: bool
    runtime_ms: int
    version: str = __version__
    schema: int = SCHEMA_VERSION

    @property
    def bound_satisfied(self) -> bool:
        return self.numerical_degeneracy >= self.analytic_bound

    def to_dict(self) -> dict:
        out = {"schema": self.schema}
        for f in fields(self):
            if f.name == "schema":
                continue
            value = getattr(self, f.name)
            if f.name == "sectors":
                value = [
                    {"alpha": list(s.alpha), "beta": list(s.beta),
                     "block_dim": s.block_dim, "nullity": s.nullity}
                    for s in value
                ]
            out[f.name] = value
        out["bound_satisfied"] = self.bound_satisfied
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "DegeneracyReport":
        data = dict(data)
        data.pop("bound_satisfied", None)
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        data["sectors"] = tuple(
            SectorEntry(tuple(s["alpha"]), tuple(s["beta"]), s["block_dim"], s["nullity"])
            for s in data["sectors"]
        )
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "DegeneracyReport":
        return cls.from_dict(json.loads(text))


def run_degeneracy(cfg: RunConfig, *, workers: int | None = None,
                   dump: str | Path | None = None) -> DegeneracyReport:
    """Build the model, compute bound and kernel dimension, and assemble a report."""
    check_budget(cfg)
    start = time.perf_counter()
    sys, charges, names = build_system(cfg)
    bound = analytic_bound(cfg)
    if dump is not None:
        dump_operator(liouvillian(sys, sparse=True).as_operator(), dump)
    use = charges if cfg.sectors else []
    max_block = MAX_DENSE_SIZE
    num = degeneracy(sys, use, cfg.tol, max_block=max_block, workers=workers)
    distinct = None
    if cfg.model == "xxx-casimir":
        distinct = casimir_energy_check(cfg.sites, sys.H).energies_distinct
    runtime = int(round((time.perf_counter() - start) * 1000))
    return DegeneracyReport(
        model=cfg.model,
        parameters=model_parameters(cfg),
        seed=cfg.seed,
        generator=GENERATOR_NAME,
        analytic_bound=bound.analytic_bound,
        refined_prediction=bound.refined_prediction,
        energies_distinct=distinct,
        decomposition=bound.decomposition.to_json(),
        numerical_degeneracy=num.nullity,
        charges=names if use else [],
        sectors=tuple(SectorEntry(s.alpha, s.beta, s.block_dim, s.nullity) for s in num.sectors),
        tolerance={"rank_tol": cfg.tol, "threshold": _sig(num.threshold),
                   "rule": "sigma < rank_tol * sigma_max * d", "gap_ratio_min": GAP_RATIO_MIN},
        gap_ratio=_sig(num.gap_ratio),
        uncertain=num.uncertain,
        runtime_ms=runtime,
    )


# -- tables ----------------------------------------------------------------------

TABLE1_SIZES = (3, 5, 10, 20, 50)
TABLE2_SIZES = (2, 3, 4, 5, 6, 7)
TABLE3_SIZES = (2, 3, 4, 5)


def _exact(cfg: RunConfig) -> int | None:
    try:
        check_budget(cfg)
    except ConfigError:
        return None
    sys, charges, _ = build_system(cfg)
    return degeneracy(sys, charges if cfg.sectors else [], cfg.tol).nullity


def table_rows(which: int, *, seed: int = 0, exact: bool = True,
               tol: float = DEFAULT_TOL) -> tuple[list[str], list[list]]:
    """Header and rows of one reproduced table; exact columns are empty when skipped."""
    if which == 1:
        header = ["N", "free_sites", "bound", "actual"]
        rows = []
        for N in TABLE1_SIZES:
            cfg = RunConfig("network", N, tol=tol)
            b = analytic_bound(cfg).analytic_bound
            rows.append([N, N - 2, b, _exact(cfg) if exact else None])
        return header, rows
    if which == 2:
        header = ["N", "decomposition", "bound", "actual_random", "casimir_prediction", "actual_casimir"]
        rows = []
        for N in TABLE2_SIZES:
            rnd = RunConfig("xxx-random", N, seed=seed, tol=tol)
            cas = RunConfig("xxx-casimir", N, tol=tol)
            b = analytic_bound(cas)
            rows.append([
                N, b.decomposition.describe(), b.analytic_bound,
                _exact(rnd) if exact else None, b.refined_prediction,
                _exact(cas) if exact else None,
            ])
        return header, rows
    if which == 3:
        header = ["N", "irreps", "bound", "actual"]
        rows = []
        for N in TABLE3_SIZES:
            cfg = RunConfig("hubbard", N, tol=tol)
            b = analytic_bound(cfg)
            irreps = " ".join(str(lab) for lab in sorted(
                b.decomposition.labels, key=lambda lab: (-lab.dim, -lab.charge)))
            rows.append([N, irreps, b.analytic_bound, _exact(cfg) if exact else None])
        return header, rows
    raise ConfigError(f"unknown table {which}; choose 1, 2 or 3")


def _provenance(which: int, seed: int, tol: float) -> list[str]:
    return [
        f"# symmkernel table {which}",
        f"# seed={seed} generator={GENERATOR_NAME}",
        f"# rank_tol={tol} rule=sigma<rank_tol*sigma_max*d gap_ratio_min={GAP_RATIO_MIN:g}",
        f"# versions symmkernel={__version__} numpy={np.__version__} "
        f"scipy={scipy.__version__} python={platform.python_version()}",
    ]


def write_table_csv(which: int, header, rows, *, seed: int = 0, tol: float = DEFAULT_TOL) -> str:
    buf = io.StringIO()
    buf.write("\n".join(_provenance(which, seed, tol)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def read_table_csv(text: str) -> tuple[list[str], list[list]]:
    """Parse :func:`write_table_csv` output; integers come back as ints, blanks as None."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for raw in reader:
        row = []
        for v in raw:
            if v == "":
                row.append(None)
            elif v.lstrip("-").isdigit():
                row.append(int(v))
            else:
                row.append(v)
        rows.append(row)
    return header, rows


# -- heatmaps --------------------------------------------------------------------

@dataclass(frozen=True)
class HeatmapDump:
    """Magnitudes of a matrix in a named basis."""

    basis: str
    magnitudes: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=float)
        if mags.ndim != 2 or np.any(mags < 0):
            raise ValueError("magnitudes must be a nonnegative 2-D array")
        object.__setattr__(self, "magnitudes", mags)

    def to_text(self) -> str:
        rows, cols = self.magnitudes.shape
        lines = [f"{rows} {cols}", f"# basis {self.basis}", "# labels " + " ".join(self.labels)]
        lines += [" ".join(repr(float(x)) for x in row) for row in self.magnitudes]
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path: str | Path) -> "HeatmapDump":
        lines = Path(path).read_text().splitlines()
        rows, cols = (int(t) for t in lines[0].split())
        basis, labels = "", ()
        data = []
        for ln in lines[1:]:
            if ln.startswith("# basis "):
                basis = ln[len("# basis "):]
            elif ln.startswith("# labels"):
                labels = tuple(ln.split()[2:])
            elif ln.strip():
                data.append([float(t) for t in ln.split()])
        mags = np.array(data, dtype=float).reshape(rows, cols)
        return cls(basis, mags, labels)


def canonical_kernel_vector(K: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """First row of the reduced row-echelon form of the span of ``K``'s columns.

    This is the kernel vector with the lowest-index leading entry; it is
    returned unit-normalized with that entry real and positive.
    """
    A = np.array(K.T, dtype=complex)
    k, n = A.shape
    scale = np.abs(A).max()
    row = 0
    pivots = []
    for col in range(n):
        if row == k:
            break
        r = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[r, col]) <= tol * scale:
            continue
        A[[row, r]] = A[[r, row]]
        A[row] /= A[row, col]
        for other in range(k):
            if other != row:
                A[other] -= A[other, col] * A[row]
        pivots.append(col)
        row += 1
    v = A[0]
    return v / np.linalg.norm(v)


def figure2(p: NetworkParams | None = None, tol: float = DEFAULT_TOL) -> tuple[HeatmapDump, HeatmapDump, dict]:
    """Stationary state of the network in the configuration and adapted bases.

    Returns both heatmaps and a diagnostics dict with the relative coupling
    between the standard-representation block and the rest, the unitarity
    residual of the basis change, and the kernel dimension.
    """
    p = p or NetworkParams.figure_default()
    sys = network_system(p)
    d = sys.dim
    K = kernel_basis(liouvillian(sys), tol)
    rho = canonical_kernel_vector(K).reshape(d, d)
    U = network_symmetry_basis(p.N, p.free_sites)
    u = U.dense()
    adapted = u.conj().T @ rho @ u
    n = len(p.free_sites)
    psi = slice(0, n - 1)
    rest = slice(n - 1, d)
    top = np.abs(adapted).max()
    off = max(np.abs(adapted[psi, rest]).max(initial=0.0), np.abs(adapted[rest, psi]).max(initial=0.0))
    diag = {
        "kernel_dimension": int(K.shape[1]),
        "bound": network_bound(n),
        "off_block_relative": float(off / top),
        "unitarity_residual": float(np.abs(u.conj().T @ u - np.eye(d)).max()),
        "trace": complex(np.trace(rho)),
    }
    config = HeatmapDump("configuration", np.abs(rho), tuple(sys.space.basis_labels))
    adapted_dump = HeatmapDump("symmetry-adapted", np.abs(adapted), tuple(U.space.basis_labels))
    return config, adapted_dump, diag


# -- invariant check suites ------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name: str, fn: Callable[[], tuple[bool, str] | bool]) -> CheckResult:
    try:
        out = fn()
    except Exception as exc:  # a crashing check is a failed check
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    if isinstance(out, tuple):
        return CheckResult(name, bool(out[0]), out[1])
    return CheckResult(name, bool(out))


def _symmetry_checks() -> list[CheckResult]:
    cas = xxx_system_casimir(3)
    rnd = xxx_system_random(3, RandomDissipationSpec(seed=7))
    hub = hubbard_system(HubbardParams(2))
    hub_ops = hubbard_symmetry_ops(2)
    net = network_system(NetworkParams.table_default(5))
    Sx, Sy, Sz = total_spin_ops(3)
    out = [
        _check("xxx-casimir commutes with S^x", lambda: is_strong_symmetry(cas, Sx)),
        _check("xxx-casimir commutes with S^y", lambda: is_strong_symmetry(cas, Sy)),
        _check("xxx-casimir commutes with S^z", lambda: is_strong_symmetry(cas, Sz)),
    ]
    for name, S in (("S^x", Sx), ("S^y", Sy), ("S^z", Sz)):
        out.append(_check(f"xxx-random commutes with {name}", lambda S=S: is_strong_symmetry(rnd, S)))
    for key in ("eta+", "eta-", "etaz", "Sz"):
        out.append(_check(f"hubbard commutes with {key}",
                          lambda key=key: is_strong_symmetry(hub, hub_ops[key])))
    for key in ("S+", "S-"):
        out.append(_check(f"hubbard dephasing breaks {key}",
                          lambda key=key: not is_strong_symmetry(hub, hub_ops[key])))
    out.append(_check("network commutes with P_12", lambda: is_strong_symmetry(net, exchange_operator(1, 2, 5))))
    out.append(_check("network commutes with P_23", lambda: is_strong_symmetry(net, exchange_operator(2, 3, 5))))
    out.append(_check("network bath site breaks P_34",
                      lambda: not is_strong_symmetry(net, exchange_operator(3, 4, 5))))
    out.append(_check("identity is always a strong symmetry",
                      lambda: all(is_strong_symmetry(s, identity(s.space)) for s in (cas, rnd, hub, net))))
    return out


def _algebra_checks() -> list[CheckResult]:
    def network():
        gens = [exchange_operator(1, 2, 5), exchange_operator(2, 3, 5)]
        got, want = algebra_dimension(gens), network_bound(3)
        return got == want, f"algebra {got}, bound {want}"

    def su2():
        got, want = algebra_dimension(list(total_spin_ops(2))), distinct_irrep_bound(su2_chain_decompose(2))
        return got == want, f"algebra {got}, bound {want}"

    def hubbard():
        ops = hubbard_symmetry_ops(2)
        got = algebra_dimension([ops["eta+"], ops["eta-"], ops["etaz"], ops["Sz"]])
        want = hubbard_bound(2)
        return got == want, f"algebra {got}, bound {want}"

    return [
        _check("network N=5 exchange algebra", network),
        _check("SU(2) N=2 spin algebra", su2),
        _check("Hubbard N=2 eta x U(1) algebra", hubbard),
    ]


def _evolve_checks() -> list[CheckResult]:
    def network_trace():
        sys = network_system(NetworkParams.table_default(5))
        rho0 = basis_projector(1, 1, sys.space)
        rho = evolve(sys, rho0, T=10.0, dt=0.005)
        err = abs(rho.trace() - 1)
        return err <= 1e-9, f"|tr - 1| = {err:.2e}"

    def damping():
        from .operators import pauli

        sys = OpenSystem(Operator(np.zeros((2, 2))), ((pauli("+"), 1.0),))
        rho0 = basis_projector(1, 1, 2)
        rho = evolve(sys, rho0, T=2.0, dt=0.001).dense()
        err = abs(rho[1, 1].real - math.exp(-4.0))
        return err <= 1e-9, f"population error {err:.2e}"

    def adjoint_identity():
        worst = 0.0
        systems = [
            network_system(NetworkParams.table_default(5)),
            xxx_system_random(3, RandomDissipationSpec(seed=1)),
            xxx_system_casimir(3),
            hubbard_system(HubbardParams(2)),
        ]
        for sys in systems:
            M = adjoint_liouvillian(sys).dense()
            res = M @ vectorize(identity(sys.space))
            worst = max(worst, np.abs(res).max() / max(np.abs(M).max(), 1.0))
        return worst <= 1e-12, f"max relative residual {worst:.2e}"

    return [
        _check("network N=5 trace preserved to 1e-9", network_trace),
        _check("amplitude damping follows exp(-2 gamma t)", damping),
        _check("adjoint Liouvillian annihilates identity", adjoint_identity),
    ]


CHECK_SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "symmetries": _symmetry_checks,
    "algebra": _algebra_checks,
    "evolve": _evolve_checks,
}


def run_check(suite: str) -> list[CheckResult]:
    try:
        return CHECK_SUITES[suite]()
    except KeyError:
        raise ConfigError(f"unknown check suite {suite!r}; choose from {', '.join(CHECK_SUITES)}") from None


def bound_record(cfg: RunConfig) -> dict:
    b = analytic_bound(cfg)
    rec = {"schema": SCHEMA_VERSION, "model": cfg.model, "sites": cfg.sites,
           "analytic_bound": b.analytic_bound, "refined_prediction": b.refined_prediction,
           "decomposition": b.decomposition.to_json()}
    if cfg.model == "network":
        rec["free_sites"] = len(cfg.network_params().free_sites)
    return rec


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(type(obj).__name__)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"
