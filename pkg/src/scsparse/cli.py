"""Command-line entry point: ``scsparse <task> [options]``.

Exit codes: 0 success, 2 validation error, 3 size guard, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .builders import FiltrationConfig, ingest_hypergraph, sample_clustered_points, vietoris_rips
from .errors import NumericFailure, ScsparseError, SizeGuard, ValidationError
from .exact import ger_svd
from .experiments import (
    DEFAULT_OFFSET,
    dense_vr_epsilon,
    exact_measure,
    geometric_grid,
    sup_error,
    table_q,
    vr_complex,
)
from .kid import KidConfig, default_parameters, kid_run
from .metrics import eigenvalue_distance, eps_close_check, spectral_distance
from .sparsify import (
    ProbabilityMeasure,
    SparsifyConfig,
    default_q,
    kneighbours_sparsifier,
    measure_from_ger,
    perturb_measure,
    sample_sparsifier,
    uniform_sparsifier,
)

WORKERS_ENV = "SCSPARSE_WORKERS"
SUITES = ("moments", "mc", "timing", "table", "perturb", "acceptance")
SWEEP_AXES = {"m0": int, "eps": float, "M": int, "N_z": int, "fraction": float, "delta": float, "cap": int}
REPORT_COLUMNS = (
    "experiment", "m0", "filtration_eps", "k", "m_k", "m_k1", "method", "M", "N_z", "q", "seed",
    "error_inf", "spectral_distance", "wall_time_ms", "status",
)


def parse_sweep(items) -> dict[str, list]:
    """``["M=5,11,21", "m0=40"]`` -> ``{"M": [5, 11, 21], "m0": [40]}``."""
    out = {}
    for item in items or []:
        axis, sep, grid = item.partition("=")
        axis = axis.strip()
        if not sep or axis not in SWEEP_AXES:
            raise ValidationError(f"bad --sweep {item!r}; axes are {', '.join(SWEEP_AXES)}")
        values = [v for v in grid.split(",") if v.strip()]
        if not values:
            raise ValidationError(f"--sweep {axis} has an empty grid")
        try:
            out[axis] = [SWEEP_AXES[axis](v) for v in values]
        except ValueError:
            raise ValidationError(f"--sweep {axis}: cannot parse {grid!r}") from None
    return out


def parse_seeds(text: str | None, default: int = 5) -> list[int]:
    """``"7"`` means seeds 0..6; ``"1,4,9"`` is an explicit list."""
    if text is None:
        return list(range(default))
    parts = [p for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValidationError("empty seed list")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise ValidationError(f"bad seed list {text!r}") from None
    if len(vals) == 1:
        if vals[0] < 1:
            raise ValidationError("seed count must be >= 1")
        return list(range(vals[0]))
    return vals


@dataclass
class ExperimentConfig:
    task: str
    input: Path | None = None
    output: Path | None = None
    k: int = 1
    delta: float = 0.1
    eps: float | None = None
    C: float = 1.0
    q: int | None = None
    method: str = "exact"
    seeds: list[int] = field(default_factory=lambda: [0])
    sweep: dict[str, list] = field(default_factory=dict)


# -- single-file tasks -------------------------------------------------------


def cmd_generate(a) -> int:
    pc = sample_clustered_points(a.m0, a.cluster_offset, a.seed)
    _need_output(a)
    io.write_points(pc, a.output)
    return 0


def cmd_build_vr(a) -> int:
    if a.input:
        pc = io.read_points(a.input)
    else:
        pc = sample_clustered_points(a.m0, a.cluster_offset, a.seed)
    c = vietoris_rips(pc, FiltrationConfig(a.filtration_eps, a.max_order))
    _need_output(a)
    io.write_complex(c, a.output)
    print(f"counts {list(c.counts)}", file=sys.stderr)
    return 0


def cmd_ingest(a) -> int:
    _need_input(a)
    c = ingest_hypergraph(io.read_hyperedges(a.input), a.max_edge_size, a.max_order)
    _need_output(a)
    io.write_complex(c, a.output)
    print(f"counts {list(c.counts)}", file=sys.stderr)
    return 0


def cmd_resistance(a) -> int:
    c = _read_input_complex(a)
    k = a.order
    meta = {"method": a.method, "input": str(a.input), "m_k": c.m(k), "m_k1": c.m(k + 1)}
    t0 = time.perf_counter()
    if a.method == "exact":
        try:
            r = ger_svd(c, k)
        except SizeGuard as exc:
            raise SizeGuard(f"{a.input}: {exc}; use --method kid for large inputs") from None
        p = measure_from_ger(r, c.weights(k + 1))
    elif a.method == "kid":
        res = kid_run(c, k, KidConfig(delta=a.delta, M=a.moments, N_z=a.mc, seed=a.seed))
        r, p = res.resistance, res.measure
        meta |= {"delta": a.delta, "M": res.M, "N_z": res.N_z, "seed": a.seed,
                 "lambda_max": res.scale.lambda_max, "operator_applications": res.applications}
    else:
        raise ValidationError(f"resistance supports --method exact or kid, not {a.method!r}")
    meta["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    _need_output(a)
    csv_path, json_path = io.write_vectors(a.output, c, k, {"r": r.values, "p": p.probs}, meta)
    print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    return 0


def _measure_for(c, k, a) -> tuple[ProbabilityMeasure, str]:
    if a.measure:
        return io.read_measure(a.measure, c.m(k + 1)), f"file:{a.measure}"
    if a.method == "exact":
        return measure_from_ger(ger_svd(c, k), c.weights(k + 1)), "exact"
    res = kid_run(c, k, KidConfig(delta=a.delta, M=a.moments, N_z=a.mc, seed=a.seed))
    return res.measure, f"kid(delta={a.delta}, M={res.M}, N_z={res.N_z}, seed={a.seed})"


def cmd_sparsify(a) -> int:
    c = _read_input_complex(a)
    k = a.order
    eps = a.eps if a.eps is not None else 0.5
    q = a.q if a.q is not None else default_q(c.m(k), eps, a.bigC)
    meta = {"q": q, "q_source": "given" if a.q is not None else f"default_q(m_k={c.m(k)}, eps={eps}, C={a.bigC})",
            "seed": a.seed, "method": a.method, "k": k}
    t0 = time.perf_counter()
    if a.method in ("exact", "kid") or a.measure:
        p, meta["measure"] = _measure_for(c, k, a)
        res = sample_sparsifier(c, k, p, SparsifyConfig(q, eps=a.eps, C=a.bigC, seed=a.seed))
    elif a.method == "uniform":
        res = uniform_sparsifier(c, k, q, a.seed)
    elif a.method == "kneighbours":
        res = kneighbours_sparsifier(c, k, a.cap)
        meta["cap"] = a.cap
    else:
        raise ValidationError(f"unknown method {a.method!r}")
    meta["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    _need_output(a)
    out = Path(a.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_complex(res.sub_complex, out.with_suffix(".complex"))
    level = c.level(k + 1)
    draws = np.bincount(res.draw_log, minlength=c.m(k + 1))
    with open(out.with_suffix(".weights.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "simplex", "w_tilde_sq", "draws"])
        for i, wt in zip(res.kept.tolist(), res.new_sq_weights.tolist()):
            w.writerow([i, " ".join(map(str, level[i])), io.format_real(wt), int(draws[i])])
    meta |= {"kept": res.n_kept, "m_k1": c.m(k + 1), "draw_log": res.draw_log.tolist()}
    io.write_json(out.with_suffix(".json"), meta)
    print(f"kept {res.n_kept} of {c.m(k + 1)} simplices of order {k + 1}", file=sys.stderr)
    return 0


def cmd_evaluate(a) -> int:
    c = _read_input_complex(a)
    if not a.compare:
        raise ValidationError("evaluate needs --compare <sparsified complex>")
    sub = io.read_complex(a.compare)
    k = a.order
    out = {
        "spectral_distance": spectral_distance(c, sub, k),
        "eigenvalue_distance": eigenvalue_distance(c, sub, k),
    }
    if a.eps is not None:
        out["eps"] = a.eps
        out["eps_close"] = eps_close_check(c, sub, k, a.eps)
    if a.output:
        io.write_json(a.output, out)
    else:
        for key, v in out.items():
            print(f"{key}\t{v}")
    return 0


# -- benchmark ---------------------------------------------------------------


def _row(**kw) -> dict:
    row = {col: "" for col in REPORT_COLUMNS}
    row.update(kw)
    return row


def _vr_for(cell) -> tuple:
    m0, eps = cell["m0"], cell["eps"]
    if eps is None:
        eps = dense_vr_epsilon(m0, cell["k"], 0, cell["offset"])
        if eps is None:
            raise ValidationError(f"no dense VR threshold for m0={m0}")
    return vr_complex(m0, eps, cell.get("cloud_seed", 0), cell["offset"]), eps


def run_cell(cell: dict) -> list[dict]:
    """One (grid point, seed) cell; failures come back as marked rows."""
    experiment = cell["suite"] if "fraction" not in cell else f"{cell['suite']}@{cell['fraction']}q"
    base = {"experiment": experiment, "m0": cell["m0"], "k": cell["k"], "seed": cell["seed"]}
    try:
        return _run_cell(cell, base)
    except (ScsparseError, ArithmeticError, ValueError, MemoryError) as exc:
        return [_row(**base, method=cell.get("method", ""), filtration_eps=cell.get("eps") or "",
                     status=f"failed: {type(exc).__name__}: {exc}")]


def _run_cell(cell, base) -> list[dict]:
    suite, k, seed = cell["suite"], cell["k"], cell["seed"]
    c, eps = _vr_for(cell)
    base = base | {"filtration_eps": eps, "m_k": c.m(k), "m_k1": c.m(k + 1)}
    if suite in ("moments", "mc"):
        p = exact_measure(c, k)
        t0 = time.perf_counter()
        res = kid_run(c, k, KidConfig(delta=cell["delta"], M=cell.get("M"), N_z=cell.get("N_z"), seed=seed))
        ms = (time.perf_counter() - t0) * 1e3
        return [_row(**base, method="kid", M=res.M, N_z=res.N_z, error_inf=sup_error(p, res.measure),
                     wall_time_ms=ms, status="ok")]
    if suite == "timing":
        rows = []
        t0 = time.perf_counter()
        p = measure_from_ger(ger_svd(c, k), c.weights(k + 1))
        rows.append(_row(**base, method="exact", wall_time_ms=(time.perf_counter() - t0) * 1e3, error_inf=0.0, status="ok"))
        t0 = time.perf_counter()
        res = kid_run(c, k, KidConfig(delta=cell["delta"], M=cell.get("M"), N_z=cell.get("N_z"), seed=seed))
        ms = (time.perf_counter() - t0) * 1e3
        rows.append(_row(**base, method="kid", M=res.M, N_z=res.N_z, wall_time_ms=ms,
                         error_inf=sup_error(p, res.measure), status="ok"))
        return rows
    if suite == "table":
        q = max(1, int(cell["fraction"] * table_q(c, k, cell["q_eps"], cell["C"])))
        method = cell["method"]
        t0 = time.perf_counter()
        M = N_z = ""
        if method == "exact":
            sub = sample_sparsifier(c, k, exact_measure(c, k), SparsifyConfig(q, seed=seed)).sub_complex
        elif method == "kid":
            res = kid_run(c, k, KidConfig(delta=cell["delta"], seed=seed))
            M, N_z = res.M, res.N_z
            sub = sample_sparsifier(c, k, res.measure, SparsifyConfig(q, seed=seed)).sub_complex
        elif method == "uniform":
            sub = uniform_sparsifier(c, k, q, seed).sub_complex
        else:
            sub = kneighbours_sparsifier(c, k, cell["cap"]).sub_complex
            method = f"kneighbours(cap={cell['cap']})"
        ms = (time.perf_counter() - t0) * 1e3
        return [_row(**base, method=method, M=M, N_z=N_z, q=q, spectral_distance=spectral_distance(c, sub, k),
                     wall_time_ms=ms, status="ok")]
    if suite == "perturb":
        p = exact_measure(c, k)
        pt = perturb_measure(p, cell["delta"], seed)
        q = max(1, int(cell["fraction"] * table_q(c, k, cell["q_eps"], cell["C"])))
        t0 = time.perf_counter()
        sub = sample_sparsifier(c, k, pt, SparsifyConfig(q, seed=seed)).sub_complex
        ms = (time.perf_counter() - t0) * 1e3
        return [_row(**base, method=f"perturbed(delta={cell['delta']})", q=q, error_inf=sup_error(p, pt),
                     spectral_distance=spectral_distance(c, sub, k), wall_time_ms=ms, status="ok")]
    raise ValidationError(f"unknown suite {suite!r}")


def benchmark_cells(a, suite: str) -> list[dict]:
    sweep = parse_sweep(a.sweep)
    seeds = parse_seeds(a.seeds)
    k = a.order
    base = {"suite": suite, "k": k, "offset": a.cluster_offset, "delta": a.delta, "C": a.bigC,
            "q_eps": a.eps if a.eps is not None else 0.5}
    m0s = sweep.get("m0", [a.m0 if a.m0 is not None else {"timing": 60, "table": 50, "perturb": 50}.get(suite, 40)])
    default_eps = a.filtration_eps if a.filtration_eps is not None else {"table": 1.75, "perturb": 1.75}.get(suite)
    eps_grid = sweep.get("eps", [default_eps])
    points = []
    for m0 in m0s:
        for eps in eps_grid:
            g = base | {"m0": m0, "eps": eps}
            if suite == "moments":
                Ms = sweep.get("M") or _default_grid(g, "M")
                points += [g | {"M": M, "N_z": a.mc} for M in Ms]
            elif suite == "mc":
                Ns = sweep.get("N_z") or _default_grid(g, "N_z")
                points += [g | {"N_z": n, "M": a.moments} for n in Ns]
            elif suite == "timing":
                points.append(g | {"M": a.moments, "N_z": a.mc})
            elif suite == "table":
                fracs = sweep.get("fraction", [0.1, 0.2, 0.33])
                methods = [a.method] if a.method_given else ["exact", "kid", "uniform", "kneighbours"]
                for f in fracs:
                    for meth in methods:
                        if meth == "kneighbours":
                            points += [g | {"fraction": f, "method": meth, "cap": cap} for cap in sweep.get("cap", [1, 2, 4, 8])]
                        else:
                            points.append(g | {"fraction": f, "method": meth})
            elif suite == "perturb":
                for d in sweep.get("delta", [0.0, 0.5, 1.0, 2.0, 4.0]):
                    for f in sweep.get("fraction", [0.33]):
                        points.append(g | {"delta": d, "fraction": f})
    # the cloud seed follows the run seed for the table-style suites, as in the averaged comparisons
    cells = []
    for idx, pt in enumerate(points):
        for s in seeds:
            cloud = s if suite in ("table", "perturb") else 0
            cells.append(pt | {"seed": s, "cloud_seed": cloud, "point": idx})
    return cells


def _default_grid(g, axis) -> list[int]:
    c, _ = _vr_for(g | {"cloud_seed": 0})
    d = default_parameters(c.m(g["k"]), c.m(g["k"] + 1), g["delta"])
    if axis == "M":
        return geometric_grid(d.M, 1.0, 6, odd=True)
    return geometric_grid(d.N_z, 1.0, 6)


def _workers(a) -> int:
    if a.workers is not None:
        return max(1, a.workers)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"{WORKERS_ENV}={env!r} is not an integer") from None
    return 1


def run_suite(a, suite: str) -> list[dict]:
    cells = benchmark_cells(a, suite)
    workers = _workers(a)
    if workers == 1:
        results = [run_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run_cell, cells))
    rows = []
    for cell, res in sorted(zip(cells, results), key=lambda t: (t[0]["point"], t[0]["seed"])):
        rows.extend(res)
    return rows


def write_report(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: io.format_real(v) if isinstance(v, float) else v for k, v in row.items()})


def summarize(rows) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    # m_k, m_k1 and q vary with the cloud seed in the table-style suites, so they are averaged
    keys = ("experiment", "m0", "filtration_eps", "k", "method", "M", "N_z")
    for row in rows:
        swept = row["experiment"] in ("moments", "mc")
        groups.setdefault(tuple(row[key] if swept or key not in ("M", "N_z") else "" for key in keys), []).append(row)
    out = []
    for key, group in groups.items():
        ok = [r for r in group if r["status"] == "ok"]
        entry = dict(zip(keys, key)) | {"runs": len(group), "failed": len(group) - len(ok)}
        for col in ("m_k", "m_k1", "q", "M", "N_z", "error_inf", "spectral_distance", "wall_time_ms"):
            if col in ("M", "N_z") and entry[col] != "":
                continue
            vals = [float(r[col]) for r in ok if r[col] != ""]
            entry[f"{col}_mean"] = float(np.mean(vals)) if vals else ""
            entry[f"{col}_std"] = float(np.std(vals)) if vals else ""
        out.append(entry)
    return out


def cmd_benchmark(a) -> int:
    suites = [s for s in (a.suite or "moments").split(",") if s]
    for s in suites:
        if s not in SUITES:
            raise ValidationError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    outdir = Path(a.output or "bench")
    outdir.mkdir(parents=True, exist_ok=True)
    summary, status = [], 0
    for suite in suites:
        if suite == "acceptance":
            status |= _acceptance(outdir)
            continue
        rows = run_suite(a, suite)
        write_report(rows, outdir / f"{suite}.csv")
        summary += summarize(rows)
        failed = sum(r["status"] != "ok" for r in rows)
        print(f"{suite}: {len(rows)} rows, {failed} failed -> {outdir / f'{suite}.csv'}", file=sys.stderr)
    if summary:
        cols = list(dict.fromkeys(col for entry in summary for col in entry))
        with open(outdir / "summary.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for entry in summary:
                w.writerow({k: io.format_real(v) if isinstance(v, float) else v for k, v in entry.items()})
    return status


def _acceptance(outdir: Path) -> int:
    from .acceptance import run_all

    results = run_all()
    with open(outdir / "acceptance.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["criterion", "name", "passed", "seconds", "detail"])
        for r in results:
            print(r.line())
            w.writerow([r.number, r.name, r.passed, f"{r.seconds:.2f}", r.detail])
    return 0


# -- plumbing ----------------------------------------------------------------


def _need_input(a):
    if not a.input:
        raise ValidationError(f"{a.task} needs --input")


def _need_output(a):
    if not a.output:
        raise ValidationError(f"{a.task} needs --output")


def _read_input_complex(a):
    _need_input(a)
    return io.read_complex(a.input)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path)
    common.add_argument("--output", type=Path)
    common.add_argument("--order", "-k", type=int, default=1, help="sparsify (k+1)-simplices against order k")
    common.add_argument("--method", choices=("exact", "kid", "uniform", "kneighbours"), default=None)
    common.add_argument("--delta", type=float, default=0.1)
    common.add_argument("--eps", type=float, default=None, help="target closeness for default_q / evaluate")
    common.add_argument("--bigC", type=float, default=1.0)
    common.add_argument("--q", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--seeds", default=None, help="count N (seeds 0..N-1) or comma list")
    common.add_argument("--m0", type=int, default=None)
    common.add_argument("--cluster-offset", type=float, default=DEFAULT_OFFSET)
    common.add_argument("--filtration-eps", type=float, default=None)
    common.add_argument("--max-order", type=int, default=2)
    common.add_argument("--moments", "-M", type=int, default=None)
    common.add_argument("--mc", type=int, default=None, help="number of Monte-Carlo probe vectors N_z")
    common.add_argument("--workers", type=int, default=None, help=f"default from ${WORKERS_ENV}, else 1")
    common.add_argument("--sweep", action="append", default=[], metavar="AXIS=GRID")
    common.add_argument("--suite", default=None, help=f"comma list of {', '.join(SUITES)}")
    common.add_argument("--measure", type=Path, default=None, help="measure file (JSON 'p' or CSV 'p' column)")
    common.add_argument("--cap", type=int, default=4, help="k-Neighbours cap")
    common.add_argument("--compare", type=Path, default=None)
    common.add_argument("--max-edge-size", type=int, default=10)

    p = argparse.ArgumentParser(prog="scsparse", description="Spectral sparsification of simplicial complexes.")
    sub = p.add_subparsers(dest="task", required=True)
    for name, help_ in [
        ("generate", "sample a two-cluster point cloud"),
        ("build-vr", "Vietoris-Rips complex from points"),
        ("ingest", "simplicial closure of a hypergraph"),
        ("resistance", "resistances and sampling measure"),
        ("sparsify", "draw a sparsifier"),
        ("evaluate", "compare a sparsifier with its source"),
        ("benchmark", "experiment sweeps and the acceptance suite"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return p


COMMANDS = {
    "generate": cmd_generate, "build-vr": cmd_build_vr, "ingest": cmd_ingest, "resistance": cmd_resistance,
    "sparsify": cmd_sparsify, "evaluate": cmd_evaluate, "benchmark": cmd_benchmark,
}


def config_from_args(a) -> ExperimentConfig:
    """Validate the parsed flags and collect the run configuration."""
    a.method_given = a.method is not None
    if a.method is None:
        a.method = "exact"
    if a.task in ("generate", "build-vr") and a.m0 is None and not (a.task == "build-vr" and a.input):
        raise ValidationError(f"{a.task} needs --m0")
    if a.task == "build-vr" and a.filtration_eps is None:
        raise ValidationError("build-vr needs --filtration-eps")
    if a.delta is not None and not 0 < a.delta <= 1 and a.task in ("resistance", "sparsify") and a.method == "kid":
        raise ValidationError(f"--delta must lie in (0, 1], got {a.delta}")
    seeds = parse_seeds(a.seeds) if a.task == "benchmark" else [a.seed]
    return ExperimentConfig(a.task, a.input, a.output, a.order, a.delta, a.eps, a.bigC, a.q, a.method,
                            seeds, parse_sweep(a.sweep))


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        config_from_args(a)
        return COMMANDS[a.task](a)
    except SizeGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
