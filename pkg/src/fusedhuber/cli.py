"""Command-line front end: dataset ingestion, column ordering, experiment
orchestration, and report emission (CSV tables plus rendered figures).

Dataset format: UTF-8 CSV with a header row; one column (default "y") is
the response, every other column is a numeric feature in file order.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage
from scipy.spatial.distance import squareform

from . import __version__
from .core import Loss, ProblemData, SolverConfig
from .diagnostics import (
    cone_check,
    gram_matrix,
    huber_gradient,
    huber_hessian,
)
from .metrics import estimation_error, kurtosis, mae, residual_std
from .plots import (
    coefficient_profile,
    kurtosis_histogram,
    residual_history,
    score_scatter,
)
from .simulate import NoiseKind, SyntheticSpec, generate
from .solver import solve, solve_least_squares
from .tune import TuneGrid, grid_search, tau_grid


class DataFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dataset I/O

def load_csv(path, response: str = "y") -> ProblemData:
    """Parse a dataset CSV into ProblemData.

    Rejects missing/non-numeric cells with the offending row and column in
    the error message.  Requires at least 2 feature columns.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected a header row")
        header = [h.strip() for h in header]
        if response not in header:
            raise DataFormatError(f"{path}: no response column named {response!r}")
        y_idx = header.index(response)
        feature_names = [h for i, h in enumerate(header) if i != y_idx]
        if len(feature_names) < 2:
            raise DataFormatError(f"{path}: fewer than 2 feature columns")
        rows = []
        ys = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DataFormatError(
                    f"{path}: row {line_no} has {len(record)} cells, expected {len(header)}"
                )
            parsed = []
            for col, cell in zip(header, record):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: non-numeric cell {cell!r} at row {line_no}, column {col!r}"
                    ) from None
                if not np.isfinite(value):
                    raise DataFormatError(
                        f"{path}: non-finite cell at row {line_no}, column {col!r}"
                    )
                parsed.append(value)
            ys.append(parsed[y_idx])
            rows.append([v for i, v in enumerate(parsed) if i != y_idx])
    if not rows:
        raise DataFormatError(f"{path}: no data rows below the header")
    return ProblemData(X=np.array(rows), y=np.array(ys))


def save_csv(data: ProblemData, path, response: str = "y", feature_names=None) -> Path:
    """Write ProblemData as CSV; floats use shortest round-trip repr."""
    path = Path(path)
    if feature_names is None:
        feature_names = [f"x{j + 1}" for j in range(data.p)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([response, *feature_names])
        for yi, row in zip(data.y, data.X):
            writer.writerow([repr(float(yi)), *[repr(float(v)) for v in row]])
    return path


def write_table(path, rows, fieldnames=None) -> Path:
    path = Path(path)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                 for k, v in row.items()}
            )
    return path


def write_vector_csv(path, name, values) -> Path:
    return write_table(
        path,
        [{"index": i + 1, name: float(v)} for i, v in enumerate(values)],
        fieldnames=["index", name],
    )


# ---------------------------------------------------------------------------
# column ordering / normalization

def hierarchical_order(X) -> np.ndarray:
    """Column permutation from agglomerative clustering.

    Distance 1 - |corr| between columns, average linkage; the returned
    permutation is the dendrogram leaf order.  scipy's linkage is
    deterministic (ties resolved by lower index).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("X must be a matrix with at least 2 columns")
    sd = X.std(axis=0)
    bad = np.where(sd == 0)[0]
    if bad.size:
        raise ValueError(f"zero-variance column at index {int(bad[0])}")
    corr = np.corrcoef(X, rowvar=False)
    dist = 1.0 - np.abs(corr)
    np.fill_diagonal(dist, 0.0)
    dist = np.clip(dist, 0.0, None)
    Z = linkage(squareform(dist, checks=False), method="average")
    return np.asarray(leaves_list(Z), dtype=int)


def normalize_columns(X) -> np.ndarray:
    """Scale each column by its max absolute value (targets ||x_j||_inf <= 1)."""
    X = np.asarray(X, dtype=float)
    scale = np.max(np.abs(X), axis=0)
    scale[scale == 0] = 1.0
    return X / scale


# ---------------------------------------------------------------------------
# orchestration helpers

def _write_manifest(out: Path, command: str, config: dict) -> None:
    manifest = {
        "command": command,
        "config": config,
        "versions": {
            "fusedhuber": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _solver_config(args, loss=None) -> SolverConfig:
    return SolverConfig(
        tau=args.tau if args.tau is not None else 1.345,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        sigma=args.sigma,
        pi=args.pi,
        tol=args.tol,
        max_iter=args.max_iter,
        loss=loss or args.loss,
    )


def _prepare_data(args):
    """Load a dataset, apply ordering/normalization, return (data, permutation)."""
    data = load_csv(args.data, response=args.response)
    perm = None
    X = data.X
    if args.order == "hierarchical":
        perm = hierarchical_order(X)
        X = X[:, perm]
    if args.normalize:
        X = normalize_columns(X)
    if perm is not None or args.normalize:
        data = ProblemData(X=X, y=data.y)
    return data, perm


def _split(data: ProblemData, train_size: int | None, seed: int):
    """Deterministic seeded-shuffle train/validation split (default 70/30)."""
    n = data.n
    if train_size is None:
        train_size = int(round(0.7 * n))
    if not (1 <= train_size < n):
        raise ValueError(f"train size {train_size} must be in [1, n)")
    order = np.random.default_rng(seed).permutation(n)
    tr, va = order[:train_size], order[train_size:]
    return (
        ProblemData(X=data.X[tr], y=data.y[tr]),
        ProblemData(X=data.X[va], y=data.y[va]),
    )


def _default_bench_grid(n: int, p: int) -> TuneGrid:
    taus = tau_grid(n, p)
    return TuneGrid(
        taus=(taus[0], taus[len(taus) // 2], taus[-1]),
        lambda1s=tuple(np.logspace(-3, 1, 5)),
        lambda2s=tuple(np.logspace(-3, 1, 3)),
    )


# ---------------------------------------------------------------------------
# subcommands

def run_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = SyntheticSpec(
        n=args.n, n_test=args.n_test, p=args.p, rho=args.rho,
        noise=args.noise, seed=args.seed,
    )
    train, test, beta_star = generate(spec)
    save_csv(train, out / "train.csv", response=args.response)
    if test is not None:
        save_csv(test, out / "test.csv", response=args.response)
    write_vector_csv(out / "beta_star.csv", "beta_star", beta_star)
    _write_manifest(out, "simulate", vars(args))
    return 0


def run_fit(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data, perm = _prepare_data(args)
    cfg = _solver_config(args)
    result = solve(data, cfg)
    write_vector_csv(out / "beta.csv", "beta", result.beta)
    write_table(
        out / "residual_history.csv",
        [
            {
                "iteration": i + 1,
                "phi_mu": r.phi_mu, "phi_z": r.phi_z, "phi_alpha": r.phi_alpha,
                "phi_beta": r.phi_beta, "phi_gamma": r.phi_gamma, "res": r.res,
            }
            for i, r in enumerate(result.residual_history)
        ],
    )
    summary = {
        "status": result.status.value,
        "iterations": result.iterations,
        "objective": None,
        "residual_std": residual_std(data, result.beta) if data.n >= 2 else None,
    }
    from .core import objective

    summary["objective"] = objective(data, result.beta, cfg)
    write_table(out / "fit_summary.csv", [summary])
    if perm is not None:
        write_vector_csv(out / "column_order.csv", "original_index", perm)
    residual_history(out / "residual_history.png", result.residual_history, tol=cfg.tol)
    coefficient_profile(
        out / "beta_profile.png", np.zeros(data.p), {"fit": result.beta},
        title=f"fitted coefficients ({cfg.loss.value} loss)",
    )
    _write_manifest(out, "fit", vars(args))
    return 0 if result.converged else 1


def run_tune(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data, _ = _prepare_data(args)
    if args.validation:
        va_args = argparse.Namespace(**{**vars(args), "data": args.validation})
        validation, _ = _prepare_data(va_args)
        train = data
    else:
        train, validation = _split(data, args.train_size, args.seed)
    taus = tuple(tau_grid(train.n, train.p)) if args.tau is None else (args.tau,)
    grid = TuneGrid(
        taus=taus,
        lambda1s=tuple(args.lambda1_grid) if args.lambda1_grid else TuneGrid().lambda1s,
        lambda2s=tuple(args.lambda2_grid) if args.lambda2_grid else TuneGrid().lambda2s,
    )
    best, table = grid_search(
        train, validation, grid, loss=args.loss,
        sigma=args.sigma, pi=args.pi, tol=args.tol, max_iter=args.max_iter,
    )
    write_table(out / "score_table.csv", table)
    with open(out / "best_config.json", "w", encoding="utf-8") as fh:
        json.dump(
            {"tau": best.tau, "lambda1": best.lambda1, "lambda2": best.lambda2,
             "sigma": best.sigma, "pi": best.pi, "tol": best.tol,
             "max_iter": best.max_iter, "loss": best.loss.value},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    score_scatter(out / "score_table.png", table, title="validation MAE over the grid")
    _write_manifest(out, "tune", vars(args))
    return 0


def _bench_cell(noise, p, rep, args):
    """One replication: generate, (re)use tuned params, fit both losses."""
    spec = SyntheticSpec(
        n=args.n, n_test=args.n_test, p=p, noise=noise, seed=args.seed + rep,
    )
    train, test, beta_star = generate(spec)
    rows = []
    fits = {}
    for method, runner in (("huber", solve), ("squared", solve_least_squares)):
        if args.tau is not None and args.lambda1 is not None and args.lambda2 is not None:
            cfg = SolverConfig(
                tau=args.tau, lambda1=args.lambda1, lambda2=args.lambda2,
                sigma=args.sigma, pi=args.pi, tol=args.tol, max_iter=args.max_iter,
            )
        else:
            cfg, _ = grid_search(
                train, test, _default_bench_grid(args.n, p),
                loss=Loss.HUBER if method == "huber" else Loss.SQUARED,
                sigma=args.sigma, pi=args.pi, tol=args.tol, max_iter=args.max_iter,
            )
        t0 = time.perf_counter()
        result = runner(train, cfg)
        cpu = time.perf_counter() - t0
        fits[method] = result.beta
        rows.append({
            "noise": noise.value, "p": p, "replication": rep, "method": method,
            "mse": estimation_error(result.beta, beta_star),
            "std": residual_std(train, result.beta),
            "mae": mae(test, result.beta) if test is not None else float("nan"),
            "iterations": result.iterations,
            "status": result.status.value,
            "cpu": cpu,
        })
    return rows, beta_star, fits


def run_bench(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    noises = [NoiseKind(nm) for nm in args.noise_list]
    ps = list(args.p_list)
    raw = []
    failures = 0
    for noise in noises:
        for p in ps:
            for rep in range(args.replications):
                try:
                    rows, beta_star, fits = _bench_cell(noise, p, rep, args)
                except Exception as exc:
                    failures += 1
                    raw.append({
                        "noise": noise.value, "p": p, "replication": rep,
                        "method": "error", "mse": float("nan"), "std": float("nan"),
                        "mae": float("nan"), "iterations": 0,
                        "status": f"error: {exc}", "cpu": float("nan"),
                    })
                    continue
                raw.extend(rows)
                if rep == 0:
                    stem = f"coefficients_{noise.value}_p{p}"
                    write_table(
                        out / f"{stem}.csv",
                        [
                            {"index": i + 1, "beta_star": beta_star[i],
                             "huber": fits["huber"][i], "squared": fits["squared"][i]}
                            for i in range(p)
                        ],
                    )
                    coefficient_profile(
                        out / f"{stem}.png", beta_star, fits,
                        title=f"{noise.value}, p = {p}",
                    )
    summary = []
    timing = []
    for noise in noises:
        for p in ps:
            for method in ("huber", "squared"):
                cell = [
                    r for r in raw
                    if r["noise"] == noise.value and r["p"] == p and r["method"] == method
                ]
                if not cell:
                    continue
                for metric in ("mse", "std", "mae"):
                    summary.append({
                        "noise": noise.value, "p": p, "method": method,
                        "metric": metric,
                        "value": float(np.mean([r[metric] for r in cell])),
                        "median": float(np.median([r[metric] for r in cell])),
                    })
                timing.append({
                    "noise": noise.value, "p": p, "method": method,
                    "metric": "cpu",
                    "value": float(np.mean([r["cpu"] for r in cell])),
                })
    for row in raw:
        row.pop("cpu", None)
    write_table(out / "bench_raw.csv", raw)
    write_table(out / "bench_summary.csv", summary)
    # wall-clock times vary run to run; kept out of the deterministic outputs
    write_table(out / "bench_timing.csv", timing)
    _write_manifest(out, "bench", vars(args))
    return 0 if failures == 0 else 1


def run_diagnose(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data, _ = _prepare_data(args)
    tau = args.tau if args.tau is not None else 1.345
    kurtoses = []
    for j in range(data.p):
        col = data.X[:, j]
        try:
            kurtoses.append({"column": j + 1, "kurtosis": kurtosis(col)})
        except ValueError:
            kurtoses.append({"column": j + 1, "kurtosis": float("nan")})
    write_table(out / "kurtosis.csv", kurtoses)
    finite = [row["kurtosis"] for row in kurtoses if np.isfinite(row["kurtosis"])]
    kurtosis_histogram(out / "kurtosis.png", finite, title="per-column kurtosis")

    beta0 = np.zeros(data.p)
    S = gram_matrix(data)
    H = huber_hessian(data, beta0, tau)
    rng = np.random.default_rng(args.seed)
    gap = []
    for _ in range(50):
        u = rng.standard_normal(data.p)
        gap.append(float(u @ (S - H) @ u))
    grad = huber_gradient(data, beta0, tau)
    n_heavy = sum(1 for k in finite if k > 3)
    n_severe = sum(1 for k in finite if k > 9)
    write_table(
        out / "diagnostics.csv",
        [{
            "tau": tau,
            "columns": data.p,
            "kurtosis_gt_3": n_heavy,
            "kurtosis_gt_9": n_severe,
            "hessian_sandwich_min_gap": min(gap),
            "grad_inf_norm_at_zero": float(np.max(np.abs(grad))),
        }],
    )
    _write_manifest(out, "diagnose", vars(args))
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(parser):
    parser.add_argument("--config", type=Path, help="JSON config file; flags override it")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--response", default="y")


def _add_solver_flags(parser):
    parser.add_argument("--tau", type=float, default=None)
    parser.add_argument("--lambda1", type=float, default=0.0)
    parser.add_argument("--lambda2", type=float, default=0.0)
    parser.add_argument("--sigma", type=float, default=0.1)
    parser.add_argument("--pi", type=float, default=1.0)
    parser.add_argument("--tol", type=float, default=1e-3)
    parser.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    parser.add_argument("--loss", choices=[l.value for l in Loss], default=Loss.HUBER.value)
    parser.add_argument("--normalize", action="store_true")
    parser.add_argument("--order", choices=["none", "hierarchical"], default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusedhuber",
        description="Fused-lasso penalized Huber regression via multi-block ADMM",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic dataset")
    _add_common(p_sim)
    p_sim.add_argument("--n", type=int, default=100)
    p_sim.add_argument("--n-test", type=int, default=100, dest="n_test")
    p_sim.add_argument("--p", type=int, default=50)
    p_sim.add_argument("--rho", type=float, default=0.5)
    p_sim.add_argument("--noise", choices=[k.value for k in NoiseKind],
                       default=NoiseKind.GAUSSIAN.value)
    p_sim.set_defaults(func=run_simulate)

    p_fit = sub.add_parser("fit", help="fit one model on a dataset CSV")
    _add_common(p_fit)
    _add_solver_flags(p_fit)
    p_fit.add_argument("--data", type=Path, required=True)
    p_fit.set_defaults(func=run_fit)

    p_tune = sub.add_parser("tune", help="grid search over (tau, lambda1, lambda2)")
    _add_common(p_tune)
    _add_solver_flags(p_tune)
    p_tune.add_argument("--data", type=Path, required=True)
    p_tune.add_argument("--validation", type=Path, default=None)
    p_tune.add_argument("--train-size", type=int, default=None, dest="train_size")
    p_tune.add_argument("--lambda1-grid", type=float, nargs="+", dest="lambda1_grid")
    p_tune.add_argument("--lambda2-grid", type=float, nargs="+", dest="lambda2_grid")
    p_tune.set_defaults(func=run_tune)

    p_bench = sub.add_parser("bench", help="replicated synthetic benchmark")
    _add_common(p_bench)
    _add_solver_flags(p_bench)
    p_bench.add_argument("--n", type=int, default=100)
    p_bench.add_argument("--n-test", type=int, default=100, dest="n_test")
    p_bench.add_argument("--p", type=int, nargs="+", default=[50], dest="p_list")
    p_bench.add_argument("--noise", nargs="+", choices=[k.value for k in NoiseKind],
                         default=[k.value for k in NoiseKind], dest="noise_list")
    p_bench.add_argument("--replications", type=int, default=20)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.set_defaults(func=run_bench)

    p_diag = sub.add_parser("diagnose", help="heavy-tail and curvature diagnostics")
    _add_common(p_diag)
    _add_solver_flags(p_diag)
    p_diag.add_argument("--data", type=Path, required=True)
    p_diag.set_defaults(func=run_diagnose)

    return parser


def _apply_config_file(parser, args, argv):
    """Values from --config fill in any flag not given on the command line."""
    if not args.config:
        return args
    with open(args.config, encoding="utf-8") as fh:
        conf = json.load(fh)
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in conf.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr not in given:
            setattr(args, attr, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _apply_config_file(parser, args, argv)
    if hasattr(args, "loss"):
        args.loss = Loss(args.loss)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
