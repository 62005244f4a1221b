"""Command-line interface.

Every command writes CSV or JSON to standard output or to ``--out``. Exit
codes are 0 on success, 2 for invalid parameters and 3 when an iteration
fails to converge.
"""

from __future__ import annotations

import argparse
import sys
import timeit
from typing import Any, Callable, Sequence

import numpy as np

from fracquad import io as fio
from fracquad.errors import ConvergenceError, DomainError
from fracquad.fde import solve_ivp
from fracquad.fracops import caputo_deriv_left, error_metric, frac_integral_left
from fracquad.fvp import fvp_march
from fracquad.jacobi import JacobiParams
from fracquad.problems import (
    FVP_PROBLEMS,
    IVP_PROBLEMS,
    TABLE1_POINTS,
    TABLE2_POINTS,
    caputo_power_exact,
    sin_integral_exact,
)
from fracquad.quadrature import Method, QuadratureRule, rule_eigen, rule_newton

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3

TABLE1_N = (5, 6, 7, 8, 16)
TABLE1_ALPHAS = (0.25, 0.5, 0.75)
TABLE2_N = (2, 3, 4, 5, 6, 7)
BENCH_N = (1000, 2000, 4000, 8000)


# {{{ table and benchmark commands


def cmd_table1(
    n_values: Sequence[int] = TABLE1_N, alphas: Sequence[float] = TABLE1_ALPHAS
) -> list[list[float]]:
    """Errors of the fractional integral of ``sin`` over ``k pi / 8``, one row per alpha."""
    rows = []
    for alpha in alphas:
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"table1 needs alpha in (0, 1), got alpha={alpha}")

        exact = sin_integral_exact(alpha, TABLE1_POINTS)
        row = [alpha]
        for n in n_values:
            approx = frac_integral_left(np.sin, alpha, TABLE1_POINTS, n)
            row.append(error_metric(exact, approx))
        rows.append(row)

    return rows


def cmd_table2(
    n_values: Sequence[int] = TABLE2_N, alpha: float = 0.5
) -> list[list[float]]:
    """Errors of the Caputo derivative of ``t^4`` over ``k / 10``, one row per n."""
    exact = caputo_power_exact(alpha, 4.0, TABLE2_POINTS)

    rows = []
    for n in n_values:
        if n < 2:
            raise DomainError(f"table2 needs n >= 2, got n={n}")
        approx = caputo_deriv_left(lambda t: 4.0 * t**3, alpha, TABLE2_POINTS, n)
        rows.append([n, error_metric(exact, approx)])

    return rows


def _median_time(fn: Callable[[], Any], repeats: int) -> tuple[float, Any]:
    # timeit switches the garbage collector off while timing
    result = fn()
    times = timeit.repeat(fn, repeat=repeats, number=1)
    return float(np.median(times)), result


def cmd_bench(
    n_list: Sequence[int] = BENCH_N, alpha: float = 0.5, repeats: int = 5
) -> dict[str, Any]:
    """Timings and node and weight discrepancies of both rule constructions."""
    if list(n_list) != sorted(n_list):
        raise DomainError("bench sizes must be given in ascending order")
    if repeats < 1:
        raise DomainError(f"repeats must be >= 1, got repeats={repeats}")

    params = JacobiParams.fractional(alpha)
    rows = []
    for n in n_list:
        t_eigen, r_eigen = _median_time(lambda: rule_eigen(params, n), repeats)
        t_newton, r_newton = _median_time(lambda: rule_newton(alpha, n), repeats)
        rows.append({
            "n": int(n),
            "eigen_time": t_eigen,
            "newton_time": t_newton,
            "newton_method": r_newton.method.value,
            "node_delta": float(np.max(np.abs(r_eigen.nodes - r_newton.nodes))),
            "weight_delta": float(np.max(np.abs(r_eigen.weights - r_newton.weights))),
        })

    by_n = {row["n"]: row for row in rows}
    ratios = []
    for n in by_n:
        if 2 * n in by_n:
            ratios.append({
                "n": n,
                "eigen_ratio": by_n[2 * n]["eigen_time"] / by_n[n]["eigen_time"],
                "newton_ratio": by_n[2 * n]["newton_time"] / by_n[n]["newton_time"],
            })

    return {"alpha": alpha, "repeats": repeats, "rows": rows, "ratios": ratios}


# }}}


# {{{ functions


def _builtin(name: str, coeffs: Sequence[float] | None) -> tuple[Callable, Callable]:
    """A built-in function and its derivative."""
    if name == "poly":
        if not coeffs:
            raise DomainError("--func poly needs --coeffs (ascending powers)")
        p = np.polynomial.Polynomial(coeffs)
        return p, p.deriv()

    table: dict[str, tuple[Callable, Callable]] = {
        "sin": (np.sin, np.cos),
        "cos": (np.cos, lambda t: -np.sin(t)),
        "exp": (np.exp, np.exp),
        "one": (np.ones_like, np.zeros_like),
    }
    return table[name]


# }}}


# {{{ argument parsing


def _add_common(p: argparse.ArgumentParser, *, alpha: float | None = None) -> None:
    p.add_argument("--alpha", type=float, default=alpha, required=alpha is None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracquad",
        description="Fractional Gauss-Jacobi quadrature and fractional solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rule", help="nodes and weights of a fractional rule")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=[m.value for m in Method], default="newton")

    for name, what in [("fracint", "left fractional integral"),
                       ("fracderiv", "left Caputo derivative")]:
        p = sub.add_parser(name, help=what)
        _add_common(p)
        p.add_argument("--x", type=float, nargs="+", required=True)
        p.add_argument("--quad-n", type=int, default=16)
        p.add_argument("--func", choices=["sin", "cos", "exp", "one", "poly"],
                       default="sin")
        p.add_argument("--coeffs", type=float, nargs="+", default=None,
                       help="polynomial coefficients in ascending powers")
        p.add_argument("--method", choices=[m.value for m in Method], default="newton")

    p = sub.add_parser("solve-ivp", help="fractional initial-value problem")
    _add_common(p, alpha=1.5)
    p.add_argument("--problem", choices=sorted(IVP_PROBLEMS), default="ex5.3")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--quad-n", type=int, default=16)
    p.add_argument("--curve", action="store_true",
                   help="write t, y_reference, y_approx instead of the full grid")

    p = sub.add_parser("solve-fvp", help="fractional variational problem")
    _add_common(p, alpha=1.5)
    p.add_argument("--problem", choices=sorted(FVP_PROBLEMS), default="ex6.2")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--quad-n", type=int, default=16)
    p.add_argument("--curve", action="store_true",
                   help="write t, y_reference, y_approx instead of the full grid")

    p = sub.add_parser("table1", help="errors of the fractional integral of sin")
    p.add_argument("--n", type=int, nargs="+", default=list(TABLE1_N))
    p.add_argument("--alpha", type=float, nargs="+", default=list(TABLE1_ALPHAS))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)

    p = sub.add_parser("table2", help="errors of the Caputo derivative of t^4")
    p.add_argument("--n", type=int, nargs="+", default=list(TABLE2_N))
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)

    p = sub.add_parser("bench", help="timings of both rule constructions")
    p.add_argument("--n", type=int, nargs="+", default=list(BENCH_N))
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out", default=None)

    return parser


# }}}


# {{{ command dispatch


def _rule_output(rule: QuadratureRule, fmt: str) -> str:
    if fmt == "json":
        return fio.to_json(rule.to_dict())
    return fio.to_csv(
        ["k", "node", "weight"],
        zip(range(1, rule.n + 1), rule.nodes, rule.weights),
    )


def _run(args: argparse.Namespace) -> str:
    cmd = args.command

    if cmd == "rule":
        if args.method == "eigen":
            rule = rule_eigen(JacobiParams.fractional(args.alpha), args.n)
        else:
            rule = rule_newton(args.alpha, args.n)
        return _rule_output(rule, args.format)

    if cmd in ("fracint", "fracderiv"):
        f, df = _builtin(args.func, args.coeffs)
        x = np.asarray(args.x, dtype=float)
        if cmd == "fracint":
            values = frac_integral_left(f, args.alpha, x, args.quad_n, method=args.method)
        else:
            values = caputo_deriv_left(df, args.alpha, x, args.quad_n, method=args.method)
        values = np.atleast_1d(values)
        if args.format == "json":
            return fio.to_json({
                "alpha": args.alpha, "n_quad": args.quad_n, "func": args.func,
                "x": x, "value": values,
            })
        return fio.to_csv(["x", "value"], zip(x, values))

    if cmd == "solve-ivp":
        bench = IVP_PROBLEMS[args.problem](args.alpha)
        grid = solve_ivp(bench.problem, args.steps, args.quad_n)
        reference = bench.reference(grid.times) if bench.reference else None
        if args.curve:
            return fio.curve_to_csv(grid.times, reference, grid.corrected)
        if args.format == "json":
            report: dict[str, Any] = {
                "problem": bench.name, "alpha": args.alpha, "n_steps": args.steps,
                "N": args.quad_n, "max_residual": float(np.max(grid.residuals)),
            }
            if reference is not None:
                report["max_error"] = float(np.max(np.abs(grid.corrected - reference)))
            return fio.to_json(report)
        return fio.grid_to_csv(grid)

    if cmd == "solve-fvp":
        bench = FVP_PROBLEMS[args.problem](args.alpha)
        solution = fvp_march(bench.problem, args.steps, args.quad_n)
        grid = solution.grid
        if args.curve:
            return fio.curve_to_csv(grid.times, bench.reference(grid.times), grid.corrected)
        if args.format == "json":
            return fio.to_json({
                "alpha": args.alpha,
                "n_steps": args.steps,
                "N": args.quad_n,
                "fixed_point_residual": solution.fixed_point_residual,
                "functional_value": solution.functional_value,
                "bc_error": list(solution.bc_error),
            })
        return fio.grid_to_csv(grid)

    if cmd == "table1":
        rows = cmd_table1(args.n, args.alpha)
        header = ["alpha"] + [f"n={n}" for n in args.n]
        if args.format == "json":
            return fio.to_json({"n": args.n, "rows": [dict(zip(header, r)) for r in rows]})
        return fio.to_csv(header, rows)

    if cmd == "table2":
        rows = cmd_table2(args.n, args.alpha)
        if args.format == "json":
            return fio.to_json({"alpha": args.alpha,
                                "rows": [{"n": n, "error": e} for n, e in rows]})
        return fio.to_csv(["n", "error"], rows)

    if cmd == "bench":
        return fio.to_json(cmd_bench(args.n, args.alpha, args.repeats))

    raise AssertionError(f"unhandled command {cmd}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        text = _run(args)
    except DomainError as exc:
        print(f"fracquad {args.command}: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"fracquad {args.command}: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE

    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as outf:
            outf.write(text)

    return EXIT_OK


# }}}
