"""Command-line front end.

Four subcommands cover the analysis loop: ``list`` shows the built-in
examples, ``describe`` prints (or serializes) their operators, ``spectrum``
samples an expression's spectrum over the dual torus and reports the spectral
radius, and ``verify`` cross-checks a loaded operator set against the dense
reference implementation.

Operator files are JSON: ``dim``, a map of named operators (each with its
``lattice`` basis, ``domain_se``/``codomain_se`` points as exact fraction
strings, and a list of ``{offset, matrix}`` multipliers with entries written
as ``[re, im]`` pairs), plus an optional default ``expr`` and ``resolution``.
Exit codes: 0 success, 1 schema or usage error, 2 incompatible or failing
operators, 3 expression error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .crystal import Lattice, StructureElement, sample_dual_torus
from .expr import ExprSyntaxError, parse
from .gallery import build, entry_names
from .operator import MultiplicationOperator
from .oracle import (
    assemble_dense,
    check_translation_invariance,
    dense_spectrum,
    spectrum_distance,
    wave_basis,
)
from .symbol import SpectrumResult, compute_spectrum, eigenvalues, symbol_at

EXIT_SCHEMA = 1
EXIT_INCOMPATIBLE = 2
EXIT_EXPRESSION = 3

INVARIANCE_TOL = 1e-10
SPECTRUM_TOL = 1e-8
GRAM_TOL = 1e-12


class CliError(Exception):
    exit_code = EXIT_SCHEMA


class SchemaError(CliError):
    exit_code = EXIT_SCHEMA


class IncompatibilityError(CliError):
    exit_code = EXIT_INCOMPATIBLE


class ExpressionError(CliError):
    exit_code = EXIT_EXPRESSION


# ---------------------------------------------------------------------------
# operator file schema


def _fraction(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{where}: {value!r} is not a valid fraction") from None


def _structure_element(raw, dim: int, where: str) -> StructureElement:
    if not isinstance(raw, list) or not raw:
        raise SchemaError(f"{where}: expected a nonempty list of points")
    points = []
    for i, point in enumerate(raw):
        if not isinstance(point, list) or len(point) != dim:
            raise SchemaError(f"{where}[{i}]: expected a list of {dim} fractions")
        points.append(tuple(_fraction(c, f"{where}[{i}]") for c in point))
    return StructureElement(points)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _complex_entry(value, where: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise SchemaError(f"{where}: [re, im] pairs have exactly two entries")
        return complex(_number(value[0], where), _number(value[1], where))
    return complex(_number(value, where))


def _require_keys(raw: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(raw) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(raw)
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")


def _operator_from_json(raw, dim: int, where: str) -> MultiplicationOperator:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object")
    _require_keys(
        raw,
        {"lattice", "domain_se", "codomain_se", "multipliers"},
        {"lattice", "domain_se", "codomain_se", "multipliers"},
        where,
    )
    rows = raw["lattice"]
    if (
        not isinstance(rows, list)
        or len(rows) != dim
        or any(not isinstance(r, list) or len(r) != dim for r in rows)
    ):
        raise SchemaError(f"{where}.lattice: expected a {dim}x{dim} matrix")
    basis = [[_number(x, f"{where}.lattice") for x in r] for r in rows]
    try:
        lattice = Lattice(np.array(basis))
    except ValueError as exc:
        raise SchemaError(f"{where}.lattice: {exc}") from None
    domain = _structure_element(raw["domain_se"], dim, f"{where}.domain_se")
    codomain = _structure_element(raw["codomain_se"], dim, f"{where}.codomain_se")
    if not isinstance(raw["multipliers"], list):
        raise SchemaError(f"{where}.multipliers: expected a list")
    multipliers: dict[tuple[int, ...], list[list[complex]]] = {}
    for i, item in enumerate(raw["multipliers"]):
        spot = f"{where}.multipliers[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(f"{spot}: expected an object")
        _require_keys(item, {"offset", "matrix"}, {"offset", "matrix"}, spot)
        offset = item["offset"]
        if (
            not isinstance(offset, list)
            or len(offset) != dim
            or any(isinstance(x, bool) or not isinstance(x, int) for x in offset)
        ):
            raise SchemaError(f"{spot}.offset: expected {dim} integers")
        key = tuple(offset)
        if key in multipliers:
            raise SchemaError(f"{spot}: duplicate offset {key}")
        matrix = item["matrix"]
        if (
            not isinstance(matrix, list)
            or len(matrix) != len(codomain)
            or any(not isinstance(r, list) or len(r) != len(domain) for r in matrix)
        ):
            raise SchemaError(
                f"{spot}.matrix: expected {len(codomain)} rows of {len(domain)} entries"
            )
        multipliers[key] = [
            [_complex_entry(x, f"{spot}.matrix") for x in r] for r in matrix
        ]
    try:
        return MultiplicationOperator(lattice, domain, codomain, multipliers)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _resolution_matrix(value, dim: int, where: str) -> np.ndarray:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: expected an integer or an integer matrix")
    if isinstance(value, int):
        if value == 0:
            raise SchemaError(f"{where}: resolution 0 is singular")
        return value * np.eye(dim, dtype=int)
    if (
        isinstance(value, list)
        and len(value) == dim
        and all(
            isinstance(r, list)
            and len(r) == dim
            and all(not isinstance(x, bool) and isinstance(x, int) for x in r)
            for r in value
        )
    ):
        m = np.array(value, dtype=int)
        if round(abs(np.linalg.det(m))) == 0:
            raise SchemaError(f"{where}: resolution matrix is singular")
        return m
    raise SchemaError(f"{where}: expected an integer or a {dim}x{dim} integer matrix")


def _parse_resolution_flag(text: str, dim: int) -> np.ndarray:
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            value = json.loads(stripped)
        except json.JSONDecodeError:
            raise SchemaError(f"--resolution: {text!r} is not a JSON matrix") from None
        return _resolution_matrix(value, dim, "--resolution")
    try:
        if "," in stripped:
            diag = [int(p) for p in stripped.split(",")]
            if len(diag) != dim:
                raise SchemaError(f"--resolution: expected {dim} diagonal entries")
            value = [[d if i == j else 0 for j in range(dim)] for i, d in enumerate(diag)]
            return _resolution_matrix(value, dim, "--resolution")
        return _resolution_matrix(int(stripped), dim, "--resolution")
    except ValueError:
        raise SchemaError(
            f"--resolution: {text!r} is not an integer, 'a,b' diagonal, or JSON matrix"
        ) from None


@dataclass
class Bundle:
    """A named operator set plus its default analysis inputs."""

    name: str
    dim: int
    operators: dict[str, MultiplicationOperator]
    expr: str | None
    resolution: np.ndarray | None
    parameters: dict[str, float] = field(default_factory=dict)


def load_operator_file(path: str) -> Bundle:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: top level must be an object")
    _require_keys(raw, {"dim", "operators", "expr", "resolution"}, {"dim", "operators"}, path)
    dim = raw["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{path}: dim must be a positive integer")
    if not isinstance(raw["operators"], dict) or not raw["operators"]:
        raise SchemaError(f"{path}: operators must be a nonempty object")
    operators = {}
    for name, spec in raw["operators"].items():
        if not name or not isinstance(name, str):
            raise SchemaError(f"{path}: operator names must be nonempty strings")
        operators[name] = _operator_from_json(spec, dim, f"operators.{name}")
    expr = raw.get("expr")
    if expr is not None and not isinstance(expr, str):
        raise SchemaError(f"{path}: expr must be a string")
    resolution = raw.get("resolution")
    if resolution is not None:
        resolution = _resolution_matrix(resolution, dim, f"{path}: resolution")
    return Bundle(path, dim, operators, expr, resolution)


def _operator_to_json(op: MultiplicationOperator) -> dict:
    return {
        "lattice": [[float(x) for x in row] for row in op.lattice.basis],
        "domain_se": [[str(c) for c in p] for p in op.domain_se],
        "codomain_se": [[str(c) for c in p] for p in op.codomain_se],
        "multipliers": [
            {
                "offset": list(off),
                "matrix": [
                    [[x.real, x.imag] for x in row] for row in op.multiplier(off)
                ],
            }
            for off in op.offsets()
        ],
    }


def bundle_to_json(bundle: Bundle, operators: dict[str, MultiplicationOperator]) -> dict:
    payload: dict = {
        "dim": bundle.dim,
        "operators": {name: _operator_to_json(operators[name]) for name in sorted(operators)},
    }
    if bundle.expr is not None:
        try:
            keep = parse(bundle.expr).identifiers() <= set(operators)
        except ExprSyntaxError:
            keep = True
        if keep:
            payload["expr"] = bundle.expr
    if bundle.resolution is not None:
        payload["resolution"] = [[int(x) for x in row] for row in bundle.resolution]
    return payload


# ---------------------------------------------------------------------------
# shared flag handling


def _parse_params(items) -> dict[str, float]:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise SchemaError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise SchemaError(f"--param {key}: {value!r} is not a number") from None
    return params


def _load_bundle(args) -> Bundle:
    params = _parse_params(getattr(args, "param", None))
    if args.example is not None:
        try:
            entry = build(args.example, **params)
        except TypeError:
            raise SchemaError(
                f"'{args.example}' does not take parameters {sorted(params)}"
            ) from None
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
        dim = next(iter(entry.operators.values())).dim
        return Bundle(
            entry.name,
            dim,
            dict(entry.operators),
            entry.expression,
            _resolution_matrix(entry.resolution, dim, "resolution"),
            dict(entry.parameters),
        )
    if params:
        raise SchemaError("--param only applies to gallery examples")
    return load_operator_file(args.input)


# ---------------------------------------------------------------------------
# spectrum output


def _csv_lines(result: SpectrumResult) -> list[str]:
    dim = result.lattice.dim
    header = (
        [f"k_frac_{i + 1}" for i in range(dim)]
        + [f"k_phys_{i + 1}" for i in range(dim)]
        + ["eig_index", "re", "im", "abs"]
    )
    lines = [",".join(header)]
    for rec in result.records:
        prefix = [str(f) for f in rec.k_frac] + [repr(x) for x in rec.k_phys]
        for idx, e in enumerate(rec.eigenvalues):
            lines.append(
                ",".join(prefix + [str(idx), repr(e.real), repr(e.imag), repr(abs(e))])
            )
    return lines


def _json_payload(result: SpectrumResult) -> dict:
    return {
        "expression": result.expression,
        "lattice": [[float(x) for x in row] for row in result.lattice.basis],
        "resolution": [[int(x) for x in row] for row in result.resolution],
        "rho_max": result.rho,
        "records": [
            {
                "k_frac": [str(f) for f in rec.k_frac],
                "k_phys": list(rec.k_phys),
                "eigenvalues": [[e.real, e.imag] for e in rec.eigenvalues],
            }
            for rec in result.records
        ],
    }


def _gnuplot_script(csv_path: str, dim: int, title: str) -> str:
    re_col = 2 * dim + 2
    im_col = 2 * dim + 3
    return (
        f"# eigenvalues of {title} in the complex plane\n"
        f"# run with: gnuplot -p <this file>\n"
        'set datafile separator ","\n'
        "set size ratio -1\n"
        "set key off\n"
        'set xlabel "Re"\n'
        'set ylabel "Im"\n'
        "set grid\n"
        "set parametric\n"
        "set trange [0:2*pi]\n"
        'plot cos(t),sin(t) with lines lc rgb "gray60", \\\n'
        f'     "{csv_path}" every ::1 using {re_col}:{im_col}'
        ' with points pt 7 ps 0.5 lc rgb "navy"\n'
    )


def cmd_spectrum(args) -> int:
    bundle = _load_bundle(args)
    expr_text = args.expr if args.expr is not None else bundle.expr
    if not expr_text:
        raise SchemaError("no expression given: pass --expr or define one in the file")
    resolution = bundle.resolution
    if args.resolution is not None:
        resolution = _parse_resolution_flag(args.resolution, bundle.dim)
    if resolution is None:
        raise SchemaError("no resolution given: pass --resolution or define one in the file")
    if args.emit_plot and not args.output:
        raise SchemaError("--emit-plot needs --output, the script reads the written CSV")
    if args.emit_plot and args.format != "csv":
        raise SchemaError("--emit-plot only works with --format csv")

    try:
        ast = parse(expr_text)
    except ExprSyntaxError as exc:
        raise ExpressionError(f"bad expression: {exc}") from None
    missing = sorted(ast.identifiers() - set(bundle.operators))
    if missing:
        raise ExpressionError(
            f"expression references unknown operators: {', '.join(missing)}"
        )
    env = {name: bundle.operators[name] for name in sorted(ast.identifiers())}
    try:
        result = compute_spectrum(ast, env, resolution, threads=args.threads)
    except ValueError as exc:
        message = str(exc)
        if "unbound identifier" in message or "bare" in message:
            raise ExpressionError(message) from None
        raise IncompatibilityError(message) from None

    if args.format == "json":
        text = json.dumps(_json_payload(result), indent=2) + "\n"
    else:
        text = "\n".join(_csv_lines(result)) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.emit_plot:
        Path(args.emit_plot).write_text(
            _gnuplot_script(args.output, bundle.dim, bundle.name), encoding="utf-8"
        )
    print(f"rho_max = {result.rho:.8f}")
    return 0


# ---------------------------------------------------------------------------
# list / describe


def cmd_list(args) -> int:
    for name in entry_names():
        entry = build(name)
        params = ", ".join(f"{k}={v:g}" for k, v in sorted(entry.parameters.items()))
        print(f"{name:14s} {params:16s} {entry.notes}")
    return 0


def _fmt_entry(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:g}"
    if z.real == 0:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


def _matrix_block(matrix, indent: str) -> list[str]:
    cells = [[_fmt_entry(x) for x in row] for row in matrix]
    width = max(len(c) for row in cells for c in row)
    return [
        indent + "[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells
    ]


def _se_text(se: StructureElement) -> str:
    return ", ".join("(" + ", ".join(str(c) for c in p) + ")" for p in se)


def _describe_text(bundle: Bundle, operators: dict[str, MultiplicationOperator]) -> str:
    lines = [bundle.name]
    if bundle.parameters:
        lines[0] += "  (" + ", ".join(
            f"{k}={v:g}" for k, v in sorted(bundle.parameters.items())
        ) + ")"
    if bundle.expr:
        lines.append(f"expression: {bundle.expr}")
    if bundle.resolution is not None:
        diag = np.diag(bundle.resolution)
        if np.array_equal(bundle.resolution, diag[0] * np.eye(bundle.dim, dtype=int)):
            lines.append(f"default resolution: {diag[0]}")
        else:
            lines.append(f"default resolution: {bundle.resolution.tolist()}")
    for name in sorted(operators):
        op = operators[name]
        lines.append("")
        lines.append(f"operator {name}  ({op.shape[0]}x{op.shape[1]} multipliers)")
        lines.append("  lattice basis (columns are primitive vectors):")
        lines.extend(_matrix_block(op.lattice.basis, "    "))
        lines.append(f"  domain structure element:   {_se_text(op.domain_se)}")
        lines.append(f"  codomain structure element: {_se_text(op.codomain_se)}")
        for off in op.offsets():
            lines.append(f"  multiplier at offset ({', '.join(str(x) for x in off)}):")
            lines.extend(_matrix_block(op.multiplier(off), "    "))
    return "\n".join(lines) + "\n"


def cmd_describe(args) -> int:
    bundle = _load_bundle(args)
    operators = bundle.operators
    if args.operator is not None:
        if args.operator not in operators:
            known = ", ".join(sorted(operators))
            raise SchemaError(f"unknown operator '{args.operator}' (has: {known})")
        operators = {args.operator: operators[args.operator]}
    if args.format == "json":
        text = json.dumps(bundle_to_json(bundle, operators), indent=2) + "\n"
    else:
        text = _describe_text(bundle, operators)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    bundle = _load_bundle(args)
    if args.resolution is not None:
        resolution = _parse_resolution_flag(args.resolution, bundle.dim)
    else:
        resolution = 3 * np.eye(bundle.dim, dtype=int)

    checks: list[tuple[str, float, float]] = []
    for name in sorted(bundle.operators):
        op = bundle.operators[name]
        checks.append(
            (
                f"translation invariance  {name}",
                check_translation_invariance(op, resolution),
                INVARIANCE_TOL,
            )
        )
    for name in sorted(bundle.operators):
        op = bundle.operators[name]
        if op.domain_se != op.codomain_se:
            continue
        dense = dense_spectrum(assemble_dense(op, resolution))
        union: list[complex] = []
        for sample in sample_dual_torus(op.lattice, resolution):
            union.extend(eigenvalues(symbol_at(op, sample).matrix))
        checks.append(
            (f"symbol vs dense spectrum  {name}", spectrum_distance(union, dense), SPECTRUM_TOL)
        )
    seen: set = set()
    for name in sorted(bundle.operators):
        op = bundle.operators[name]
        for side, se in (("domain", op.domain_se), ("codomain", op.codomain_se)):
            key = (op.lattice.basis.tobytes(), se.points)
            if key in seen:
                continue
            seen.add(key)
            vecs = wave_basis(op.lattice, resolution, se)
            w = np.stack(vecs, axis=1)
            cells = len(vecs) // len(se)
            gram = w.conj().T @ w / cells
            residual = float(np.abs(gram - np.eye(len(vecs))).max())
            checks.append((f"wave basis Gram  {name}/{side}", residual, GRAM_TOL))

    failed = False
    for label, residual, tol in checks:
        ok = residual < tol
        failed = failed or not ok
        print(f"{label:44s} {residual:10.3e}  (tol {tol:.0e})  {'pass' if ok else 'FAIL'}")
    if failed:
        print("verification failed", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_source_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--example", help="name of a built-in example (see 'list')")
    group.add_argument("--input", help="path to an operator file (JSON)")
    sub.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="override an example parameter (repeatable)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stencilfa",
        description="Fourier analysis of translationally invariant stencil operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser(
        "spectrum", help="sample an expression's spectrum over the dual torus"
    )
    _add_source_flags(spectrum)
    spectrum.add_argument(
        "--resolution",
        help="N for N*identity, 'a,b' for a diagonal, or a JSON matrix like [[2,3],[2,-2]]",
    )
    spectrum.add_argument("--expr", help="expression to analyze (defaults to the bundled one)")
    spectrum.add_argument("--output", help="write the table to this file instead of stdout")
    spectrum.add_argument("--format", choices=("csv", "json"), default="csv")
    spectrum.add_argument(
        "--emit-plot",
        dest="emit_plot",
        metavar="PATH",
        help="also write a gnuplot script that plots the CSV",
    )
    spectrum.add_argument("--threads", type=int, help="evaluate frequency samples in parallel")
    spectrum.set_defaults(func=cmd_spectrum)

    listing = sub.add_parser("list", help="list the built-in examples")
    listing.set_defaults(func=cmd_list)

    describe = sub.add_parser(
        "describe", help="print operators, structure elements, and multiplier tables"
    )
    _add_source_flags(describe)
    describe.add_argument("--operator", help="describe only this named operator")
    describe.add_argument("--format", choices=("text", "json"), default="text")
    describe.add_argument("--output", help="write to this file instead of stdout")
    describe.set_defaults(func=cmd_describe)

    verify = sub.add_parser(
        "verify", help="cross-check operators against the dense reference implementation"
    )
    _add_source_flags(verify)
    verify.add_argument("--resolution", help="torus resolution for the checks (default 3)")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ExprSyntaxError as exc:
        print(f"error: bad expression: {exc}", file=sys.stderr)
        return EXIT_EXPRESSION


if __name__ == "__main__":
    sys.exit(main())
