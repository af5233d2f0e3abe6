"""Command-line interface: ``conespace <command> [options]``.

Every command builds a plain dictionary report; ``--format`` chooses how it
is printed.  Exit status is 0 on success, 2 for invalid input, 3 when a
numerical consistency check fails and 64 for an unknown command.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .config import TOL_ENV
from .errors import ConsistencyError, ValidationError
from .polygon import TWO_PI, as_order, equal_weights, sample_weights, validate_weights

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONSISTENCY = 3
EXIT_USAGE = 64

COMMANDS = ("angles", "block", "complex", "deform", "jacobian", "volume", "oracle")

_PI_FORM = re.compile(
    r"^(?P<num>[+-]?\d*(?:\.\d+)?)(?:/(?P<den>\d+))?\*?pi(?:/(?P<den2>\d+))?$"
)


def parse_angle(text: str) -> float:
    """Parse ``0.9``, ``pi/3``, ``2/5pi``, ``2pi/5`` or ``0.4*pi`` into radians."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_FORM.match(s)
    if m:
        num = m.group("num")
        if num in ("", "+"):
            coef = Fraction(1)
        elif num == "-":
            coef = Fraction(-1)
        else:
            coef = Fraction(num)
        for key in ("den", "den2"):
            if m.group(key):
                coef /= int(m.group(key))
        return float(coef) * math.pi
    try:
        return float(s)
    except ValueError:
        raise ValidationError(f"cannot read angle {text!r}") from None


def parse_weights(tokens, n: int | None, seed: int = 0):
    """Weights from the command line; ``rest`` fills the gap to 2 pi, ``random`` samples."""
    if not tokens:
        if n is None:
            raise ValidationError("either --n or --theta is required")
        return equal_weights(n)
    if len(tokens) == 1 and tokens[0].lower() == "random":
        if n is None:
            raise ValidationError("--theta random needs --n")
        return sample_weights(n, np.random.default_rng(seed))
    values, rest_at = [], None
    for k, tok in enumerate(tokens):
        if tok.lower() == "rest":
            if rest_at is not None:
                raise ValidationError("only one weight may be 'rest'")
            rest_at = k
            values.append(0.0)
        else:
            values.append(parse_angle(tok))
    if rest_at is not None:
        values[rest_at] = TWO_PI - (sum(values) - values[rest_at])
    if n is not None and len(values) != n:
        raise ValidationError(f"--n {n} but {len(values)} weights given")
    return validate_weights(values)


def _deg(x: float) -> float:
    return round(math.degrees(x), 4)


# --------------------------------------------------------------------------- commands


def cmd_angles(args) -> dict:
    from .polyhedron import build_block, face_relation

    top = args.n if args.n is not None else 10
    if top < 5:
        raise ValidationError("n must be at least 5")
    rows = []
    for n in range(5, top + 1):
        rel = face_relation(build_block(tuple(range(1, n + 1))), 0, 1)
        row = {"n": n, "relation": rel.kind.value, "cosine": rel.cosine}
        if rel.kind.value == "Intersecting":
            row.update(omega=rel.value, omega_deg=_deg(rel.value))
            cone = 6.0 * rel.value
            row.update(cone_angle=cone, cone_angle_deg=_deg(cone))
        elif rel.kind.value == "Ultraparallel":
            row.update(distance=rel.value)
        rows.append(row)
    return {"command": "angles", "rows": rows}


def cmd_block(args) -> dict:
    from .polyhedron import block_vertices, build_block, face_relation_table

    w = parse_weights(args.theta, args.n, args.seed)
    order = as_order(args.order) if args.order else tuple(range(1, w.n + 1))
    block = build_block(order, w)
    verts = block_vertices(block)
    return {
        "command": "block",
        "n": w.n,
        "order": list(block.order),
        "theta": w.tolist(),
        "signature": list(block.form.signature),
        "cuts": list(block.form.cuts),
        "normals": [
            {"face": a, "label": list(block.face_label(a)),
             "coords": [float(c) for c in block.face_normals[a].coords]}
            for a in range(block.n)
        ],
        "relations": face_relation_table(block),
        "vertices": {
            "finite": sum(not v.ideal for v in verts),
            "ideal": sum(v.ideal for v in verts),
            "list": [{"faces": list(v.faces), "ideal": v.ideal,
                      "coords": [float(c) for c in v.vector.coords]} for v in verts],
        },
    }


def cmd_complex(args) -> dict:
    from .gluing import build_complex, complex_to_json

    n = args.n if args.n is not None else 5
    if n < 5:
        raise ValidationError("n must be at least 5")
    cx = build_complex(n)
    out = {"command": "complex"}
    out.update(complex_to_json(cx, full=args.full))
    return out


def cmd_deform(args) -> dict:
    from .deformation import deformation_report

    w = parse_weights(args.theta, args.n, args.seed)
    if w.n not in (5, 6):
        raise ValidationError("deform supports n = 5 and n = 6")
    return {"command": "deform", **deformation_report(w)}


def cmd_jacobian(args) -> dict:
    from .deformation import jacobian

    n = args.n if args.n is not None else 6
    if n not in (5, 6):
        raise ValidationError("jacobian supports n = 5 and n = 6")
    rep = jacobian(f"phi{n}", args.h)
    return {"command": "jacobian", "n": n, **rep.to_dict()}


def cmd_volume(args) -> dict:
    from .polyhedron import block_volume_x6, ideal_octahedron_volume, lobachevsky, volume_x6

    n = args.n if args.n is not None else 6
    if n != 6:
        raise ValidationError("a closed-form volume is available only for n = 6")
    return {
        "command": "volume",
        "n": 6,
        "lobachevsky_pi_4": lobachevsky(math.pi / 4),
        "ideal_octahedron": ideal_octahedron_volume(),
        "block": block_volume_x6(),
        "blocks": 60,
        "total": volume_x6(),
    }


def cmd_oracle(args) -> dict:
    from .sc_oracle import CircleConfiguration, roundtrip_check, sc_polygon

    w = parse_weights(args.theta, args.n, args.seed)
    n = w.n
    marks = as_order(args.order) if args.order else tuple(range(1, n + 1))
    if args.config:
        angles = [parse_angle(a) for a in args.config]
        if len(angles) != n:
            raise ValidationError(f"--config needs {n} angles")
        cfg = CircleConfiguration(angles, marks)
    else:
        cfg = CircleConfiguration.regular(marks)
    poly = sc_polygon(cfg, w)
    if poly.closure_residual > 1e-8:
        raise ConsistencyError(f"integrated polygon does not close ({poly.closure_residual:.2e})")
    rt = roundtrip_check(poly.lengths, cfg.marks, w)
    return {
        "command": "oracle",
        "n": n,
        "theta": w.tolist(),
        "marks": list(cfg.marks),
        "alpha": [float(a) for a in cfg.alpha],
        "edge_lengths": [float(x) for x in poly.lengths],
        "closure_residual": poly.closure_residual,
        "exterior_angles": [float(a) for a in poly.exterior_angles],
        "roundtrip_residual": rt.residual,
    }


HANDLERS = {
    "angles": cmd_angles,
    "block": cmd_block,
    "complex": cmd_complex,
    "deform": cmd_deform,
    "jacobian": cmd_jacobian,
    "volume": cmd_volume,
    "oracle": cmd_oracle,
}


# --------------------------------------------------------------------------- output


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    elif isinstance(value, list):
        out.append((prefix, " ".join(_scalar(v) for v in value)))
    else:
        out.append((prefix, _scalar(value)))


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        rows = report.get("rows")
        if rows:
            keys = []
            for r in rows:
                for k in r:
                    if k not in keys:
                        keys.append(k)
            writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow({k: _scalar(r.get(k, "")) for k in keys})
        else:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["key", "value"])
            pairs: list = []
            _flatten("", report, pairs)
            writer.writerows(pairs)
        return buf.getvalue()
    pairs = []
    if report.get("rows"):
        lines = [f"{report['command']}:"]
        for r in report["rows"]:
            lines.append("  " + "  ".join(f"{k}={_scalar(v)}" for k, v in r.items()))
        return "\n".join(lines) + "\n"
    _flatten("", report, pairs)
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


# --------------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        code = EXIT_USAGE if message.startswith("argument command: invalid choice") else EXIT_VALIDATION
        self.exit(code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of marked points")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--tol", type=float,
                        help=f"classification tolerance (default 1e-9 or ${TOL_ENV})")
    common.add_argument("--seed", type=int, default=0, help="seed for '--theta random'")

    parser = _Parser(prog="conespace", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="command")
    sub.required = True

    sub.add_parser("angles", parents=[common], help="equal-weight dihedral and cone angles")

    p = sub.add_parser("block", parents=[common], help="one polyhedral block")
    p.add_argument("--theta", nargs="+", help="weights, e.g. 2/5pi or 0.9 ... rest")
    p.add_argument("--order", help="explicit circular order, e.g. 13245")

    p = sub.add_parser("complex", parents=[common], help="gluing complex")
    p.add_argument("--full", action="store_true", help="include pairings and links")

    p = sub.add_parser("deform", parents=[common], help="deformation map values")
    p.add_argument("--theta", nargs="+")

    p = sub.add_parser("jacobian", parents=[common], help="finite-difference Jacobian")
    p.add_argument("--h", type=float, default=1e-5)

    sub.add_parser("volume", parents=[common], help="volume of the six-point space")

    p = sub.add_parser("oracle", parents=[common], help="Schwarz-Christoffel check")
    p.add_argument("--config", nargs="+", help="prevertex angles on the circle")
    p.add_argument("--theta", nargs="+")
    p.add_argument("--order", help="marks in circle order")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    saved = os.environ.get(TOL_ENV)
    if args.tol is not None:
        os.environ[TOL_ENV] = repr(args.tol)
    try:
        report = HANDLERS[args.command](args)
        stdout.write(render(report, args.format))
        return EXIT_OK
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except ConsistencyError as exc:
        stderr.write(f"numeric consistency failure: {exc}\n")
        return EXIT_CONSISTENCY
    finally:
        if args.tol is not None:
            if saved is None:
                os.environ.pop(TOL_ENV, None)
            else:
                os.environ[TOL_ENV] = saved


def main() -> None:
    sys.exit(run())


def load_schema(command: str) -> dict:
    """The JSON schema shipped for a command's ``--format json`` output."""
    from importlib import resources

    if command not in COMMANDS:
        raise ValidationError(f"no schema for {command!r}")
    text = resources.files("conespace").joinpath("schemas", f"{command}.schema.json").read_text()
    return json.loads(text)
