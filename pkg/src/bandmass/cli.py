"""Command-line front end.

    bandmass validate graphene
    bandmass bands stanene --grid 64 --format csv --out bands.csv
    bandmass effmass graphene --edge bottom
    bandmass metric lattice:2 --jmax 2 --kmax 2

SOURCE is a built-in fixture (``lattice:d``, ``graphene``, ``stanene``,
``kagome``) or a path to a JSON graph document.  Exit codes: 0 success,
2 validation failure, 3 numerical refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .effmass import (
    band_edge_bound,
    bottom_bounds,
    directions,
    effective_matrix,
    mass_tensor,
    mu_finite_difference,
    random_directions,
    trace_bounds,
)
from .errors import RefusalError
from .fixtures import fixture_document, is_fixture
from .graph import GraphError, bridges, cycle_kernel_basis, parse_graph, spanning_tree, tree_normalized
from .metric import metric_band_function, metric_bottom_bounds, metric_effective_form, metric_spectrum
from .spectrum import band_structure, bottom_edge, write_samples_csv

EXIT_OK, EXIT_INVALID, EXIT_REFUSED = 0, 2, 3


def load_source(source: str, normalize: bool = False):
    if is_fixture(source):
        text = fixture_document(source)
    else:
        path = Path(source)
        if not path.exists():
            raise GraphError(f"{source}: no such fixture or file")
        text = path.read_text()
    try:
        g = parse_graph(text)
    except GraphError as exc:
        raise GraphError(f"{source}: {exc}") from None
    return tree_normalized(g) if normalize else g


def _clean(obj):
    """JSON-ready copy: numpy to builtins, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    g = load_source(args.source, args.normalize_indices)
    b = bridges(g)
    report = {
        "source": args.source,
        "dimension": g.dim,
        "nu": g.nv,
        "nu_edges": g.ne,
        "degrees": {v: int(k) for v, k in zip(g.vertices, g.degrees)},
        "total_degree": g.total_degree,
        "bridges": b.count,
        "Lambda0": b.lambda0,
        "Lambda1": b.lambda1,
        "Lambda0_floor": b.lambda0_floor,
        "Lambda1_ceiling": b.lambda1_ceiling,
        "Lambda_bracket_holds": bool(b.lambda0_floor <= b.lambda0 + 1e-12 and b.lambda1 <= b.lambda1_ceiling + 1e-12),
        "spanning_tree": [int(k) for k in spanning_tree(g)],
        "cycle_rank": int(cycle_kernel_basis(g).shape[0]),
        "connected": True,
    }
    _emit(dump_json(report), args.out)
    return EXIT_OK


def _bands_summary(bs) -> dict:
    return {
        "flavor": bs.flavor,
        "grid": bs.n_grid,
        "bands": [{"n": n, "interval": list(iv)} for n, iv in enumerate(bs.bands, start=1)],
        "gaps": [list(gp) for gp in bs.gaps],
        "flat_bands": [{"n": n, "value": v} for n, v in bs.flat_bands],
        "edges": [_edge_dict(e) for _, e in sorted(bs.edges.items())],
    }


def _edge_dict(e) -> dict:
    return {
        "band": e.band,
        "which": e.which,
        "theta0": e.theta0,
        "partners": list(e.partners),
        "value": e.value,
        "simple": e.simple,
        "rho": e.rho,
        "provenance": e.provenance,
    }


def cmd_bands(args) -> int:
    g = load_source(args.source, args.normalize_indices)
    bs = band_structure(g, args.grid, args.flavor)
    if args.format == "csv":
        buf = io.StringIO()
        write_samples_csv(bs, buf)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(dump_json(_bands_summary(bs)), args.out)
    return EXIT_OK


_EDGE_RE = re.compile(r"band(\d+)-(min|max)$")


def _parse_edge(spec: str):
    if spec in ("bottom", "all"):
        return spec
    m = _EDGE_RE.match(spec)
    if not m:
        raise argparse.ArgumentTypeError(f"bad edge {spec!r}; use bottom, all or bandN-min/bandN-max")
    return int(m.group(1)), m.group(2)


def _edge_report(g, edge, flavor, sweep) -> dict:
    form = effective_matrix(g, edge.theta0, edge.band, flavor)
    report = _edge_dict(edge)
    report["method"] = "perturbative"
    report["M"] = form.matrix
    report["M_eigenvalues"] = form.eigenvalues
    try:
        report["mass_eigenvalues"] = mass_tensor(form).eigenvalues
    except RefusalError as exc:
        report["mass_eigenvalues"] = None
        report["mass_refusal"] = str(exc)
    probes = random_directions(g.dim, 16, seed=0)
    fd = max(abs(mu_finite_difference(g, edge.theta0, edge.band, w, flavor=flavor) - form(w)) for w in probes)
    oracle = {"finite-difference": fd}
    bounds = band_edge_bound(g, edge, flavor, sweep)
    if edge.band == 1 and edge.which == "min" and not np.any(edge.theta0):
        exact = effective_matrix(g, edge.theta0, 1, flavor, "bottom-exact")
        oracle["bottom-exact"] = float(np.max(np.abs(exact.matrix - form.matrix)))
        bounds = bounds.merge(bottom_bounds(g, flavor, sweep)).merge(trace_bounds(g, form, flavor))
    report["oracle_deviation"] = oracle
    report["bounds"] = bounds.as_dict()
    return report


def cmd_effmass(args) -> int:
    g = load_source(args.source, args.normalize_indices)
    sweep = directions(g.dim, args.sweep)
    flavor = args.flavor
    out = {"source": args.source, "flavor": flavor, "convention": "mu(w) = <M w, w>", "edges": []}
    if args.edge == "bottom":
        edge = bottom_edge(g, flavor)
        if not edge.simple:
            raise RefusalError("degenerate edge: bottom eigenvalue is not simple")
        out["edges"].append(_edge_report(g, edge, flavor, sweep))
    else:
        bs = band_structure(g, args.grid, flavor)
        if args.edge == "all":
            wanted = sorted(bs.edges)
        else:
            n, which = args.edge
            if not 1 <= n <= g.nv:
                raise GraphError(f"band {n} out of range 1..{g.nv}")
            if bs.is_flat(n):
                raise RefusalError(f"band {n} is flat; no effective mass")
            wanted = [(n, which)]
        for key in wanted:
            edge = bs.edges[key]
            if not edge.simple:
                if args.edge != "all":
                    raise RefusalError(
                        f"degenerate edge: band {edge.band} {edge.which} at "
                        f"theta0={np.round(edge.theta0, 10).tolist()} is not a simple eigenvalue"
                    )
                out["edges"].append({**_edge_dict(edge), "refused": "degenerate edge"})
                continue
            out["edges"].append(_edge_report(g, edge, flavor, sweep))
    _emit(dump_json(out), args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    g = load_source(args.source, args.normalize_indices)
    bs = band_structure(g, args.grid, "normalized")
    ms = metric_spectrum(bs, args.jmax, args.kmax)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "j", "E_minus", "E_plus"])
        for (n, j), (a, b) in sorted(ms.ac_bands.items()):
            w.writerow([n, j, format(a, ".17g"), format(b, ".17g")])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK

    forms = []
    edges = [bottom_edge(g)] + [e for k, e in sorted(bs.edges.items()) if k != (1, "min")]
    for edge in edges:
        if not edge.simple:
            continue
        form = effective_matrix(g, edge.theta0, edge.band)
        for j in range(args.jmax + 1):
            energy = float(metric_band_function(edge.value, j))
            entry = {"n": edge.band, "j": j, "which": edge.which, "theta0": edge.theta0, "energy": energy}
            try:
                entry["M"] = metric_effective_form(energy, form).matrix
            except RefusalError as exc:
                entry["refused"] = str(exc)
            forms.append(entry)
    report = {
        "source": args.source,
        "spectrum": ms.as_dict(),
        "bottom_bounds": metric_bottom_bounds(g, directions(g.dim, args.sweep)).as_dict(),
        "effective_forms": forms,
    }
    _emit(dump_json(report), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bandmass", description="Band structures and effective masses of periodic graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True):
        sp.add_argument("source", help="fixture name (lattice:d, graphene, stanene, kagome) or graph file")
        sp.add_argument("--out", help="write output to PATH instead of stdout")
        sp.add_argument("--normalize-indices", action="store_true", help="re-index so spanning-tree edges have zero index")
        if grid:
            sp.add_argument("--grid", type=int, default=None, help="grid points per torus axis (>= 8)")

    sp = sub.add_parser("validate", help="parse a graph and report its invariants")
    common(sp, grid=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("bands", help="sample band functions")
    common(sp)
    sp.add_argument("--flavor", choices=["normalized", "combinatorial"], default="normalized")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.set_defaults(func=cmd_bands)

    sp = sub.add_parser("effmass", help="effective forms, masses and bounds at band edges")
    common(sp)
    sp.add_argument("--flavor", choices=["normalized", "combinatorial"], default="normalized")
    sp.add_argument("--edge", type=_parse_edge, default="bottom", help="bottom, all, or bandN-min / bandN-max")
    sp.add_argument("--sweep", type=int, default=None, help="number of directions in bound sweeps")
    sp.set_defaults(func=cmd_effmass)

    sp = sub.add_parser("metric", help="equilateral metric-graph spectrum and effective forms")
    common(sp)
    sp.add_argument("--jmax", type=int, default=4)
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--sweep", type=int, default=None)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.set_defaults(func=cmd_metric)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "grid", None) is not None and args.grid < 8:
        print("error: --grid must be >= 8", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
