"""Batch command line: load or pick a model, sweep weights, emit reports.

Reports are byte-stable for identical configurations: rationals are printed
as canonical fraction strings, tables are ordered by grid index and bidegree,
and no timestamps or machine data are embedded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import frolicher, hopf, jets, models, twisted
from .pencil import poly_str
from .scalars import Scalar, ScalarParseError, rat

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_UNSUPPORTED = 4
EXIT_INTERNAL = 5


class ConfigError(ValueError):
    pass


def parse_alpha_grid(spec: str) -> List[Scalar]:
    """Comma list of rationals, or an inclusive exact range 'a:b:step'."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be a:b:step, got {spec!r}")
        try:
            a, b, step = (Fraction(p) for p in parts)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"range bounds must be exact rationals: {spec!r}") from exc
        if step <= 0:
            raise ConfigError("range step must be positive")
        out = []
        x = a
        while x <= b:
            out.append(Scalar(x))
            x += step
        return out
    try:
        return [rat(tok) for tok in spec.split(",") if tok.strip()]
    except ScalarParseError as exc:
        raise ConfigError(str(exc)) from exc


def parse_rational_list(spec: str) -> List[Scalar]:
    try:
        return [rat(tok) for tok in spec.split(",") if tok.strip()]
    except ScalarParseError as exc:
        raise ConfigError(str(exc)) from exc


def _load_model(source: str) -> models.Model:
    if source in models.BUILTIN_NAMES:
        return models.builtin(source)
    if not os.path.exists(source):
        raise ConfigError(f"model {source!r} is neither a builtin name nor a file")
    return models.load(source)


def _grid_map(fn, grid: Sequence[Scalar]):
    """Evaluate fn over the grid, optionally in parallel, preserving order."""
    threads = int(os.environ.get("TWISTCOH_THREADS", "1") or "1")
    if threads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, grid))
    return [fn(a) for a in grid]


def _pq_list(m: int, only: Optional[tuple]) -> List[tuple]:
    if only is not None:
        return [only]
    return [(p, q) for p in range(m + 1) for q in range(m + 1)]


# -- command bodies -----------------------------------------------------------

def cmd_mn(model: models.Model, grid, args) -> Dict:
    def one(alpha):
        report = twisted.morse_novikov(model, alpha)
        return {"alpha": str(alpha), "dims": list(report.dim_vector())}

    return {"results": _grid_map(one, grid)}


def cmd_dolbeault(model: models.Model, grid, args) -> Dict:
    def one(alpha):
        report = twisted.dolbeault(model, alpha)
        table = [{"p": p, "q": q, "dim": report.dims[(p, q)]}
                 for (p, q) in sorted(report.dims)]
        return {"alpha": str(alpha), "table": table}

    return {"results": _grid_map(one, grid)}


def cmd_bc(model: models.Model, grid, args) -> Dict:
    m = model.n // 2

    def one(alpha):
        tc = twisted.TwistedComplex(model, alpha)
        table = []
        for p, q in _pq_list(m, args.pq):
            entry = twisted.bott_chern(model, alpha, p, q, tc=tc)
            verdict = twisted.ddc_lemma_check(model, alpha, p, q, tc=tc)
            table.append({"p": p, "q": q, "dim": entry.dims[(p, q)],
                          "ddc": verdict.holds})
        return {"alpha": str(alpha), "table": table}

    return {"results": _grid_map(one, grid)}


def cmd_frolicher(model: models.Model, grid, args) -> Dict:
    m = model.n // 2

    def one(alpha):
        page_list = frolicher.pages(model, alpha)
        pages_out = []
        for page in page_list:
            pages_out.append({
                "r": page.r,
                "dims": [{"p": p, "q": q, "dim": page.dims[(p, q)]}
                         for (p, q) in sorted(page.dims)],
            })
        deg = frolicher.degeneration_page(model, alpha)
        exgen = []
        for p, q in _pq_list(m, args.pq):
            chk = frolicher.exgen_check(model, alpha, p, q)
            exgen.append({"p": p, "q": q, "exact": chk.exact, "defect": chk.defect,
                          "dims": [chk.source_dim, chk.middle_dim, chk.target_dim]})
        return {"alpha": str(alpha), "pages": pages_out,
                "degeneration_page": deg, "exgen": exgen}

    return {"results": _grid_map(one, grid)}


def cmd_spectrum(model: models.Model, grid, args) -> Dict:
    spec = twisted.exceptional_spectrum(model, args.selector)
    return {"results": [{
        "selector": spec.selector,
        "rational": [str(r) for r in spec.rational],
        "residual_factors": [poly_str(f, "a") for f in spec.residual_factors],
    }]}


def cmd_hopf(args, grid) -> Dict:
    beta = parse_rational_list(args.hopf_beta)
    report = hopf.vanishing_scan(beta, grid, monoid_bound=args.monoid_bound)
    results = []
    for rec in report.records:
        results.append({
            "alpha": str(rec.alpha),
            "dims": [list(row) for row in rec.dims],
            "all_zero": rec.all_zero,
            "monoid_member": rec.membership.member,
            "witness": list(rec.membership.witness) if rec.membership.witness else None,
        })
    return {"beta": [str(b) for b in beta], "results": results}


def cmd_jets(args, grid) -> Dict:
    gens = parse_rational_list(args.generators)
    cutoff = args.jet_degree
    auto = jets.JetAutomorphism.diagonal(gens, cutoff)
    monoid = jets.spectrum(auto, args.monoid_bound)
    rhs = jets.TruncatedSeries(len(gens), cutoff, {(1,) * len(gens): rat(1)})
    results = []
    for lam in grid:
        membership = jets.monoid_member(lam, monoid)
        entry = {"lambda": str(lam), "monoid_member": membership.member,
                 "membership_complete": membership.complete,
                 "witness": list(membership.witness) if membership.witness else None}
        try:
            x = jets.resolvent_solve(auto, lam, rhs)
            entry["status"] = "ok"
            entry["residual_zero"] = jets.residual(auto, lam, x, rhs).is_zero()
        except jets.SingularWeightError as exc:
            entry["status"] = "singular"
            entry["singular_degree"] = exc.degree
            entry["singular_witness"] = list(exc.witness) if exc.witness else None
        results.append(entry)
    return {
        "generators": [str(g) for g in gens],
        "monoid": {"bound": monoid.bound,
                   "values": [str(v) for v in monoid.values()]},
        "results": results,
    }


# -- report assembly -----------------------------------------------------------

def _csv_rows(command: str, body: Dict) -> List[List]:
    rows: List[List] = []
    if command == "mn":
        rows.append(["alpha", "degree", "dim"])
        for rec in body["results"]:
            for k, d in enumerate(rec["dims"]):
                rows.append([rec["alpha"], k, d])
    elif command == "dolbeault":
        rows.append(["alpha", "p", "q", "dim"])
        for rec in body["results"]:
            for cell in rec["table"]:
                rows.append([rec["alpha"], cell["p"], cell["q"], cell["dim"]])
    elif command == "bc":
        rows.append(["alpha", "p", "q", "dim", "ddc"])
        for rec in body["results"]:
            for cell in rec["table"]:
                rows.append([rec["alpha"], cell["p"], cell["q"], cell["dim"], cell["ddc"]])
    elif command == "frolicher":
        rows.append(["alpha", "page", "p", "q", "dim"])
        for rec in body["results"]:
            for page in rec["pages"]:
                for cell in page["dims"]:
                    rows.append([rec["alpha"], page["r"], cell["p"], cell["q"], cell["dim"]])
    elif command == "spectrum":
        rows.append(["selector", "kind", "value"])
        for rec in body["results"]:
            for r in rec["rational"]:
                rows.append([rec["selector"], "rational", r])
            for f in rec["residual_factors"]:
                rows.append([rec["selector"], "factor", f])
    elif command == "hopf":
        rows.append(["alpha", "p", "q", "dim", "all_zero", "monoid_member"])
        for rec in body["results"]:
            for p, row in enumerate(rec["dims"]):
                for q, d in enumerate(row):
                    rows.append([rec["alpha"], p, q, d, rec["all_zero"],
                                 rec["monoid_member"]])
    elif command == "jets":
        rows.append(["lambda", "monoid_member", "status"])
        for rec in body["results"]:
            rows.append([rec["lambda"], rec["monoid_member"], rec["status"]])
    else:
        raise ConfigError(f"no csv layout for command {command!r}")
    return rows


def _emit(report: Dict, command: str, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(_csv_rows(command, report["body"]))
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"code": code, "type": kind,
                                           "message": message}}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistcoh",
        description="exact twisted-cohomology scans on invariant-form models")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_model=True):
        if needs_model:
            p.add_argument("--model", required=True,
                           help="builtin name (%s) or model file path"
                                % ", ".join(models.BUILTIN_NAMES))
        p.add_argument("--alpha", default="0",
                       help="weight grid: comma list of rationals or range a:b:step")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--jet-degree", type=int, default=8, dest="jet_degree")
        p.add_argument("--monoid-bound", type=int, default=8, dest="monoid_bound")
        p.add_argument("--pq", default=None,
                       help="restrict bidegree tables to one 'p,q' pair")

    for name in ("mn", "dolbeault", "bc", "frolicher"):
        common(sub.add_parser(name))
    spectrum_p = sub.add_parser("spectrum")
    common(spectrum_p)
    spectrum_p.add_argument("--selector", default="all",
                            choices=("mn", "dolbeault", "bc", "all"))
    hopf_p = sub.add_parser("hopf")
    common(hopf_p, needs_model=False)
    hopf_p.add_argument("--hopf-beta", required=True, dest="hopf_beta",
                        help="comma list of contraction ratios in (0,1)")
    jets_p = sub.add_parser("jets")
    common(jets_p, needs_model=False)
    jets_p.add_argument("--generators", required=True,
                        help="comma list of diagonal substitution ratios")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        grid = parse_alpha_grid(args.alpha)
        if args.pq is not None:
            try:
                p_str, q_str = args.pq.split(",")
                args.pq = (int(p_str), int(q_str))
            except ValueError:
                raise ConfigError(f"--pq must be 'p,q', got {args.pq!r}")

        config = {"command": args.command, "alpha": [str(a) for a in grid],
                  "format": args.format, "jet_degree": args.jet_degree,
                  "monoid_bound": args.monoid_bound}
        model = None
        if args.command in ("mn", "dolbeault", "bc", "frolicher", "spectrum"):
            model = _load_model(args.model)
            config["model"] = args.model
            validation = models.validate(model)
            if not validation.ok:
                msgs = "; ".join(f"{c.name}: {c.witness}" for c in validation.failures())
                return _error(EXIT_VALIDATION, "validation", msgs)
        if args.command == "spectrum":
            config["selector"] = args.selector
        if args.command == "hopf":
            config["hopf_beta"] = args.hopf_beta
        if args.command == "jets":
            config["generators"] = args.generators
        if args.pq:
            config["pq"] = list(args.pq)

        if args.command == "mn":
            body = cmd_mn(model, grid, args)
        elif args.command == "dolbeault":
            body = cmd_dolbeault(model, grid, args)
        elif args.command == "bc":
            body = cmd_bc(model, grid, args)
        elif args.command == "frolicher":
            body = cmd_frolicher(model, grid, args)
        elif args.command == "spectrum":
            body = cmd_spectrum(model, grid, args)
        elif args.command == "hopf":
            body = cmd_hopf(args, grid)
        else:
            body = cmd_jets(args, grid)

        report = {
            "config": config,
            "model_digest": model.digest() if model is not None else None,
            "body": body,
        }
        _emit(report, args.command, args)
        return EXIT_OK
    except (ConfigError, ScalarParseError, models.ModelParseError) as exc:
        return _error(EXIT_CONFIG, "config", str(exc))
    except models.ModelError as exc:
        return _error(EXIT_VALIDATION, "validation", str(exc))
    except jets.IrrationalEigenvalueError as exc:
        return _error(EXIT_UNSUPPORTED, "unsupported", str(exc))
    except twisted.ConventionError as exc:
        return _error(EXIT_INTERNAL, "internal", str(exc))


if __name__ == "__main__":
    sys.exit(main())
