"""Batch CLI: parse a profile document, run the computations, emit a
deterministic JSON report.

Subcommands: strata, limits, reducible, anmod, harmonic.  Input is a TOML
document (see README for the schema); output is JSON on stdout with
sorted keys and rationals rendered exactly.  The harmonic subcommand can
additionally write the field to disk: a small binary dump, a
gnuplot-compatible ASCII table, and a PNG rendering.

Exit codes: 0 success, 2 input/validation error, 3 domain error,
1 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import struct
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .core import FilteredClass, WeightMap, degree
from . import harmonic_lab, local_modules, mochizuki_irred, mochizuki_red, strata

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_DOMAIN = 3


class CliError(Exception):
    def __init__(self, code: int, message: str, details=None):
        super().__init__(message)
        self.code = code
        self.details = details or []


# ---------------------------------------------------------------------------
# Serialization helpers.


def frac(x) -> str:
    return str(Fraction(x))


def weight_map_json(w: WeightMap) -> dict:
    return {p.id: frac(v) for p, v in sorted(w.values.items())}


def filtered_json(f: FilteredClass) -> dict:
    return {
        "underlying_degree": f.underlying_degree,
        "jumps": {p.id: frac(v) for p, v in sorted(f.jumps.items())},
        "degree": frac(degree(f)),
    }


def emit(report: dict) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))


def make_report(command: str, input_hash: str, results: dict, findings: list) -> dict:
    return {
        "version": __version__,
        "command": command,
        "input_sha256": input_hash,
        "results": results,
        "findings": sorted(findings),
    }


# ---------------------------------------------------------------------------
# Input document parsing.


def _load_document(path: str) -> tuple[dict, str]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise CliError(EXIT_VALIDATION, f"cannot read input: {e}")
    digest = hashlib.sha256(data).hexdigest()
    try:
        doc = tomllib.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as e:
        raise CliError(EXIT_VALIDATION, f"cannot parse input document: {e}")
    return doc, digest


def _check_keys(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise CliError(EXIT_VALIDATION, f"unknown fields in {where}: {unknown}")


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise CliError(EXIT_VALIDATION, f"missing field {key!r} in {where}")
    return table[key]


def _parse_profile(doc: dict):
    _check_keys(doc, {"schema_version", "profile", "datum", "harmonic"}, "document")
    if _require(doc, "schema_version", "document") != 1:
        raise CliError(EXIT_VALIDATION, "unsupported schema_version (expected 1)")
    prof = _require(doc, "profile", "document")
    flavor = _require(prof, "flavor", "profile")
    genus = _require(prof, "genus", "profile")
    if flavor == "irreducible":
        _check_keys(prof, {"flavor", "genus", "even", "odd"}, "profile")
        try:
            return strata.validate_profile(
                genus, prof.get("even", []), prof.get("odd", []), strata.IRREDUCIBLE
            )
        except strata.ProfileError as e:
            raise CliError(EXIT_VALIDATION, "invalid profile", e.violations)
    if flavor == "reducible":
        _check_keys(prof, {"flavor", "genus", "half_divisor"}, "profile")
        try:
            return mochizuki_red.ReducibleProfile(
                genus, tuple(_require(prof, "half_divisor", "profile"))
            )
        except mochizuki_red.ReducibleError as e:
            raise CliError(EXIT_VALIDATION, f"invalid profile: {e}")
    raise CliError(EXIT_VALIDATION, f"unknown flavor {flavor!r}")


def _parse_datum(doc: dict, profile) -> mochizuki_red.ReducibleDatum:
    datum = _require(doc, "datum", "document")
    _check_keys(datum, {"D", "d_plus"}, "datum")
    d = mochizuki_red.ReducibleDatum(
        tuple(_require(datum, "D", "datum")), _require(datum, "d_plus", "datum")
    )
    try:
        mochizuki_red.check_datum(profile, d)
    except mochizuki_red.ReducibleError as e:
        raise CliError(EXIT_VALIDATION, f"invalid datum: {e}")
    return d


def _parse_harmonic(doc: dict) -> harmonic_lab.TorusConfig:
    _check_keys(doc, {"schema_version", "profile", "datum", "harmonic"}, "document")
    if _require(doc, "schema_version", "document") != 1:
        raise CliError(EXIT_VALIDATION, "unsupported schema_version (expected 1)")
    sect = _require(doc, "harmonic", "document")
    _check_keys(sect, {"grid", "epsilon", "punctures", "side"}, "harmonic")
    punctures = []
    for row in _require(sect, "punctures", "harmonic"):
        if len(row) != 3:
            raise CliError(EXIT_VALIDATION, "puncture rows are [x, y, weight]")
        x, y, w = row
        try:
            weight = Fraction(w)
        except (ValueError, ZeroDivisionError) as e:
            raise CliError(EXIT_VALIDATION, f"bad puncture weight {w!r}: {e}")
        punctures.append(harmonic_lab.Puncture(float(x), float(y), weight))
    try:
        return harmonic_lab.TorusConfig(
            _require(sect, "grid", "harmonic"),
            tuple(punctures),
            float(_require(sect, "epsilon", "harmonic")),
            float(sect.get("side", 1.0)),
        )
    except harmonic_lab.DegreeObstruction as e:
        raise CliError(EXIT_DOMAIN, f"degree obstruction: {e}")
    except harmonic_lab.HarmonicError as e:
        raise CliError(EXIT_VALIDATION, f"invalid harmonic section: {e}")


def _thread_count() -> int:
    raw = os.environ.get("HITCHIN_STRATA_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_strata(args) -> dict:
    doc, digest = _load_document(args.input)
    profile = _parse_profile(doc)
    if not isinstance(profile, strata.ZeroProfile):
        raise CliError(EXIT_VALIDATION, "the strata command needs an irreducible profile")
    divisors = strata.enumerate_sigma_divisors(profile)

    def row(item):
        index, D = item
        info = strata.stratum_info(profile, D)
        N, n = mochizuki_irred.count_limits(profile, D)
        return {
            "index": index,
            "even_coeffs": list(D.even_coeffs),
            "odd_coeffs": list(D.odd_coeffs),
            "deg_D": info.deg_D,
            "dim": info.dim,
            "k1": info.k1,
            "k2": info.k2,
            "n_ss": info.n_ss,
            "double_cover": info.double_cover,
            "N": N,
            "n": n,
        }

    workers = _thread_count()
    items = list(enumerate(divisors))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, items))
    else:
        rows = [row(it) for it in items]
    results = {
        "profile": {
            "flavor": "irreducible",
            "genus": profile.genus,
            "even": list(profile.even_zeros),
            "odd": list(profile.odd_zeros),
        },
        "normalization_genus": strata.normalization_genus(profile),
        "stratum_count": len(rows),
        "strata": rows,
    }
    return make_report("strata", digest, results, [])


def _limit_json(lw: mochizuki_irred.LimitWeights) -> dict:
    return {
        "prym_weights": weight_map_json(lw.prym),
        "twisted_weights": weight_map_json(lw.twisted),
        "prym_class": filtered_json(lw.cls_prym),
        "twisted_class": filtered_json(lw.cls_twisted),
    }


def cmd_limits(args) -> dict:
    doc, digest = _load_document(args.input)
    profile = _parse_profile(doc)
    if not isinstance(profile, strata.ZeroProfile):
        raise CliError(EXIT_VALIDATION, "the limits command needs an irreducible profile")
    divisors = strata.enumerate_sigma_divisors(profile)
    if not 0 <= args.stratum < len(divisors):
        raise CliError(
            EXIT_DOMAIN,
            f"stratum index {args.stratum} out of range [0, {len(divisors) - 1}]",
        )
    D = divisors[args.stratum]
    ls = mochizuki_irred.limit_set(profile, D)
    verdict = mochizuki_irred.continuity_verdict_irreducible(profile)
    results = {
        "stratum": {
            "index": args.stratum,
            "even_coeffs": list(D.even_coeffs),
            "odd_coeffs": list(D.odd_coeffs),
            "deg_D": D.degree(),
        },
        "N": ls.N,
        "n": ls.n,
        "main": _limit_json(ls.main),
        "branches": [_limit_json(b) for b in ls.branches],
        "verdict": {
            "continuous": verdict.continuous,
            "witness_count": len(verdict.witnesses),
        },
    }
    return make_report("limits", digest, results, [])


def cmd_reducible(args) -> dict:
    doc, digest = _load_document(args.input)
    profile = _parse_profile(doc)
    if not isinstance(profile, mochizuki_red.ReducibleProfile):
        raise CliError(EXIT_VALIDATION, "the reducible command needs a reducible profile")
    findings = []
    results = {
        "profile": {
            "flavor": "reducible",
            "genus": profile.genus,
            "half_divisor": list(profile.multiplicities),
        },
        "strata": [
            {
                "D": list(s.coeffs),
                "m": s.m,
                "deg_D": s.deg_D,
                "fiber_dim": s.fiber_dim,
                "partner_m": s.partner_m,
                "double_cover": s.double_cover,
                "polystable_point": s.polystable_point,
            }
            for s in mochizuki_red.enumerate_reducible_strata(profile)
        ],
    }
    try:
        verdict = mochizuki_red.genus_verdict(profile)
    except mochizuki_red.ReducibleError as e:
        verdict = None
        results["genus_verdict"] = {"continuous_on_stable": None, "note": str(e)}
    if verdict is not None:
        results["genus_verdict"] = {
            "continuous_on_stable": verdict.continuous_on_stable,
        }
    if verdict is not None and verdict.defect is not None:
        results["genus_verdict"]["witness"] = {
            "from_D": list(verdict.witness_from.coeffs),
            "d_plus": verdict.witness_from.d_plus,
            "to_D": list(verdict.witness_to),
            "plus_factor": filtered_json(verdict.defect.plus_factor),
            "minus_factor": filtered_json(verdict.defect.minus_factor),
            "mismatch": verdict.defect.mismatch,
        }

    if "datum" in doc:
        datum = _parse_datum(doc, profile)
        cls = mochizuki_red.classify(datum)
        entry = {
            "D": list(datum.coeffs),
            "d_plus": datum.d_plus,
            "d_minus": datum.d_minus,
            "stability": cls.tag,
        }
        if cls.tag == mochizuki_red.UNSTABLE:
            raise CliError(EXIT_DOMAIN, "unstable datum", [entry])
        if cls.tag == mochizuki_red.STABLE:
            sol = mochizuki_red.weight_constant(profile, datum)
            entry.update(
                {
                    "c": frac(sol.c),
                    "chi_plus": weight_map_json(sol.chi_plus),
                    "chi_minus": weight_map_json(sol.chi_minus),
                    "pair": [filtered_json(sol.pair[0]), filtered_json(sol.pair[1])],
                    "exotic": mochizuki_red.exotic(datum),
                }
            )
            try:
                entry["closed_form_c"] = frac(mochizuki_red.closed_form_c(profile, datum))
                findings.append(
                    "closed-form weight constant uses a sign-corrected formula, "
                    "validated against the breakpoint solver"
                )
            except mochizuki_red.ClosedFormInapplicable:
                entry["closed_form_c"] = None
        else:
            entry["pair"] = [
                filtered_json(cls.polystable_pair[0]),
                filtered_json(cls.polystable_pair[1]),
            ]
        results["datum"] = entry
    return make_report("reducible", digest, results, findings)


def cmd_anmod(args) -> dict:
    family = local_modules.A_EVEN if args.family == "even" else local_modules.A_ODD
    try:
        ring = local_modules.build_ring(family, args.n, args.truncation)
    except (ValueError, local_modules.TruncationError) as e:
        raise CliError(EXIT_VALIDATION, str(e))
    rows = []
    all_match = True
    for k in ring.legal_k():
        computed = local_modules.invariants(ring, k)
        expected = local_modules.closed_form(family, ring.n, k)
        match = computed == expected
        all_match = all_match and match
        rows.append(
            {
                "k": k,
                "ell": computed.ell,
                "a_values": list(computed.a_values),
                "b": computed.b,
                "delta": computed.delta,
                "tor_total": computed.tor_total,
                "expected": {
                    "ell": expected.ell,
                    "a_values": list(expected.a_values),
                    "b": expected.b,
                },
                "match": match,
            }
        )
    digest = hashlib.sha256(
        f"anmod {args.family} {args.n} {args.truncation}".encode()
    ).hexdigest()
    findings = [
        "the full torsion kernel has dimension 2*ell; b is the anti-invariant "
        "eigenspace of the cover involution (the published basis spans it)",
        "the square-root parametrization is taken as r -> t^(2n+1), s -> t^2 "
        "so that r^2 = s^(2n+1) holds",
    ]
    results = {
        "family": args.family,
        "n": ring.n,
        "N": ring.N,
        "rows": rows,
        "all_match": all_match,
    }
    return make_report("anmod", digest, results, findings)


# ---------------------------------------------------------------------------
# Field export.


def write_field_dump(path: str, field: harmonic_lab.TorusField) -> None:
    """Binary dump: magic 'HSF1', u32 grid, f64 side, u32 puncture count,
    puncture records (f64 x, f64 y, i64 num, i64 den), then grid^2 f64
    values row-major, all little-endian."""
    cfg = field.config
    with open(path, "wb") as fh:
        fh.write(b"HSF1")
        fh.write(struct.pack("<I", cfg.grid))
        fh.write(struct.pack("<d", cfg.side))
        fh.write(struct.pack("<I", len(cfg.punctures)))
        for p in cfg.punctures:
            w = Fraction(p.weight)
            fh.write(struct.pack("<ddqq", p.x, p.y, w.numerator, w.denominator))
        fh.write(field.values.astype("<f8").tobytes())


def read_field_dump(path: str):
    """Inverse of write_field_dump; returns (grid, side, punctures, values)."""
    import numpy as np

    with open(path, "rb") as fh:
        if fh.read(4) != b"HSF1":
            raise ValueError("bad magic")
        (grid,) = struct.unpack("<I", fh.read(4))
        (side,) = struct.unpack("<d", fh.read(8))
        (count,) = struct.unpack("<I", fh.read(4))
        punctures = []
        for _ in range(count):
            x, y, num, den = struct.unpack("<ddqq", fh.read(32))
            punctures.append((x, y, Fraction(num, den)))
        values = np.frombuffer(fh.read(grid * grid * 8), dtype="<f8").reshape(grid, grid)
    return grid, side, punctures, values


def write_field_ascii(path: str, field: harmonic_lab.TorusField) -> None:
    """Gnuplot-compatible export: 'x y rho' rows, blank line per grid row."""
    h = field.config.spacing
    with open(path, "w") as fh:
        for iy in range(field.config.grid):
            for ix in range(field.config.grid):
                fh.write(f"{ix * h:.9g} {iy * h:.9g} {field.values[iy, ix]:.12e}\n")
            fh.write("\n")


def write_field_png(path: str, field: harmonic_lab.TorusField) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = field.config
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(
        field.values,
        origin="lower",
        extent=(0, cfg.side, 0, cfg.side),
        cmap="RdBu_r",
    )
    for p in cfg.punctures:
        ax.plot(p.x % cfg.side, p.y % cfg.side, "k+", markersize=8)
        ax.annotate(str(Fraction(p.weight)), (p.x % cfg.side, p.y % cfg.side),
                    textcoords="offset points", xytext=(4, 4), fontsize=8)
    fig.colorbar(im, ax=ax, label="log-metric potential")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_harmonic(args) -> dict:
    doc, digest = _load_document(args.input)
    config = _parse_harmonic(doc)
    field = harmonic_lab.solve_harmonic(config)
    exponents = []
    for j, p in enumerate(config.punctures):
        try:
            est = harmonic_lab.local_exponent(field, j)
        except harmonic_lab.HarmonicError:
            est = None
        exponents.append(
            {
                "index": j,
                "x": p.x,
                "y": p.y,
                "weight": frac(p.weight),
                "estimate": est,
                "abs_error": None if est is None else abs(est - float(p.weight)),
            }
        )
    results = {
        "grid": config.grid,
        "epsilon": config.epsilon,
        "side": config.side,
        "residual": field.residual(),
        "mean": float(field.values.mean()),
        "exponents": exponents,
    }
    if args.out:
        write_field_dump(args.out, field)
        write_field_ascii(args.out + ".dat", field)
        write_field_png(args.out + ".png", field)
        results["outputs"] = {
            "dump": args.out,
            "ascii": args.out + ".dat",
            "png": args.out + ".png",
        }
    return make_report("harmonic", digest, results, [])


# ---------------------------------------------------------------------------
# Entry point.


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hitchin-strata",
        description="Discrete invariants of singular Hitchin fibers and a "
        "numerical harmonic-metric lab.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, help="TOML profile document")
        p.add_argument("--json", action="store_true", help="JSON output (default)")

    p = sub.add_parser("strata", help="sigma-divisor stratum table")
    add_input(p)

    p = sub.add_parser("limits", help="limit weight vectors of one stratum")
    add_input(p)
    p.add_argument("--stratum", type=int, required=True, help="stratum index")

    p = sub.add_parser("reducible", help="reducible-fiber weights and strata")
    add_input(p)

    p = sub.add_parser("anmod", help="local module invariants sweep")
    p.add_argument("--family", choices=["even", "odd"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--json", action="store_true", help="JSON output (default)")

    p = sub.add_parser("harmonic", help="torus harmonic-metric experiment")
    add_input(p)
    p.add_argument("--out", default=None, help="field dump path (also writes .dat/.png)")

    return parser


_COMMANDS = {
    "strata": cmd_strata,
    "limits": cmd_limits,
    "reducible": cmd_reducible,
    "anmod": cmd_anmod,
    "harmonic": cmd_harmonic,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        emit(_COMMANDS[args.command](args))
        return EXIT_OK
    except CliError as e:
        emit(
            {
                "version": __version__,
                "command": args.command,
                "error": str(e),
                "details": e.details,
            }
        )
        return e.code
    except Exception as e:  # internal error
        emit(
            {
                "version": __version__,
                "command": args.command,
                "error": f"internal: {type(e).__name__}: {e}",
                "details": [],
            }
        )
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
