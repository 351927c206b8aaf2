"""Command-line surface: build matrices, spectra, stationary laws,
eigenvectors, exact evolution, Monte Carlo simulation, and the acceptance
verification suite.

Exit codes: 0 success, 1 verification failure, 2 usage error.
All rational parameters accept "p/q" strings; JSON output carries a
format_version field and serialises rationals as "p/q" strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import acceptance
from .chain import (
    Distribution,
    build_transition_matrix,
    distribution_to_dict,
    evolve,
    expectation,
    matrix_to_csv,
    matrix_to_dict,
    point_mass,
    stationary_distributions,
)
from .forests import Forest, f_j_statistic, forest_algebra, parse_forest
from .hopf import SpecError, spec_from_dict, spec_to_dict
from .linalg import rat
from .presets import expand_preset, preset_names
from .shuffle import (
    FreeAssociativeAlgebra,
    Word,
    deck_from_string,
    descent_peak_sets,
    distinct_deck,
    rearrangement_class,
    weighted_descent_stat,
    weighted_peak_stat,
)
from .simulate import gsr_stepper, matrix_stepper, run_trajectories
from .spectral import (
    algebra_dims,
    build_E_j,
    hilbert_invert,
    spectrum_from_profile,
    verify_spectrum,
    word_class_spectrum,
)

FORMAT_VERSION = 1


class UsageError(Exception):
    pass


def _parse_params(raw: str | None) -> dict:
    params: dict = {}
    if not raw:
        return params
    for bit in raw.split(","):
        if "=" not in bit:
            raise UsageError(f"malformed parameter {bit!r}; expected key=value")
        key, value = bit.split("=", 1)
        params[key.strip()] = value.strip()
    return params


def _load_spec(args, n: int):
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            return spec_from_dict(json.load(fh))
    if args.preset:
        return expand_preset(args.preset, n, _parse_params(args.params))
    raise UsageError("need --preset NAME or --spec FILE.json")


def _setup_space(args):
    """Resolve (algebra, degree, states, start, content) from the flags."""
    chosen = [x for x in (args.distinct, args.deck, args.forest, args.n) if x]
    if args.algebra == "shuffle":
        if args.distinct:
            alg, deck = distinct_deck(args.distinct)
        elif args.deck:
            alg, deck = deck_from_string(args.deck)
        else:
            raise UsageError("shuffle runs need --distinct N or --deck WORD")
        states = rearrangement_class(alg, deck)
        return alg, deck.degree, states, deck
    if args.algebra == "forests":
        alg = forest_algebra()
        if args.forest:
            start = parse_forest(args.forest)
            n = start.degree
        elif args.n:
            n = args.n
            start = None
        else:
            raise UsageError("forest runs need --forest ENCODING or --n N")
        return alg, n, list(alg.basis(n)), start
    raise UsageError(f"unknown algebra {args.algebra!r}")


def _emit(args, payload: dict, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise UsageError("csv output is only available for the matrix command")
        text = csv_text
    else:
        payload = {"format_version": FORMAT_VERSION, **payload}
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _state_str(state) -> str:
    return str(state)


# ---------------------------------------------------------------------------
# subcommands


def cmd_matrix(args) -> int:
    alg, n, states, _start = _setup_space(args)
    spec = _load_spec(args, n)
    K = build_transition_matrix(alg, spec, states=states, max_states=args.max_states)
    payload = {
        "command": "matrix",
        "algebra": alg.name,
        "n": n,
        "spec": spec_to_dict(spec),
        "matrix": matrix_to_dict(K),
    }
    _emit(args, payload, csv_text=matrix_to_csv(K))
    return 0


def cmd_spectrum(args) -> int:
    alg, n, states, _start = _setup_space(args)
    spec = _load_spec(args, n)
    if args.algebra == "shuffle":
        from .shuffle import word_content

        content = word_content(alg, states[0])
        spectrum = word_class_spectrum(spec, alg, content)
    else:
        spectrum = spectrum_from_profile(spec, hilbert_invert(algebra_dims(alg, n)))
    payload = {
        "command": "spectrum",
        "algebra": alg.name,
        "n": n,
        "spec": spec_to_dict(spec),
        "rows": spectrum.to_dicts(),
        "by_eigenvalue": {
            str(v): m for v, m in sorted(spectrum.by_eigenvalue().items(), reverse=True)
        },
    }
    ok = True
    if args.verify_matrix:
        K = build_transition_matrix(alg, spec, states=states, max_states=args.max_states)
        report = verify_spectrum(K, spectrum)
        payload["matrix_verification"] = {"ok": report.ok, "detail": report.lines()}
        ok = report.ok
    _emit(args, payload)
    return 0 if ok else 1


def cmd_stationary(args) -> int:
    alg, n, states, _start = _setup_space(args)
    pis = stationary_distributions(alg, n, states=states, max_states=args.max_states)
    payload = {
        "command": "stationary",
        "algebra": alg.name,
        "n": n,
        "distributions": [
            {
                "multiset": [_state_str(c) for c in (pi.provenance or ())],
                "weights": distribution_to_dict(pi),
            }
            for pi in pis
        ],
    }
    _emit(args, payload)
    return 0


def cmd_eigvecs(args) -> int:
    if args.algebra != "shuffle":
        raise UsageError("eigenvector construction runs on the word dual; use --algebra shuffle")
    if args.distinct:
        n = args.distinct
        alphabet = "123456789"[:n]
    elif args.deck:
        alphabet = "".join(sorted(set(args.deck)))
        n = len(args.deck)
    else:
        raise UsageError("need --distinct N or --deck WORD")
    alg = FreeAssociativeAlgebra(alphabet)
    q = rat(args.q)
    vectors = []
    for j in list(range(n - 1)) + [n]:
        vectors.extend(build_E_j(alg, n, j, q))
    payload = {
        "command": "eigvecs",
        "algebra": alg.name,
        "n": n,
        "q": str(q),
        "count": len(vectors),
        "verified": True,  # build_E_j raises on any eigen-equation failure
        "vectors": [v.to_dict() for v in vectors],
    }
    _emit(args, payload)
    return 0


def _resolve_statistic(args, alg, n):
    name = args.stat
    q = rat(args.q)
    if name == "weighted-descents":
        return lambda w: weighted_descent_stat(w, q, alg.alphabet)
    if name == "weighted-peaks":
        return lambda w: weighted_peak_stat(w, q, alg.alphabet)
    if name == "descents":
        return lambda w: Fraction(len(descent_peak_sets(w, alg.alphabet).descents))
    if name == "peaks":
        return lambda w: Fraction(len(descent_peak_sets(w, alg.alphabet).peaks))
    if name == "f_j":
        j = args.j
        q1 = rat(args.q1) if args.q1 else Fraction(1, 4)
        q3 = rat(args.q3) if args.q3 else Fraction(1, 4)
        return lambda f: f_j_statistic(f, j, q1, q3)
    raise UsageError(f"unknown statistic {name!r}")


def cmd_evolve(args) -> int:
    alg, n, states, start = _setup_space(args)
    if start is None:
        raise UsageError("evolve needs a start state (--deck/--distinct/--forest)")
    spec = _load_spec(args, n)
    K = build_transition_matrix(alg, spec, states=states, max_states=args.max_states)
    stat = _resolve_statistic(args, alg, n)
    dist = point_mass(K, start)
    rows = []
    for t in range(args.t + 1):
        value = expectation(K, dist, t, stat)
        rows.append({"t": t, "expectation": str(value), "float": float(value)})
    payload = {
        "command": "evolve",
        "algebra": alg.name,
        "n": n,
        "spec": spec_to_dict(spec),
        "start": _state_str(start),
        "statistic": args.stat,
        "q": str(rat(args.q)),
        "values": rows,
    }
    _emit(args, payload)
    return 0


def cmd_simulate(args) -> int:
    alg, n, states, start = _setup_space(args)
    if start is None:
        raise UsageError("simulate needs a start state (--deck/--distinct/--forest)")
    spec = _load_spec(args, n)
    stat = _resolve_statistic(args, alg, n)
    stats = {args.stat: stat}
    exact_targets = None
    if args.algebra == "shuffle":
        stepper = gsr_stepper(spec)
    else:
        stepper = None
    if len(states) <= args.max_states:
        K = build_transition_matrix(alg, spec, states=states, max_states=args.max_states)
        if stepper is None:
            stepper = matrix_stepper(K)
        dist = point_mass(K, start)
        exact_targets = {
            args.stat: [expectation(K, dist, t, stat) for t in range(args.t + 1)]
        }
    if stepper is None:
        raise UsageError("state space above the cap and no direct sampler available")
    report = run_trajectories(start, args.t, args.trials, stepper, args.seed, stats)
    payload = {
        "command": "simulate",
        "algebra": alg.name,
        "n": n,
        "spec": spec_to_dict(spec),
        "start": _state_str(start),
        **report.to_dict(exact_targets=exact_targets),
    }
    _emit(args, payload)
    return 0


def cmd_verify(args) -> int:
    numbers = None
    if args.criteria:
        numbers = sorted(int(x) for x in args.criteria.split(","))
    results = acceptance.run_all(numbers=numbers, seed=args.seed)
    all_ok = True
    for r in results:
        print(r.status_line())
        for line in r.lines:
            print("    " + line)
        for line in r.defects:
            print("    defect: " + line)
        if args.show_flagged:
            for line in r.flagged:
                print("    flagged: " + line)
        all_ok = all_ok and r.passed
    print(
        f"{sum(r.passed for r in results)}/{len(results)} criteria passed"
        + ("" if all_ok else " (failures carry defect lines above)")
    )
    if args.out:
        payload = {
            "format_version": FORMAT_VERSION,
            "command": "verify",
            "results": [
                {
                    "criterion": r.number,
                    "title": r.title,
                    "passed": r.passed,
                    "lines": r.lines,
                    "defects": r.defects,
                    "flagged": r.flagged,
                    "seconds": round(r.seconds, 2),
                }
                for r in results
            ],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algebra", choices=["shuffle", "forests"], default="shuffle")
    p.add_argument("--distinct", type=int, help="distinct deck 1<2<...<N")
    p.add_argument("--deck", help="explicit deck word, e.g. aabb")
    p.add_argument("--forest", help="forest encoding, e.g. (()())")
    p.add_argument("--n", type=int, help="degree for full-basis forest runs")
    p.add_argument("--preset", help="named operator: " + ", ".join(preset_names()))
    p.add_argument("--params", help="preset parameters, e.g. q=1/3 or a=3,q1=1/4")
    p.add_argument("--spec", help="path to an operator spec JSON file")
    p.add_argument("--max-states", type=int, default=1000)
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfchains",
        description="Exact Markov chains from breaking-size operators on words and forests",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="build and export the transition matrix")
    _add_common(p)
    p.set_defaults(fn=cmd_matrix)

    p = sub.add_parser("spectrum", help="closed-form spectrum, optionally matrix-verified")
    _add_common(p)
    p.add_argument("--verify-matrix", action="store_true")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("stationary", help="stationary distributions at a degree")
    _add_common(p)
    p.set_defaults(fn=cmd_stationary)

    p = sub.add_parser("eigvecs", help="insertion-shuffle eigenvectors on the word dual")
    _add_common(p)
    p.add_argument("--q", default="1", help="insertion weight parameter")
    p.set_defaults(fn=cmd_eigvecs)

    p = sub.add_parser("evolve", help="exact expectations of a statistic over time")
    _add_common(p)
    p.add_argument("--t", type=int, default=5)
    p.add_argument(
        "--stat",
        default="weighted-descents",
        choices=["weighted-descents", "weighted-peaks", "descents", "peaks", "f_j"],
    )
    p.add_argument("--q", default="1/2", help="weight parameter for weighted statistics")
    p.add_argument("--j", type=int, default=2, help="threshold for the forest statistic")
    p.add_argument("--q1", help="forest statistic down-weight")
    p.add_argument("--q3", help="forest statistic up-weight")
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("simulate", help="seeded Monte Carlo with exact targets where available")
    _add_common(p)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--stat",
        default="weighted-descents",
        choices=["weighted-descents", "weighted-peaks", "descents", "peaks", "f_j"],
    )
    p.add_argument("--q", default="1/2")
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--q1")
    p.add_argument("--q3")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run the acceptance criteria and print a table")
    p.add_argument("--grid", choices=["desk"], default="desk", help="verification grid size")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,3")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    p.add_argument("--show-flagged", action="store_true")
    p.add_argument("--out", help="also write a JSON report here")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, SpecError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 2
    except ArithmeticError as exc:
        sys.stderr.write(json.dumps({"error": "verification failure: " + str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
