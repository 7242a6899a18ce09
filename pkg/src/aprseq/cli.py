"""Command-line front end: ``aprseq <verb> ...``.

Every verb builds one JSON-serializable record.  ``--json`` prints it as is;
otherwise a short text view of the same record is printed.  Exit status is 0
when the requested checks pass, 1 for a negative result (unattainable word,
failed suite, census violation) and 2 for unusable input.  Failures also
write a one-line JSON record to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attain import check_char0, check_necessary, classify_no_A
from .census import CensusBudgetError, CensusViolation, apr_census, census_cross_check
from .exactfield import FieldError, FieldSpec
from .minorseq import ap_rank, apr_sequence, epr_sequence, qpr_sequence
from .realize import RealizationRejected, RealizeOptions, RetryExhausted, realize_all, realize_detailed
from .symmatrix import (
    IndexSet,
    MatrixFormatError,
    SingularMatrixError,
    complement_labels,
    format_matrix,
    load_matrix,
    rank,
    schur_complement,
)
from .verify import SUITES, run_suites

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(record: dict, as_json: bool, text: str, out=None):
    out = out or sys.stdout
    if as_json:
        json.dump(record, out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"ok": False, "error": kind, "message": message}) + "\n")
    return code


def _word_arg(text: str) -> str:
    w = text.strip().upper()
    if not w or set(w) - set("ANS"):
        raise UsageError(f"word {text!r} must be a nonempty string over A, N, S")
    return w


# -- verbs ----------------------------------------------------------------------


def cmd_compute(args) -> int:
    B = load_matrix(args.file)
    want = ("apr", "epr", "qpr") if args.seq == "all" else (args.seq,)
    if args.seq == "apr" and B.n < 2:
        raise UsageError("the apr-sequence of a 1x1 matrix is undefined")
    record = {"n": B.n, "field": str(B.field), "rank": rank(B), "aprank": ap_rank(B)}
    funcs = {"apr": apr_sequence, "epr": epr_sequence, "qpr": qpr_sequence}
    for kind in want:
        record[kind] = funcs[kind](B).word if (kind != "apr" or B.n >= 2) else None
    lines = [f"{k} {record[k] if record[k] is not None else '-'}" for k in want]
    lines += [f"rank {record['rank']}", f"aprank {record['aprank']}"]
    _emit(record, args.json, "\n".join(lines))
    return EXIT_OK


def classify_word(word: str, mode: str) -> dict:
    """Verdict record for ``classify``: attainable is True, False or None."""
    record = {"word": word, "field": mode}
    if mode == "char0":
        v = check_char0(word)
        record.update(attainable=v.passes, clause=v.clause, reason=v.reason)
        return record
    if mode == "noA" and "A" in word:
        raise UsageError("--field noA classifies words over {S, N} only")
    if "A" not in word:
        form = classify_no_A(word)
        record.update(
            attainable=form.accepted,
            form=form.form.value,
            pattern=form.pattern,
            params=dict(form.params),
            reason=f"matches {form.pattern}" if form.accepted else "no admissible form for a word without A",
        )
        return record
    if len(word) == 1:
        record.update(attainable=True, clause="length-1", reason="A is attained by J_2 over every field")
        return record
    v = check_necessary(word)
    if not v:
        record.update(attainable=False, clause=None, reason=v.reason)
    else:
        record.update(attainable=None, clause=v.clause,
                      reason="undetermined: passes the necessary condition; attainability depends on the field")
    return record


def cmd_classify(args) -> int:
    record = classify_word(_word_arg(args.word), args.field)
    status = {True: "attainable", False: "not attainable", None: "undetermined"}[record["attainable"]]
    detail = record.get("pattern") or record.get("clause") or ""
    text = f"{record['word']}: {status}" + (f" ({detail})" if detail else "") + f"\n{record['reason']}"
    _emit(record, args.json, text)
    return EXIT_OK if record["attainable"] else EXIT_NO


def cmd_realize(args) -> int:
    opts = RealizeOptions(seed=args.seed, entry_bound=args.bound, max_retries=args.max_retries)
    if args.sweep is not None:
        if args.word:
            raise UsageError("give either a word or --sweep N, not both")
        report = realize_all(args.sweep, opts, workers=args.workers)
        record = report.to_json()
        c = report.counts
        text = f"n={report.n} seed={report.seed}: {c['realized']} realized, {c['rejected']} rejected, {c['failed']} failed"
        if args.out:
            Path(args.out).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
        _emit(record, args.json, text)
        return EXIT_OK if report.ok else EXIT_NO
    if not args.word:
        raise UsageError("realize needs a word or --sweep N")
    word = _word_arg(args.word)
    singular = {"any": None, "singular": True, "nonsingular": False}[args.kind]
    try:
        r = realize_detailed(word, opts=opts, singular=singular)
    except RealizationRejected as exc:
        record = {"word": word, "status": "rejected", "reason": str(exc)}
        _emit(record, args.json, f"rejected: {exc}")
        return EXIT_NO
    except RetryExhausted as exc:
        record = {"word": word, "status": "failed", "reason": str(exc), "attempts": exc.attempts}
        _emit(record, args.json, f"failed: {exc}")
        return EXIT_NO
    text_matrix = format_matrix(r.matrix)
    if args.out:
        Path(args.out).write_text(text_matrix)
    verified = apr_sequence(r.matrix).word
    record = {"word": word, "status": "realized", "route": r.route, "retries": r.retries,
              "verified_apr": verified, "matrix": text_matrix.splitlines(), "out": args.out}
    text = ("" if args.out else text_matrix) + f"verified: apr = {verified} (route {r.route}, retries {r.retries})"
    _emit(record, args.json, text)
    return EXIT_OK


def cmd_census(args) -> int:
    field = FieldSpec.parse(args.field)
    if field.is_rational:
        raise UsageError("census needs a prime field, e.g. --field gf:2")
    report = apr_census(field, args.n, engine=args.engine, workers=args.workers)
    ok = report.ok
    failure = None
    if args.n >= 2:
        try:
            census_cross_check(field, args.n, report)
        except CensusViolation as exc:
            ok, failure = False, str(exc)
    record = report.to_json(witnesses=not args.no_witnesses)
    record["ok"] = ok
    if failure:
        record["cross_check_failure"] = failure
    if args.out:
        Path(args.out).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    words = " ".join(sorted(report.sequences))
    text = (f"{field} n={args.n}: {report.matrix_count} matrices, {len(report.sequences)} apr-words"
            f"\n{words}\nviolations: {len(report.violations)}" + (f"\n{failure}" if failure else ""))
    as_json = args.json or (not args.out and args.format == "json")
    _emit(record, as_json, text)
    return EXIT_OK if ok else EXIT_NO


def _parse_gamma(text: str, n: int) -> IndexSet:
    try:
        members = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"--gamma {text!r} must be comma-separated indices") from None
    if not members or any(not 1 <= m <= n for m in members) or len(set(members)) != len(members):
        raise UsageError(f"--gamma must list distinct indices in 1..{n}")
    return IndexSet.of(n, members)


def cmd_schur(args) -> int:
    B = load_matrix(args.file)
    gamma = _parse_gamma(args.gamma, B.n)
    C = schur_complement(B, gamma)
    labels = list(complement_labels(B.n, gamma))
    rows = [[B.field.format_raw(v) for v in row] for row in C.rows]
    record = {"gamma": list(gamma.members), "labels": labels, "field": str(B.field), "matrix": rows,
              "rank_B": rank(B), "rank_C": rank(C)}
    width = max([len(str(x)) for x in labels] + [len(v) for row in rows for v in row] + [1])
    head = " " * (width + 1) + " ".join(str(x).rjust(width) for x in labels)
    body = [str(l).rjust(width) + " " + " ".join(v.rjust(width) for v in row) for l, row in zip(labels, rows)]
    text = "\n".join([f"B/B[{gamma}]", head] + body + [f"rank {record['rank_C']} = {record['rank_B']} - {len(gamma)}"])
    _emit(record, args.json, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or ["all"]
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    results = run_suites(names, args.trials, args.n_max, args.seed)
    ok = all(r.passed for r in results)
    record = {"ok": ok, "seed": args.seed, "trials": args.trials, "n_max": args.n_max,
              "suites": [r.to_json() for r in results]}
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.applicable}/{r.trials} checked")
        for f in r.failures:
            lines.append(f"  {f['detail']}")
            lines += ["    " + row for row in f["matrix"]]
    _emit(record, args.json, "\n".join(lines))
    return EXIT_OK if ok else EXIT_NO


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aprseq", description="Rank characteristic sequences of symmetric matrices.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("compute", help="apr/epr/qpr words, rank and ap-rank of a matrix file")
    c.add_argument("file")
    c.add_argument("--seq", choices=("apr", "epr", "qpr", "all"), default="all")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("classify", help="decide whether an apr-word is attainable")
    c.add_argument("word")
    c.add_argument("--field", choices=("char0", "any", "noA"), default="char0")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("realize", help="construct a rational witness matrix for a word")
    c.add_argument("word", nargs="?")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--out")
    c.add_argument("--bound", type=int, default=100, help="entry bound for random border vectors")
    c.add_argument("--max-retries", type=int, default=32)
    c.add_argument("--kind", choices=("any", "singular", "nonsingular"), default="any",
                   help="witness singularity for words over {A, S}")
    c.add_argument("--sweep", type=int, metavar="N", help="resolve every word of length N-1 instead")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_realize)

    c = sub.add_parser("census", help="enumerate all symmetric matrices over GF(p)")
    c.add_argument("--field", required=True, help="gf:p")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--out")
    c.add_argument("--engine", choices=("numpy", "scalar"), default="numpy")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--no-witnesses", action="store_true")
    c.add_argument("--format", choices=("json", "text"), default="json",
                   help="stdout format when --out is not given")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_census)

    c = sub.add_parser("schur", help="Schur complement B/B[gamma] with inherited labels")
    c.add_argument("file")
    c.add_argument("--gamma", required=True, help="comma-separated 1-based indices")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_schur)

    c = sub.add_parser("verify", help="run randomized property suites")
    c.add_argument("--suite", action="append", help=f"'all' or one of: {', '.join(SUITES)}")
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--n-max", type=int, default=7)
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except MatrixFormatError as exc:
        return _fail("matrix-format", str(exc), EXIT_USAGE)
    except (OSError, FieldError) as exc:
        return _fail("input", str(exc), EXIT_USAGE)
    except CensusBudgetError as exc:
        return _fail("budget", str(exc), EXIT_USAGE)
    except SingularMatrixError as exc:
        return _fail("singular", str(exc), EXIT_NO)
    except ValueError as exc:
        return _fail("invalid", str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
