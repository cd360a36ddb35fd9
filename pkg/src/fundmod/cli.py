"""Command-line front end.

Orderings used in every output:
  orbits / chi basis   canonical representatives (x, y, 0), lexicographic
  P and Q bases        labels (h, i, j), lexicographic, zero vectors dropped
  transition CSV       rows indexed by Q labels, columns by P labels

Exit status: 0 when every check passes, 1 when a check fails (a failure JSON
document is written to stdout), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

from .errors import ConsistencyError
from .exactfield import to_json
from .fundament import build_fundamental, transition_matrix, zeta_table
from .orbits import enumerate_orbits, phi_degeneracy_check
from .scheme import CycleScheme, krein_identities, q_polynomial_check, spectrum_report
from .tensorops import verify_s3_relations
from .verify import check_e0_bases, check_projector_vanishing, full_report, \
    terwilliger_dimension

COMMANDS = ("spectrum", "orbits", "bases", "transition", "verify", "report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fundmod",
        description="Exact workbench for the S3-symmetric tridiagonal algebra on cycles.",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "spectrum": "eigenvalues, dual eigenvalues and tridiagonal scalars (JSON)",
        "orbits": "dihedral orbit table on X^3 (JSON)",
        "bases": "chi, P and Q bases of the fundamental module (JSON)",
        "transition": "Q-from-P transition matrix (CSV)",
        "verify": "relations on V^3 and Lambda plus the conjecture suite (JSON)",
        "report": "full aggregate report (JSON)",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        p.add_argument("--diameter", type=int, required=True, help="D >= 2")
        p.add_argument("--parity", choices=("even", "odd"), required=True,
                       help="n = 2D (even) or n = 2D + 1 (odd)")
        p.add_argument("--backend", choices=("exact", "float"), default="exact")
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--max-relation-space", type=int, default=512, metavar="N",
                       help="check relations on all of V^3 only when n^3 <= N "
                            "(default 512)")
        p.add_argument("--max-float-order", type=int, default=64, metavar="N",
                       help="refuse the float backend above n = N (default 64)")
    return parser


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fundmod-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _label(lab) -> str:
    return "(" + ",".join(str(c) for c in lab) + ")"


def transition_csv(tm) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Q\\P"] + [_label(lab) for lab in tm.p_labels])
    for a, ql in enumerate(tm.q_labels):
        row = tm.coeffs[a].scalars()
        w.writerow([_label(ql)] + [json.dumps(to_json(v), separators=(",", ":"))
                                   for v in row])
    return buf.getvalue()


def _spectrum(scheme, args):
    ki = krein_identities(scheme, scheme.q)
    if not all(ki.values()):
        raise ConsistencyError(f"Krein identities failed: {ki}")
    if not q_polynomial_check(scheme.tensors):
        raise ConsistencyError("the q tensor is not tridiagonal")
    return _dumps(spectrum_report(scheme)), True


def _orbits(scheme, args):
    table = enumerate_orbits(scheme)
    phi_degeneracy_check(table)
    doc = {"n": scheme.n, "D": scheme.D, "parity": scheme.parity,
           "count": len(table), "orbits": table.to_json()}
    return _dumps(doc), True


def _bases(scheme, args):
    return _dumps(build_fundamental(scheme).to_json()), True


def _transition(scheme, args):
    fm = build_fundamental(scheme)
    return transition_csv(transition_matrix(fm, zeta_table(scheme))), True


def _verify(scheme, args):
    fm = build_fundamental(scheme)
    doc = {"n": scheme.n, "D": scheme.D, "parity": scheme.parity,
           "backend": scheme.backend}
    if scheme.n ** 3 <= args.max_relation_space:
        doc["relations_full"] = verify_s3_relations(scheme, raise_on_failure=False).to_json()
    doc["relations_lambda"] = verify_s3_relations(
        scheme, fm.orbits.chi_batch, raise_on_failure=False).to_json()
    starred, plain = check_projector_vanishing(fm, raise_on_failure=False)
    e0 = check_e0_bases(fm, raise_on_failure=False)
    doc["conjectures"] = [r.to_json() for r in (starred, plain, e0)]
    closure = terwilliger_dimension(scheme)
    doc["dim_lambda"] = fm.dimension
    doc["dim_terwilliger"] = closure.dimension
    ok = (all(doc[k]["ok"] for k in ("relations_full", "relations_lambda") if k in doc)
          and all(c["ok"] for c in doc["conjectures"])
          and closure.ok and closure.dimension == fm.dimension)
    doc["ok"] = ok
    return _dumps(doc), ok


def _report(scheme, args):
    doc = full_report(scheme.D, scheme.parity, scheme.backend,
                      max_relation_space=args.max_relation_space)
    return _dumps(doc), doc["ok"]


HANDLERS = {"spectrum": _spectrum, "orbits": _orbits, "bases": _bases,
            "transition": _transition, "verify": _verify, "report": _report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.diameter < 2:
        parser.error("--diameter must be at least 2")
    n = 2 * args.diameter + (args.parity == "odd")
    if args.backend == "float" and n > args.max_float_order:
        parser.error(f"float backend refused for n = {n} > {args.max_float_order}")
    if args.max_relation_space < 0:
        parser.error("--max-relation-space must be non-negative")
    scheme = CycleScheme(args.diameter, args.parity, args.backend)
    try:
        text, ok = HANDLERS[args.command](scheme, args)
    except ConsistencyError as exc:
        failure = {"ok": False, "command": args.command, "n": n, "D": args.diameter,
                   "parity": args.parity, "backend": args.backend,
                   "error": f"{type(exc).__name__}: {exc}"}
        sys.stdout.write(_dumps(failure))
        return 1
    if args.out:
        write_atomic(args.out, text)
        if not ok:  # the failure document always reaches stdout
            sys.stdout.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
