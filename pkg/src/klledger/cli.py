"""Command-line entry point ``kl-ledger``.

Exit codes: 0 MATCH, 1 MISMATCH, 2 INCONCLUSIVE, 3-8 module errors
(cyclo, lattice, rootdata, nichols, fusion, qseries), 64 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .errors import KLLedgerError
from .lattice import (
    DiagonalBraiding,
    IntegralLattice,
    braiding_from_charges,
    discriminant_form,
    extend_by_isotropic,
    isotropic_subgroups,
    make_subgroup,
)
from .nichols import graded_dimensions
from .qseries import (
    DEFAULT_SCHEDULE,
    WeightData,
    asymptotic_dim,
    expected_asymptotic_dim,
    false_theta_character,
    quantum_dimension_of_Fock,
)
from .report import SCHEMA, discriminant_summary, run_kl_verify
from .rootdata import build, parse_type

EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _schedule(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad t-schedule {text!r}") from exc
    if any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("t values must be positive")
    return values


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--stable", action="store_true", help="omit timings so reports are byte-identical")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: $KL_LEDGER_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kl-ledger", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kv = sub.add_parser("kl-verify", help="full pipeline and dimension verdict")
    kv.add_argument("type", help="root system, e.g. A2")
    kv.add_argument("p", type=int)
    kv.add_argument("--cutoff", type=int, default=12)
    kv.add_argument("--t-schedule", type=_schedule, default=list(DEFAULT_SCHEDULE))
    kv.add_argument("--tolerance", type=float, default=0.05, help="relative tolerance on qdim vs dimB")
    kv.add_argument("--allow-degenerate", action="store_true", help="accept charges with (a, a) = 2")
    kv.add_argument("--model-order", type=int, default=1, choices=(1, 2))
    _common(kv)

    ni = sub.add_parser("nichols", help="graded dimensions of a diagonal Nichols algebra")
    ni.add_argument("--q-matrix", required=True, metavar="FILE")
    ni.add_argument("--cutoff", type=int, default=12)
    _common(ni)

    la = sub.add_parser("lattice", help="discriminant form tools")
    la.add_argument("action", choices=("disc", "isotropic", "extend"))
    la.add_argument("--gram", required=True, metavar="FILE")
    la.add_argument("--subgroup", help="generators as 'a,b;c,d' in SNF coordinates (extend)")
    la.add_argument("--allow-degenerate", action="store_true")
    _common(la)

    ch = sub.add_parser("character", help="false theta character and cusp asymptotics")
    ch.add_argument("type")
    ch.add_argument("p", type=int)
    ch.add_argument("--s", type=_int_list, default=None, help="lambda_bar parameters s_i in [0, p-1]")
    ch.add_argument("--lam-hat", type=_int_list, default=None)
    ch.add_argument("--cutoff", type=int, default=10)
    ch.add_argument("--t-schedule", type=_schedule, default=list(DEFAULT_SCHEDULE))
    ch.add_argument("--weighting", choices=("singlet", "dimension"), default="singlet")
    ch.add_argument("--model-order", type=int, default=1, choices=(1, 2))
    _common(ch)
    return parser


# ------------------------------------------------------------ io


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(report: dict, path: str | None) -> None:
    if not path:
        return
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _table(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _say(args, text: str) -> None:
    if args.json != "-":
        print(text)


# ------------------------------------------------------------ commands


def cmd_kl_verify(args) -> int:
    if args.cutoff < 1:
        raise UsageError("--cutoff must be >= 1")
    if len(args.t_schedule) < 3:
        raise UsageError("--t-schedule needs at least 3 values")
    if args.p < 1:
        raise UsageError("p must be a positive integer")
    report, code = run_kl_verify(
        args.type,
        args.p,
        cutoff=args.cutoff,
        schedule=args.t_schedule,
        tolerance=args.tolerance,
        allow_degenerate=args.allow_degenerate,
        threads=args.threads,
        stable=args.stable,
        model_order=args.model_order,
    )
    v = report["verdict"]
    nic = report["nichols"]
    lines = [
        f"kl-verify {report['input']['type']} p={args.p}",
        f"  |Gamma| = {report['discriminant']['order']}  factors {report['discriminant']['factors']}",
        f"  Nichols by degree: {nic['by_total_degree']}  status {nic['status']['kind']}",
    ]
    if report.get("asymptotics"):
        qd = report["asymptotics"]["quantum_dimension"]
        lines.append(f"  qdim = {qd['value']:.6f} +- {qd['error']:.3g}")
    lines.append(f"  verdict: {v['text']}")
    lines.append("  standing hypotheses:")
    lines.extend(f"    - {h}" for h in report["hypotheses"])
    _say(args, "\n".join(lines))
    _emit(report, args.json)
    return code


def cmd_nichols(args) -> int:
    payload = _load_json(args.q_matrix)
    try:
        q = DiagonalBraiding.from_json(payload)
    except (KeyError, ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad q-matrix file: {exc}") from exc
    table = graded_dimensions(q, args.cutoff)
    report = {"schema": SCHEMA, "command": "nichols", "table": table.to_json()}
    rows = [(m, d) for m, d in enumerate(table.by_total_degree)]
    status = table.status
    summary = f"status {status['kind']}"
    if table.finite:
        summary += f", total {table.total}, top degree {table.top_degree}"
    _say(args, _table(rows, ("degree", "dim")) + "\n" + summary)
    _emit(report, args.json)
    return 0


def _parse_subgroup(text: str) -> list[tuple[int, ...]]:
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad subgroup {text!r}") from exc


def cmd_lattice(args) -> int:
    payload = _load_json(args.gram)
    try:
        lattice = IntegralLattice([[Fraction(x) for x in row] for row in payload["gram"]])
        charges = payload.get("charges")
    except (KeyError, ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad lattice file: {exc}") from exc
    form = discriminant_form(lattice)
    report: dict = {"schema": SCHEMA, "command": f"lattice {args.action}", "discriminant": discriminant_summary(form)}
    if charges:
        q = braiding_from_charges(lattice, [[Fraction(x) for x in c] for c in charges], args.allow_degenerate)
        report["braiding"] = q.to_json()
    out = [f"Gamma = " + (" x ".join(f"Z/{d}" for d in form.factors) or "0") + f"  (order {form.order})"]
    if args.action == "disc":
        rows = [(i, d, str(form.q_diag[i])) for i, d in enumerate(form.factors)]
        out.append(_table(rows, ("gen", "order", "q mod 2")))
    elif args.action == "isotropic":
        subs = isotropic_subgroups(form)
        report["isotropic_subgroups"] = [[list(a) for a in s.sorted_elements()] for s in subs]
        out.append(_table([(s.order, " ".join(map(str, s.sorted_elements()))) for s in subs], ("order", "elements")))
    else:
        subs = [make_subgroup(form, _parse_subgroup(args.subgroup))] if args.subgroup else isotropic_subgroups(form)
        rows, ext = [], []
        for s in subs:
            local = extend_by_isotropic(form, s)
            ext.append({"subgroup": [list(a) for a in s.sorted_elements()], "local": local.to_json()})
            rows.append((s.order, list(local.factors), [str(x) for x in local.q_diag], local.order))
        report["extensions"] = ext
        out.append(_table(rows, ("|I|", "I-perp/I", "q mod 2", "order")))
    _say(args, "\n".join(out))
    _emit(report, args.json)
    return 0


def cmd_character(args) -> int:
    t, n = parse_type(args.type)
    R = build(t, n)
    if args.p < 2:
        raise UsageError("character needs p >= 2")
    s = args.s or (0,) * R.rank
    lam_hat = args.lam_hat or (0,) * R.rank
    if len(s) != R.rank or len(lam_hat) != R.rank:
        raise UsageError(f"--s and --lam-hat need {R.rank} entries")
    if len(args.t_schedule) < 3:
        raise UsageError("--t-schedule needs at least 3 values")
    weight = WeightData(tuple(s), tuple(lam_hat))
    ft = false_theta_character(R, args.p, weight, args.cutoff, weighting="dimension")
    full = ft.full_character(args.cutoff)
    est = asymptotic_dim(R, args.p, weight, args.t_schedule, args.model_order, args.weighting, args.threads)
    report: dict = {
        "schema": SCHEMA,
        "command": "character",
        "input": {"type": R.label, "p": args.p, "s": list(s), "lam_hat": list(lam_hat), "cutoff": args.cutoff},
        "eta_power_times_character": ft.theta.to_json(),
        "character": full.to_json(),
        "assumption_ok": ft.assumption_ok,
        "notes": ft.notes,
        "estimate": est.to_json(),
        "expected": str(expected_asymptotic_dim(R, args.p, weight)),
    }
    lines = [f"character {R.label} p={args.p} s={list(s)} lam_hat={list(lam_hat)}"]
    lines.append(_table([(str(e), str(c)) for e, c in list(ft.theta.terms.items())[:12]], ("exponent", "coeff")))
    lines.append(_table([(x["t"], f"{x['value']:.10f}", f"{x['tail_bound']:.2e}") for x in est.samples], ("t", "value", "tail_bound")))
    lines.append(f"estimate {est.value:.6f} +- {est.error:.3g}  (expected {report['expected']})")
    if weight.lam_hat == (0,) * R.rank:
        qd = quantum_dimension_of_Fock(R, args.p, weight, args.t_schedule, args.model_order, vacuum=est)
        report["quantum_dimension"] = qd.to_json()
        lines.append(f"Fock quantum dimension {qd.value:.6f} +- {qd.error:.3g}")
    _say(args, "\n".join(lines))
    _emit(report, args.json)
    return 0


COMMANDS = {"kl-verify": cmd_kl_verify, "nichols": cmd_nichols, "lattice": cmd_lattice, "character": cmd_character}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kl-ledger: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KLLedgerError as exc:
        print(f"kl-ledger: {exc.module} error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
