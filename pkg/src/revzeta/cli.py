"""Command-line front end.

Exit statuses: 0 success, 1 usage error, 2 validation failure,
3 brute-force budget exceeded, 4 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fixtures
from .bruteforce import BudgetExceeded
from .exact_algebra import IntMatrix, fraction_to_str
from .group_g2r import coset_enumeration_index, enumerate_subgroups, subgroup_fixed_spec
from .sft_reversal import ReversalSFT, ValidationError, validate
from .sofic_reversal import (
    ChainPropertyError,
    InclusionExclusionViolated,
    LabeledPresentation,
    build_joint_state_chain,
    mask_names,
)
from .zeta import (
    artin_mazur,
    flip_zeta,
    generating_g,
    lind_zeta_direct,
    lind_zeta_product,
    ordinary_gf_rational,
    providers_for,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_BUDGET, EXIT_INCONSISTENT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InconsistencyError(Exception):
    pass


class DocumentError(ValueError):
    """Schema violations of a system document, all of them."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# --------------------------------------------------------------------------
# documents


@dataclass(frozen=True)
class SystemDocument:
    kind: str
    order: int
    alphabet: tuple[str, ...] = ()
    A: tuple[tuple[int, ...], ...] = ()
    J: tuple[tuple[int, ...], ...] = ()
    states: tuple[str, ...] = ()
    edges: tuple[tuple[str, str, str], ...] = ()
    label_alphabet: tuple[str, ...] = ()
    tau: tuple[tuple[str, str], ...] = field(default=())

    def to_json(self) -> dict:
        if self.kind == "sft":
            return {
                "kind": "sft",
                "order": self.order,
                "alphabet": list(self.alphabet),
                "A": [list(r) for r in self.A],
                "J": [list(r) for r in self.J],
            }
        return {
            "kind": "sofic",
            "order": self.order,
            "states": list(self.states),
            "label_alphabet": list(self.label_alphabet),
            "edges": [{"from": p, "to": q, "label": a} for p, q, a in self.edges],
            "tau": dict(self.tau),
        }

    def build(self):
        """The validated system; raises :class:`ValidationError`."""
        r = self.order // 2
        if self.kind == "sft":
            return validate(IntMatrix.of(self.A), IntMatrix.of(self.J), r, self.alphabet)
        return LabeledPresentation.build(
            self.edges, dict(self.tau), r, states=self.states, labels=self.label_alphabet
        )

    @classmethod
    def from_system(cls, system) -> SystemDocument:
        return parse_system(json.dumps(system.to_document()))


def emit(doc: SystemDocument) -> str:
    return json.dumps(doc.to_json(), indent=2)


def _is_matrix(x) -> bool:
    return isinstance(x, list) and all(isinstance(r, list) for r in x)


def parse_system(source) -> SystemDocument:
    """Parse a JSON system document from text or a path; reports every violation."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        path = Path(source)
        if not path.exists() and str(source) in fixtures.builtin_names():
            return SystemDocument.from_system(fixtures.builtin(str(source)))
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DocumentError([f"cannot read {source}: {exc.strerror}"]) from None
    else:
        text = source
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}"]) from None
    if not isinstance(raw, dict):
        raise DocumentError(["document must be a JSON object"])
    errs: list[str] = []
    kind = raw.get("kind")
    if kind not in ("sft", "sofic"):
        errs.append(f"kind must be 'sft' or 'sofic', got {kind!r}")
    order = raw.get("order")
    if not isinstance(order, int) or isinstance(order, bool) or order < 2 or order % 2:
        errs.append(f"order must be an even integer >= 2, got {order!r}")
        order = 0
    if kind == "sft":
        doc = _parse_sft(raw, order, errs)
    elif kind == "sofic":
        doc = _parse_sofic(raw, order, errs)
    else:
        doc = None
    if errs:
        raise DocumentError(errs)
    return doc


def _parse_sft(raw, order, errs) -> SystemDocument | None:
    A, J = raw.get("A"), raw.get("J")
    shapes = {}
    for name, M in (("A", A), ("J", J)):
        if not _is_matrix(M) or not M:
            errs.append(f"{name} must be a nonempty array of rows")
            continue
        widths = {len(r) for r in M}
        if len(widths) != 1:
            errs.append(f"{name} has rows of different lengths {sorted(widths)}")
            continue
        w = widths.pop()
        if w != len(M):
            errs.append(f"dimension mismatch: {name} is {len(M)}x{w}, not square")
        shapes[name] = (len(M), w)
        for i, row in enumerate(M):
            for j, v in enumerate(row):
                if v not in (0, 1) or isinstance(v, bool):
                    errs.append(f"{name}[{i}][{j}] = {v!r} is not 0 or 1")
    if len(shapes) == 2 and shapes["A"] != shapes["J"]:
        errs.append(f"dimension mismatch: A is {shapes['A'][0]}x{shapes['A'][1]}, J is {shapes['J'][0]}x{shapes['J'][1]}")
    n = shapes.get("A", (0,))[0]
    alphabet = raw.get("alphabet")
    if alphabet is None:
        alphabet = [str(i + 1) for i in range(n)]
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        errs.append("alphabet must be a list of strings")
        alphabet = []
    elif n and len(alphabet) != n:
        errs.append(f"dimension mismatch: alphabet has {len(alphabet)} symbols, A is {n}x{n}")
    elif len(set(alphabet)) != len(alphabet):
        errs.append("alphabet symbols must be distinct")
    if errs:
        return None
    return SystemDocument(
        "sft", order, tuple(alphabet), tuple(tuple(r) for r in A), tuple(tuple(r) for r in J)
    )


def _parse_sofic(raw, order, errs) -> SystemDocument | None:
    states = raw.get("states")
    labels = raw.get("label_alphabet")
    edges = raw.get("edges")
    tau = raw.get("tau")
    if not isinstance(states, list) or not states or not all(isinstance(s, str) for s in states):
        errs.append("states must be a nonempty list of strings")
        states = []
    if not isinstance(labels, list) or not labels or not all(isinstance(a, str) for a in labels):
        errs.append("label_alphabet must be a nonempty list of strings")
        labels = []
    parsed = []
    if not isinstance(edges, list):
        errs.append("edges must be a list of {from, to, label} objects")
        edges = []
    for i, e in enumerate(edges):
        if not isinstance(e, dict) or not {"from", "to", "label"} <= set(e):
            errs.append(f"edge {i} must have from, to and label")
            continue
        p, q, a = str(e["from"]), str(e["to"]), str(e["label"])
        if states and (p not in states or q not in states):
            errs.append(f"edge {i} uses an unknown state")
        if labels and a not in labels:
            errs.append(f"edge {i} uses unknown label {a!r}")
        parsed.append((p, q, a))
    if not isinstance(tau, dict):
        errs.append("tau must be an object mapping labels to labels")
        tau = {}
    else:
        missing = [a for a in labels if a not in tau]
        if missing:
            errs.append(f"tau is not bijective: undefined on {missing}")
        extra = [a for a in tau if a not in labels]
        if extra:
            errs.append(f"tau mentions unknown labels {extra}")
        images = [tau[a] for a in labels if a in tau]
        if sorted(images) != sorted(set(images)) or any(b not in labels for b in images):
            errs.append("tau is not bijective on label_alphabet")
    if errs:
        return None
    return SystemDocument(
        "sofic",
        order,
        states=tuple(states),
        edges=tuple(parsed),
        label_alphabet=tuple(labels),
        tau=tuple((a, tau[a]) for a in labels),
    )


# --------------------------------------------------------------------------
# reports


def _fmt_table(header: list[str], rows: list[list]) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cols]
    return "\n".join(lines)


def _load(path):
    try:
        doc = parse_system(path)
    except DocumentError as exc:
        raise ValidationError("\n".join(exc.violations)) from None
    return doc, doc.build()


def cmd_validate(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    if isinstance(system, ReversalSFT):
        report = {
            "kind": "sft",
            "valid": True,
            "order": 2 * system.r,
            "alphabet": list(system.alphabet),
            "checks": ["zero-one", "J permutation", f"J^{2 * system.r} = I", "AJ = JA^T", "A(a,b) = A(tau b, tau a)", "A J^2l = J^2l A"],
        }
        text = f"valid reversal SFT of order {2 * system.r} on {system.size} symbols"
    else:
        chain = build_joint_state_chain(system)
        report = {"kind": "sofic", "valid": True, "order": 2 * system.r, "certificate": chain.certificate}
        text = f"valid sofic reversal system of order {2 * system.r}; joint state chain passes P1-P3"
    return report, text


def cmd_counts(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    backends = providers_for(system)
    r = system.r
    rows, table = [], {}
    mismatch = None
    for m in range(1, args.m_max + 1):
        row = [m]
        for l in range(r):
            vals = {b.name: b.fixed_count(m, l) for b in backends}
            table.setdefault(str(l), []).append(vals)
            if len(set(vals.values())) > 1 and mismatch is None:
                mismatch = {"m": m, "l": l, "values": vals}
            row.append(next(iter(vals.values())))
        rows.append(row)
    report = {"order": 2 * r, "backends": [b.name for b in backends], "counts": table, "agree": mismatch is None}
    if mismatch:
        report["first_mismatch"] = mismatch
    text = _fmt_table(["m"] + [f"f(m,{2 * l})" for l in range(r)], rows)
    text += "\nbackends: " + ", ".join(b.name for b in backends) + (" (all agree)" if mismatch is None else f" MISMATCH {mismatch}")
    if mismatch:
        raise InconsistencyError(text)
    return report, text


def cmd_gf(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    cp = providers_for(system)[0]
    g = generating_g(cp, args.order, args.convention)
    report = {"convention": args.convention, "coefficients": g.to_strings()}
    text = f"g ({args.convention}) = " + ", ".join(g.to_strings())
    if args.rational:
        if not isinstance(system, ReversalSFT):
            raise UsageError("--rational is available for SFT systems")
        forms = {}
        for l in range(system.r):
            rf = ordinary_gf_rational(system, l)
            forms[str(l)] = rf.to_json()
            text += f"\nsum_m f(m,{2 * l}) t^m = {rf}"
        report["rational"] = forms
    return report, text


def cmd_zeta(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    N = args.order
    results = {}
    if args.method in ("product", "both"):
        results["product"] = lind_zeta_product(system, N)
    if args.method in ("direct", "both"):
        results["direct"] = lind_zeta_direct(system, N)
    if args.method == "artin-mazur":
        results["artin-mazur"] = artin_mazur(system, N)
    if args.method == "flip":
        results["flip"] = flip_zeta(system, N)
    report = {k: v.to_json() for k, v in results.items()}
    lines = []
    for k, v in results.items():
        lines.append(f"[{k}] {v.provenance}")
        for f in v.factors:
            expo = f" = ({f.base})(t^{f.power})^{fraction_to_str(f.exponent)}" if f.base is not None else ""
            lines.append(f"  factor exp({fraction_to_str(f.scale)} * {f.kind}_{f.subsystem}(t^{f.power})){expo}")
        if v.closed_form is not None:
            lines.append(f"  closed form {v.closed_form}")
        for i, c in enumerate(v.series.to_strings()):
            lines.append(f"  c_{i} = {c}")
    if args.method == "both":
        agree = results["product"].series == results["direct"].series
        report["agree"] = agree
        lines.append("all agree" if agree else "MISMATCH between product and direct")
        if not agree:
            raise InconsistencyError("\n".join(lines))
    return report, "\n".join(lines)


def cmd_subgroups(args) -> tuple[dict, str]:
    if args.r < 1 or args.index_max < 0:
        raise UsageError("--r must be positive and --index-max non-negative")
    subs = enumerate_subgroups(args.r, args.index_max)
    items = []
    for d, idx in subs:
        spec = subgroup_fixed_spec(d)
        entry = {
            "descriptor": str(d),
            "index": idx,
            "generators": [str(g) for g in d.generators()],
            "conditions": [list(c) for c in spec.conditions],
        }
        if args.verify:
            entry["coset_index"] = coset_enumeration_index(d.generators(), args.r, 8 * idx + 16)
        items.append(entry)
    report = {"r": args.r, "index_max": args.index_max, "count": len(items), "subgroups": items}
    rows = [[e["index"], e["descriptor"], ", ".join(e["generators"])] + ([e["coset_index"]] if args.verify else []) for e in items]
    header = ["index", "subgroup", "generators"] + (["coset index"] if args.verify else [])
    text = _fmt_table(header, rows) + f"\n{len(items)} subgroups"
    if args.verify and any(e["coset_index"] != e["index"] for e in items):
        raise InconsistencyError(text + "\ncoset enumeration disagrees with the closed-form index")
    return report, text


def cmd_jsc(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    if isinstance(system, ReversalSFT):
        from .sofic_reversal import presentation_from_sft, trim_essential

        system = trim_essential(presentation_from_sft(system))
    chain = build_joint_state_chain(system)
    p = chain.presentation
    names = chain.describe()
    report = {
        "futures": [mask_names(p, F) for F in chain.futures],
        "pasts": [mask_names(p, P) for P in chain.pasts],
        "joint_states": names,
        "A": chain.system.A.to_lists(),
        "J": chain.system.J.to_lists(),
        "labeling": [p.labels[a] for a in chain.labeling],
        "certificate": chain.certificate,
    }
    lines = [f"{len(chain.futures)} futures, {len(chain.pasts)} pasts, {len(names)} essential joint states"]
    lines += [f"  j{i} = {s}" for i, s in enumerate(names)]
    lines.append("certificate: " + ", ".join(f"{k} {'pass' if chain.certificate[k]['pass'] else 'FAIL'}" for k in ("P1", "P2", "P3")))
    return report, "\n".join(lines)


def cmd_crosscheck(args) -> tuple[dict, str]:
    doc, system = _load(args.system)
    N = args.order
    backends = providers_for(system)
    checks = []

    def record(name, a, b):
        checks.append({"check": name, "agree": a == b})
        return a == b

    base, other = backends
    for m in range(1, N + 1):
        for l in range(system.r):
            if not record(f"f({m},{2 * l}) {base.name} vs {other.name}", base.fixed_count(m, l), other.fixed_count(m, l)):
                break
    fa, fb = base.flip(1), other.flip(1)
    if fa is not None:
        for m in range(1, N // 2 + 1):
            record(f"flip counts m={m}", fa.flip_counts(m), fb.flip_counts(m))
    prod, direct = lind_zeta_product(system, N), lind_zeta_direct(system, N)
    record(f"lind zeta product vs direct to t^{N}", prod.series, direct.series)
    if isinstance(system, ReversalSFT):
        for l in range(system.r):
            rf = ordinary_gf_rational(system, l).expand(N)
            record(f"ordinary gf l={l} vs trace counts", [int(c) for c in rf.coeffs[1:]], [base.fixed_count(m, l) for m in range(1, N + 1)])
    bad = [c for c in checks if not c["agree"]]
    report = {"checks": checks, "all_agree": not bad}
    if bad:
        raise InconsistencyError(f"first mismatch: {bad[0]['check']}")
    return report, f"{len(checks)} checks: all agree"


def cmd_example(args) -> tuple[dict, str]:
    system = fixtures.builtin(args.name)
    doc = SystemDocument.from_system(system)
    text = emit(doc)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        return {"written": args.output, "name": args.name}, f"wrote {args.name} to {args.output}"
    return doc.to_json(), text


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="revzeta", description="Zeta functions of shift-reversal systems of finite order.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_arg(p):
        p.add_argument("system", help="JSON system file, or a built-in name such as paper-example-6")
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("validate", help="check a system and print its certificate")
    system_arg(p)
    p = sub.add_parser("counts", help="table of f(m,2l) from every backend")
    system_arg(p)
    p.add_argument("--m-max", type=int, default=8)
    p = sub.add_parser("gf", help="generating function of the fixed-point counts")
    system_arg(p)
    p.add_argument("--convention", choices=["log", "ordinary"], default="log")
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--rational", action="store_true", help="closed rational forms (SFT only)")
    p = sub.add_parser("zeta", help="Lind zeta function")
    system_arg(p)
    p.add_argument("--method", choices=["direct", "product", "both", "artin-mazur", "flip"], default="both")
    p.add_argument("--order", type=int, default=10)
    p = sub.add_parser("subgroups", help="finite-index subgroups of the group of order-2r reversals")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--index-max", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="check every index by coset enumeration")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p = sub.add_parser("jsc", help="joint state chain of a sofic system")
    system_arg(p)
    p = sub.add_parser("crosscheck", help="compare every pair of backends")
    system_arg(p)
    p.add_argument("--order", type=int, default=8)
    p = sub.add_parser("example", help="write a built-in system as JSON")
    p.add_argument("--name", default="paper-example-6", choices=fixtures.builtin_names())
    p.add_argument("--output", "-o")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return ap


COMMANDS = {
    "validate": cmd_validate,
    "counts": cmd_counts,
    "gf": cmd_gf,
    "zeta": cmd_zeta,
    "subgroups": cmd_subgroups,
    "jsc": cmd_jsc,
    "crosscheck": cmd_crosscheck,
    "example": cmd_example,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    for name in ("order", "m_max"):
        if getattr(args, name, 1) < 0:
            print(f"revzeta: error: --{name.replace('_', '-')} must be non-negative", file=sys.stderr)
            return EXIT_USAGE
    try:
        report, text = COMMANDS[args.command](args)
        status = EXIT_OK
    except UsageError as exc:
        print(f"revzeta: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, DocumentError) as exc:
        report, text, status = {"error": "validation", "message": str(exc)}, f"validation failed: {exc}", EXIT_INVALID
    except BudgetExceeded as exc:
        report, text, status = {"error": "budget", "message": str(exc)}, f"budget exceeded: {exc}", EXIT_BUDGET
    except (InconsistencyError, ChainPropertyError, InclusionExclusionViolated) as exc:
        report, text, status = {"error": "inconsistent", "message": str(exc)}, f"internal consistency failure: {exc}", EXIT_INCONSISTENT
    if args.json:
        out.write(json.dumps(report, indent=2, default=str) + "\n")
    else:
        out.write(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
