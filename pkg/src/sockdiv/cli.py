"""Command-line front end.

Exit codes: 0 success, 1 internal or contract failure (including
IncompleteMatching), 2 validation or parse error, 3 negative certificate.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

from . import equivariance as eq
from .core import (
    ShoeInstance,
    SockBundle,
    SockInstance,
    is_bundle_isomorphism,
    product_with_slots,
    trivial_bundle,
)
from .errors import ContractError, NoEquivariantDivider, SockDivError, ValidationError
from .fileio import (
    automorphism_from_json,
    automorphism_to_json,
    certificate_from_json,
    certificate_to_json,
    decode_bijection,
    decode_element,
    dumps,
    emit_instance,
    encode_bijection,
    encode_element,
    format_element,
    instance_from_json,
    instance_to_json,
    parse_instance,
)
from .reductions import (
    LinearOrder,
    PairFamily,
    choice_from_sock_divider,
    columns_bundle,
    doubled_instance,
    grid_instance,
    mra_from_sock_divider,
    rows_bundle,
    sock_divide_from_mra,
    strong_divisibility_witness,
    trivialize_with_order,
    weak_divisibility_witness,
)
from .shoe import shoe_divide, verify_division

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_NEGATIVE = 0, 1, 2, 3


class UsageError(ValidationError):
    pass


@dataclass
class RunReport:
    command: list
    digest: str | None = None
    result: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    exit_code: int = EXIT_OK
    error: str | None = None
    json_mode: bool = field(default=False, repr=False)

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "digest": self.digest,
            "result": self.result,
            "verification": self.verification,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "exit_code": self.exit_code,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_text(self) -> str:
        lines = [f"command: {' '.join(self.command)}"]
        if self.digest:
            lines.append(f"digest: {self.digest}")
        if self.error is not None:
            lines.append(f"error: {self.error}")
        if self.result:
            lines.append(f"result: {self.result.get('type')}")
            lines.extend("  " + line for line in _describe(self.result))
        for name, ok in self.verification.items():
            lines.append(f"verify {name}: {'ok' if ok else 'FAILED'}")
        lines.append(f"elapsed: {self.elapsed_ms:.1f} ms")
        return "\n".join(lines)


def _fmt(v) -> str:
    return format_element(decode_element(v))


def _describe(result: dict) -> list:
    kind = result.get("type")
    if kind in ("matching", "bijection", "mra", "trivialization", "invariant-bijection"):
        out = [f"{_fmt(x)} -> {_fmt(y)}" for x, y in result["pairs"]]
        if "rounds" in result:
            out.append(f"rounds: {result['rounds']}, method: {result['method']}")
        for ev in result.get("trace", []):
            out.append("event: " + " ".join(str(_fmt(v)) for v in ev))
        return out
    if kind == "choice":
        return [f"{_fmt(i)}: {_fmt(x)}" for i, x in result["selection"]]
    if kind == "bundle":
        return [emit_instance(instance_from_json(result["bundle"]).payload).strip()]
    if kind == "certificate":
        out = []
        for w in result["certificate"]["witnesses"]:
            out.append("automorphism on left:  " + _perm_text(w["onLeft"]))
            out.append("automorphism on right: " + _perm_text(w["onRight"]))
            out.append("induced on A: " + _perm_text(w["inducedOnA"]))
            out.append("induced on B: " + _perm_text(w["inducedOnB"]))
        out.append("no bijection A -> B commutes with these induced actions")
        return out
    if kind == "automorphisms":
        return [f"group order: {len(result['group'])}"] + [
            "  " + _perm_text(g.get("onLeft", g.get("onA"))) + " | " + _perm_text(g.get("onRight", g.get("onB")))
            for g in result["group"]
        ]
    if kind == "divisibility":
        if not result["divisible"]:
            return [f"not divisible by {result['n']}"]
        return [f"divisible by {result['n']} ({result['mode']})", f"witness: {dumps(result['witness'])}"]
    return [f"{k}: {v}" for k, v in result.items() if k != "type"]


def _perm_text(pairs) -> str:
    """Cycle notation, fixed points omitted."""
    mapping = {decode_element(x): decode_element(y) for x, y in pairs}
    seen, cycles = set(), []
    for x in mapping:
        if x in seen or mapping[x] == x:
            seen.add(x)
            continue
        cyc = []
        while x not in seen:
            seen.add(x)
            cyc.append(format_element(x))
            x = mapping[x]
        cycles.append("(" + " ".join(cyc) + ")")
    return "".join(cycles) or "identity"


def _digest(payload) -> str:
    return "sha256:" + hashlib.sha256(emit_instance(payload).encode("utf-8")).hexdigest()


def _expect(inst_file, *kinds):
    if inst_file.kind not in kinds:
        raise UsageError(f"expected a {' or '.join(kinds)} file, got {inst_file.kind!r}")
    return inst_file.payload


def _oracle(name: str):
    return eq.cheating_sock_divider() if name == "cheating" else eq.equivariant_sock_divider()


def _carrier(payload):
    if isinstance(payload, ShoeInstance):
        return payload.A
    if isinstance(payload, SockInstance):
        return payload.left.total_space
    if isinstance(payload, PairFamily):
        return payload.socks
    return payload.total_space


def _search_target(payload):
    if isinstance(payload, SockInstance):
        return payload
    if isinstance(payload, PairFamily):
        return grid_instance(payload)
    if isinstance(payload, SockBundle):
        return doubled_instance(payload)
    raise UsageError("search-equivariant needs a sock, pair-family or bundle file")


# -- commands ---------------------------------------------------------------


def cmd_validate(args, inst_file, report):
    report.result = {"type": "validated", "kind": inst_file.kind}


def cmd_divide(args, inst_file, report):
    inst = _expect(inst_file, "shoe")
    res = shoe_divide(inst, trace=args.trace, complete=not args.strict)
    report.result = {
        "type": "matching",
        "pairs": encode_bijection(res.matching),
        "rounds": res.rounds,
        "method": res.method,
    }
    if args.trace:
        report.result["trace"] = [[encode_element(v) for v in ev] for ev in res.trace]


def _bundle_cmd(builder):
    def run(args, inst_file, report):
        fam = _expect(inst_file, "pair-family")
        report.result = {"type": "bundle", "bundle": instance_to_json(builder(fam))}

    return run


def cmd_choose(args, inst_file, report):
    fam = _expect(inst_file, "pair-family")
    choice = choice_from_sock_divider(fam, _oracle(args.oracle))
    report.result = {
        "type": "choice",
        "oracle": args.oracle,
        "selection": [[encode_element(i), encode_element(choice.selection[i])] for i in fam.order],
    }


def cmd_mra(args, inst_file, report):
    bundle = _expect(inst_file, "bundle")
    g = mra_from_sock_divider(bundle, _oracle(args.oracle))
    report.result = {"type": "mra", "oracle": args.oracle, "pairs": encode_bijection(g)}


def cmd_sockdivide(args, inst_file, report):
    inst = _expect(inst_file, "sock")
    report.result = {"type": "bijection", "pairs": encode_bijection(sock_divide_from_mra(inst))}


def cmd_trivialize(args, inst_file, report):
    bundle = _expect(inst_file, "bundle")
    labels = [s for s in args.order.split(",") if s] if args.order else []
    try:
        order = LinearOrder.from_sequence(labels)
    except ValidationError as exc:
        raise UsageError(f"--order: {exc}")
    if order.carrier != bundle.base:
        raise UsageError("--order must list every base element exactly once")
    f = mra_from_sock_divider(bundle, _oracle(args.oracle))
    t = trivialize_with_order(bundle, order, f)
    report.result = {
        "type": "trivialization",
        "order": labels,
        "f": encode_bijection(f),
        "pairs": encode_bijection(t),
    }


def cmd_divisible(args, inst_file, report):
    carrier = _carrier(inst_file.payload)
    if args.weak:
        w = weak_divisibility_witness(carrier, args.n)
        witness = None if w is None else instance_to_json(w)
    else:
        w = strong_divisibility_witness(carrier, args.n)
        witness = None if w is None else {
            "B": [encode_element(b) for b in sorted(w[0])],
            "pairing": encode_bijection(w[1]),
        }
    report.result = {
        "type": "divisibility",
        "mode": "weak" if args.weak else "strong",
        "n": args.n,
        "divisible": w is not None,
        "witness": witness,
    }


def cmd_search(args, inst_file, report):
    inst = _search_target(inst_file.payload)
    found = eq.search_equivariant_sock_divider(inst)
    if isinstance(found, eq.NonexistenceCertificate):
        report.result = {"type": "certificate", "certificate": certificate_to_json(found)}
        report.exit_code = EXIT_NEGATIVE
    else:
        report.result = {"type": "invariant-bijection", "pairs": encode_bijection(found)}


def cmd_automorphisms(args, inst_file, report):
    payload = inst_file.payload
    if isinstance(payload, ShoeInstance):
        group = [
            {"onA": encode_bijection(r.onA), "onB": encode_bijection(r.onB)}
            for r in eq.shoe_automorphisms(payload)
        ]
    else:
        inst = _search_target(payload)
        group = [automorphism_to_json(p) for p in eq.automorphisms_of_sock_instance(inst)]
    report.result = {"type": "automorphisms", "group": group}


def cmd_enumerate(args, report):
    if args.family == "shoe":
        stream = eq.enumerate_shoe_instances(args.size, args.n, args.budget)
    else:
        stream = eq.enumerate_sock_instances(args.size, args.n, args.budget)
    count = 0
    tally = {"failures": 0}
    for inst in stream:
        count += 1
        if not args.run_suite:
            continue
        if args.family == "shoe":
            res = shoe_divide(inst)
            if not verify_division(inst, res.matching):
                tally["failures"] += 1
            tally["completed"] = tally.get("completed", 0) + bool(res.completed)
            rep = eq.check_divider_equivariance(shoe_divide, [inst])
            tally["relabelings"] = tally.get("relabelings", 0) + rep.checked
            tally["violations"] = tally.get("violations", 0) + len(rep.violations)
        else:
            found = eq.search_equivariant_sock_divider(inst)
            key = "certificates" if isinstance(found, eq.NonexistenceCertificate) else "invariant"
            tally[key] = tally.get(key, 0) + 1
            g = sock_divide_from_mra(inst)
            if g.domain != inst.left.base or g.codomain != inst.right.base:
                tally["failures"] += 1
    report.result = {"type": "enumeration", "family": args.family, "size": args.size, "n": args.n, "count": count}
    if args.run_suite:
        report.result["suite"] = tally
        report.verification["suite"] = tally["failures"] == 0 and tally.get("violations", 0) == 0
        if not report.verification["suite"]:
            report.exit_code = EXIT_INTERNAL


COMMANDS = {
    "validate": cmd_validate,
    "divide": cmd_divide,
    "rows": _bundle_cmd(rows_bundle),
    "columns": _bundle_cmd(columns_bundle),
    "choose": cmd_choose,
    "mra": cmd_mra,
    "sockdivide": cmd_sockdivide,
    "trivialize": cmd_trivialize,
    "divisible": cmd_divisible,
    "search-equivariant": cmd_search,
    "automorphisms": cmd_automorphisms,
}


# -- re-verification ----------------------------------------------------------


def reverify(result: dict, payload) -> bool:
    """Re-check a report's result against the instance it was computed from."""
    kind = result.get("type")
    if kind == "validated":
        return instance_to_json(payload)["kind"] == result["kind"]
    if kind == "matching":
        return verify_division(payload, decode_bijection(result["pairs"]))
    if kind == "bijection":
        g = decode_bijection(result["pairs"])
        return g.domain == payload.left.base and g.codomain == payload.right.base
    if kind == "bundle":
        bundle = instance_from_json(result["bundle"]).payload
        return bundle.total_space == grid_instance(payload).left.total_space
    if kind == "choice":
        sel = {decode_element(i): decode_element(x) for i, x in result["selection"]}
        return set(sel) == set(payload.pairs) and all(x in payload.pairs[i] for i, x in sel.items())
    if kind == "mra":
        g = decode_bijection(result["pairs"])
        return g.domain == payload.total_space and g.codomain == product_with_slots(payload.base, payload.arity)
    if kind == "trivialization":
        t = decode_bijection(result["pairs"])
        return is_bundle_isomorphism(t, payload, trivial_bundle(payload.base, payload.arity))
    if kind == "divisibility":
        carrier = _carrier(payload)
        if not result["divisible"]:
            return len(carrier) % result["n"] != 0
        w = result["witness"]
        if result["mode"] == "weak":
            bundle = instance_from_json(w).payload
            return bundle.total_space == carrier and bundle.arity == result["n"]
        B = [decode_element(b) for b in w["B"]]
        g = decode_bijection(w["pairing"])
        return g.domain == carrier and g.codomain == product_with_slots(B, result["n"])
    if kind == "certificate":
        return certificate_from_json(result["certificate"]).replay(_search_target(payload))
    if kind == "invariant-bijection":
        inst = _search_target(payload)
        return eq.is_invariant(decode_bijection(result["pairs"]), eq.automorphisms_of_sock_instance(inst))
    if kind == "automorphisms":
        if isinstance(payload, ShoeInstance):
            from .core import Relabeling, apply_relabeling_shoe

            return all(
                apply_relabeling_shoe(payload, Relabeling(decode_bijection(g["onA"]), decode_bijection(g["onB"])))
                == payload
                for g in result["group"]
            )
        inst = _search_target(payload)
        return all(eq.replay_automorphism(inst, automorphism_from_json(g)) for g in result["group"])
    return True


# -- entry points -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit the report as JSON")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="instance budget for enumeration")

    parser = argparse.ArgumentParser(prog="sockdiv", description="Shoe and sock division workbench.")
    parser.add_argument("--json", action="store_true", help="emit the report as JSON")
    parser.add_argument("--budget", type=int, default=eq.DEFAULT_BUDGET, help="instance budget for enumeration")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name != "enumerate":
            p.add_argument("file")
        return p

    add("validate", "parse and validate an instance file")
    p = add("divide", "divide a shoe instance")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--strict", action="store_true", help="proposal stage only; a stall exits 1")
    add("rows", "rows bundle of a pair family")
    add("columns", "columns bundle of a pair family")
    for name in ("choose", "mra"):
        add(name, f"{name} with a sock-division oracle").add_argument(
            "--oracle", choices=("cheating", "equivariant"), required=True
        )
    add("sockdivide", "sock division through repeated addition")
    p = add("trivialize", "trivialize a bundle along a linear order of its base")
    p.add_argument("--order", required=True)
    p.add_argument("--oracle", choices=("cheating", "equivariant"), default="cheating")
    p = add("divisible", "strong or weak divisibility witness")
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--strong", action="store_true")
    mode.add_argument("--weak", action="store_true")
    add("search-equivariant", "search for an automorphism-invariant sock divider")
    add("automorphisms", "list the automorphism group of an instance")
    p = add("enumerate", "enumerate small instances")
    p.add_argument("family", choices=("shoe", "sock"))
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--run-suite", action="store_true")
    return parser


def run_subcommand(argv) -> tuple:
    """Run one command; returns ``(exit_code, RunReport)`` without printing."""
    argv = list(argv)
    report = RunReport(command=argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        report.exit_code = EXIT_INVALID if exc.code else EXIT_OK
        report.error = "invalid command line"
        return report.exit_code, report
    t0 = time.perf_counter()
    try:
        if args.command == "enumerate":
            cmd_enumerate(args, report)
        else:
            if args.command == "divisible" and args.n < 1:
                raise UsageError("--n must be positive")
            try:
                with open(args.file, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise UsageError(f"cannot read {args.file}: {exc.strerror}")
            inst_file = parse_instance(text)
            report.digest = _digest(inst_file.payload)
            try:
                COMMANDS[args.command](args, inst_file, report)
            except NoEquivariantDivider as exc:
                report.result = {"type": "certificate", "certificate": certificate_to_json(exc.certificate)}
                report.exit_code = EXIT_NEGATIVE
            report.verification["reverify"] = reverify(report.result, inst_file.payload)
            if not report.verification["reverify"]:
                report.exit_code = EXIT_INTERNAL
    except ValidationError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        report.exit_code = EXIT_INVALID
    except (ContractError, SockDivError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        report.exit_code = EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - report, never traceback
        report.error = f"internal error: {type(exc).__name__}: {exc}"
        report.exit_code = EXIT_INTERNAL
    report.elapsed_ms = (time.perf_counter() - t0) * 1000
    report.json_mode = bool(getattr(args, "json", False))
    return report.exit_code, report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run_subcommand(argv)
    if report.json_mode:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    elif report.error and report.exit_code in (EXIT_INVALID, EXIT_INTERNAL):
        print(report.to_text(), file=sys.stderr)
    else:
        print(report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
