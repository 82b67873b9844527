"""Command-line front end.

Every subcommand prints a short human summary to stdout and, with --out,
writes the full machine-readable trace.  Exit codes: 0 success, 1 usage
error (including malformed program text), 2 when an audit detects a
violation, either in a fresh run's own log or in a trace replayed through
--audit.  A trace whose checksum no longer matches its payload is treated
as a detected violation, not a usage mistake.

Programs are given in surface syntax, as raw #n code numbers, or mixed;
see the syntax module.  Grids are written y0..y1@budget or as explicit
y:budget pairs separated by commas.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from .adn import (KILLED, adn_verify, audit_diagonal, check_kills,
                  constructed_delta_spec, constructed_psi_spec,
                  diagonal_state_from_dict, run_diagonal)
from .arslanov import PROBE_CAP, run_search
from .fixpoints import (fixpoint, fixpoint_param, verify_fixed_point,
                        verify_param_fixed_point)
from .injury import audit as injury_audit
from .injury import disagreement_certificates, run as injury_run, state_from_dict
from .interp import eval_code
from .lang import Code
from .notions import (FpfPlusWitnessQuery, STANDARD_GRID, dnc_violation,
                      fpf_discrepancy, fpf_plus_probe, fpf_plus_refute)
from .syntax import SurfaceSyntaxError, parse_code
from .trace import TraceDocument, TraceIntegrityError, load_trace


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse's own failures to exit 1
        raise UsageError(message)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _to_code(text: str) -> Code:
    try:
        return parse_code(text)
    except SurfaceSyntaxError as ex:
        raise UsageError(f"bad program text: {ex}")


def _to_grid(text: Optional[str]) -> Tuple[Tuple[int, int], ...]:
    if text is None:
        return STANDARD_GRID
    try:
        if "@" in text:
            span, budget = text.split("@", 1)
            lo, hi = span.split("..", 1)
            lo, hi, budget = int(lo), int(hi), int(budget)
            if lo > hi or lo < 0 or budget < 0:
                raise ValueError
            return tuple((y, budget) for y in range(lo, hi + 1))
        points = []
        for item in text.split(","):
            y, b = item.split(":", 1)
            y, b = int(y), int(b)
            if y < 0 or b < 0:
                raise ValueError
            points.append((y, b))
        if not points:
            raise ValueError
        return tuple(points)
    except ValueError:
        raise UsageError(
            f"bad grid {text!r}; write y0..y1@budget or y:b,y:b,...")


def _to_candidates(text: str) -> List[Code]:
    if text.startswith("@"):
        path = Path(text[1:])
        if not path.is_file():
            raise UsageError(f"candidate file {path} not found")
        items = [ln.strip() for ln in path.read_text().splitlines()]
        items = [ln for ln in items if ln and not ln.startswith(";")]
    else:
        items = [it.strip() for it in text.split(";") if it.strip()]
    if not items:
        raise UsageError("no candidate programs given")
    return [_to_code(it) for it in items]


# --- subcommand handlers -----------------------------------------------------
# each returns (summary text, config echo, payload or None, exit code)


def _cmd_eval(ns):
    code = _to_code(ns.program)
    oracle = None
    if ns.oracle:
        try:
            oracle = frozenset(int(t) for t in ns.oracle.split(","))
        except ValueError:
            raise UsageError(f"bad oracle list {ns.oracle!r}")
    out = eval_code(code, ns.input, ns.budget, oracle)
    summary = (f"converged {out.value}" if out.converged
               else f"exhausted (budget {ns.budget})")
    config = {"program": ns.program, "input": ns.input, "budget": ns.budget,
              "oracle": ns.oracle}
    payload = {"code": code, "outcome": out.to_dict()}
    return summary, config, payload, 0


def _cmd_fixpoint(ns):
    t = _to_code(ns.transform)
    grid = _to_grid(ns.grid)
    config = {"transform": ns.transform, "grid": ns.grid, "param": ns.param}
    if ns.param is None:
        e = fixpoint(t)
        rep = verify_fixed_point(e, t, grid)
        summary = (f"fixed point: {max(e.bit_length(), 1)}-bit code; "
                   f"verified: {rep.verified}")
        payload = {"mode": "plain", "fixed_point": e, "report": rep.to_dict()}
    else:
        f = fixpoint_param(t)
        rep = verify_param_fixed_point(f, t, range(ns.param + 1), grid)
        summary = (f"uniform fixed points for n <= {ns.param}; "
                   f"verified: {rep.verified}")
        payload = {"mode": "parameterized", "f": f, "report": rep.to_dict()}
    return summary, config, payload, 0


def _need(ns, flag: str):
    v = getattr(ns, flag.lstrip("-").replace("-", "_"))
    if v is None:
        raise UsageError(f"{flag} is required in --mode {ns.mode}")
    return v


def _cmd_probe(ns):
    config = {"mode": ns.mode, "g": ns.g, "f": ns.f, "delta": ns.delta,
              "index": ns.index, "n": ns.n, "n_bound": ns.n_bound,
              "stage": ns.stage, "budget": ns.budget, "grid": ns.grid}
    if ns.mode == "dnc":
        g = _to_code(_need(ns, "--g"))
        cert = dnc_violation(g, _need(ns, "--index"), _need(ns, "--budget"))
        payload = {"mode": ns.mode,
                   "certificate": cert.to_dict() if cert else None}
    elif ns.mode == "fpf":
        f = _to_code(_need(ns, "--f"))
        cert = fpf_discrepancy(f, _need(ns, "--n"), _need(ns, "--stage"))
        payload = {"mode": ns.mode,
                   "certificate": cert.to_dict() if cert else None}
    else:  # fpf-plus
        q = FpfPlusWitnessQuery(
            delta_code=_to_code(_need(ns, "--delta")),
            g_code=_to_code(_need(ns, "--g")),
            n_bound=_need(ns, "--n-bound"), budget=_need(ns, "--budget"))
        rows = fpf_plus_probe(q, _to_grid(ns.grid))
        cert = fpf_plus_refute(q)
        payload = {"mode": ns.mode, "rows": rows,
                   "certificate": cert.to_dict() if cert else None}
    found = payload["certificate"] is not None
    summary = "certificate issued" if found else "no certificate at this budget"
    return summary, config, payload, 0


def _cmd_arslanov(ns):
    fhat = _to_code(ns.fhat)
    run = run_search(fhat, ns.max_stage, probe_grid=_to_grid(ns.grid),
                     probe_cap=ns.probe_cap)
    config = {"fhat": ns.fhat, "max_stage": ns.max_stage,
              "probe_cap": ns.probe_cap, "grid": ns.grid}
    # candidate codes are enormous; the trace keeps them only where probed
    payload = {
        "fhat_code": run.fhat_code,
        "h_code": run.h_code,
        "stage": run.stage,
        "candidates": [[n, s] for n, s, _ in run.candidates],
        "probes": [p.to_dict() for p in run.probes],
    }
    agree = sum(p.full_agreement for p in run.probes)
    summary = (f"{len(run.candidates)} halting entries by stage {run.stage}; "
               f"{len(run.probes)} probed, {agree} in full agreement")
    return summary, config, payload, 0


def _cmd_injury(ns):
    if ns.audit:
        doc = load_trace(Path(ns.audit).read_text())
        state = state_from_dict(doc.payload["state"])
        violations = injury_audit(state)
        lines = [f"audit violation: {v}" for v in violations]
        lines.append(f"audit of {ns.audit}: "
                     f"{len(violations)} violation(s)" if violations
                     else f"audit of {ns.audit}: clean")
        return "\n".join(lines), {}, None, 2 if violations else 0
    if ns.stages is None or ns.candidates is None:
        raise UsageError("--stages and --candidates are required to run")
    codes = _to_candidates(ns.candidates)
    cands = {e: c for e, c in enumerate(codes)}
    state = injury_run(cands, ns.stages)
    violations = injury_audit(state)
    certs = disagreement_certificates(state, cands)
    config = {"stages": ns.stages, "candidates": ns.candidates}
    payload = {
        "state": state.to_dict(),
        "candidates": [[e, c] for e, c in sorted(cands.items())],
        "certificates": [c.to_dict() for c in certs],
        "violations": violations,
    }
    summary = (f"stage {state.stage}: {len(state.A)} elements enumerated, "
               f"{len(state.log)} actions, {len(certs)} certificate(s), "
               f"{len(violations)} violation(s)")
    return summary, config, payload, 2 if violations else 0


def _cmd_adn(ns):
    if ns.audit:
        doc = load_trace(Path(ns.audit).read_text())
        state = diagonal_state_from_dict(doc.payload["state"])
        violations = audit_diagonal(state) + check_kills(state, ns.verify_budget)
        lines = [f"audit violation: {v}" for v in violations]
        lines.append(f"audit of {ns.audit}: "
                     f"{len(violations)} violation(s)" if violations
                     else f"audit of {ns.audit}: clean")
        return "\n".join(lines), {}, None, 2 if violations else 0
    if ns.stages is None or ns.candidates is None:
        raise UsageError("--stages and --candidates are required to run")
    state = run_diagonal(ns.candidates, ns.stages)
    violations = audit_diagonal(state) + check_kills(state, ns.verify_budget)
    grid = _to_grid(ns.verify_grid)
    pspec, dspec = constructed_psi_spec(), constructed_delta_spec()
    verdicts = []
    for rec in state.per_candidate:
        if rec.status != KILLED:
            continue
        vs = adn_verify(rec.e, pspec, dspec, rec.witness, ns.verify_budget,
                        grid=grid)
        verdicts.extend(v.to_dict() for v in vs if v.violated != "none-yet"
                        or v.n == rec.witness)
    config = {"candidates": ns.candidates, "stages": ns.stages,
              "verify_grid": ns.verify_grid, "verify_budget": ns.verify_budget}
    payload = {"state": state.to_dict(), "verdicts": verdicts,
               "violations": violations}
    n_killed = sum(r.status == KILLED for r in state.per_candidate)
    summary = (f"stage {state.stage}: {n_killed} of "
               f"{len(state.per_candidate)} candidates killed, "
               f"{len(verdicts)} recorded verdict(s), "
               f"{len(violations)} violation(s)")
    return summary, config, payload, 2 if violations else 0


def _build_parser() -> _Parser:
    p = _Parser(prog="kleenelab", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = sub.add_parser("eval", help="run one program on one input")
    sp.add_argument("--program", required=True)
    sp.add_argument("--input", required=True, type=_nonneg)
    sp.add_argument("--budget", required=True, type=_nonneg)
    sp.add_argument("--oracle", help="comma-separated set members")
    sp.set_defaults(handler=_cmd_eval)

    sp = sub.add_parser("fixpoint",
                        help="build and verify a fixed point of a transform")
    sp.add_argument("--transform", required=True)
    sp.add_argument("--grid", help="verification grid")
    sp.add_argument("--param", type=_nonneg,
                    help="verify the uniform form for n up to this bound")
    sp.set_defaults(handler=_cmd_fixpoint)

    sp = sub.add_parser("probe",
                        help="issue avoidance/discrepancy certificates")
    sp.add_argument("--mode", required=True,
                    choices=["dnc", "fpf", "fpf-plus"])
    sp.add_argument("--g", help="program (dnc, fpf-plus)")
    sp.add_argument("--f", help="program (fpf)")
    sp.add_argument("--delta", help="program (fpf-plus)")
    sp.add_argument("--index", type=_nonneg, help="diagonal index (dnc)")
    sp.add_argument("--n", type=_nonneg, help="probe point (fpf)")
    sp.add_argument("--n-bound", type=_nonneg, help="probe bound (fpf-plus)")
    sp.add_argument("--stage", type=_nonneg, help="stage (fpf)")
    sp.add_argument("--budget", type=_nonneg, help="budget (dnc, fpf-plus)")
    sp.add_argument("--grid", help="domain grid (fpf-plus)")
    sp.set_defaults(handler=_cmd_probe)

    sp = sub.add_parser("arslanov",
                        help="search halting-diagonal entries for domain "
                             "fixed points of a with-access transform")
    sp.add_argument("--fhat", required=True)
    sp.add_argument("--max-stage", required=True, type=_nonneg)
    sp.add_argument("--probe-cap", type=_nonneg, default=PROBE_CAP)
    sp.add_argument("--grid", help="probe grid")
    sp.set_defaults(handler=_cmd_arslanov)

    sp = sub.add_parser("injury",
                        help="run the restraint construction, or --audit a trace")
    sp.add_argument("--stages", type=_nonneg)
    sp.add_argument("--candidates",
                    help="programs separated by ';', or @file, one per line")
    sp.add_argument("--audit", help="replay and audit an existing trace file")
    sp.set_defaults(handler=_cmd_injury)

    sp = sub.add_parser("adn-diag",
                        help="run the totalizer diagonalization, or --audit a trace")
    sp.add_argument("--candidates", type=_nonneg,
                    help="number of candidate indices")
    sp.add_argument("--stages", type=_nonneg)
    sp.add_argument("--verify-grid", help="domain grid for verdicts")
    sp.add_argument("--verify-budget", type=_nonneg, default=10_000)
    sp.add_argument("--audit", help="replay and audit an existing trace file")
    sp.set_defaults(handler=_cmd_adn)

    for name, sp in sub.choices.items():
        sp.add_argument("--out", help="write the full trace to this path")
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        summary, config, payload, code = ns.handler(ns)
    except UsageError as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return 1
    except TraceIntegrityError as ex:
        print(f"audit violation: {ex}", file=sys.stderr)
        return 2
    except OSError as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return 1
    if getattr(ns, "out", None) and payload is not None:
        doc = TraceDocument(subcommand=ns.cmd, config=config, payload=payload)
        Path(ns.out).write_text(doc.to_json())
    print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
