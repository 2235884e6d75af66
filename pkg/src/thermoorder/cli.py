"""Command-line front end.

Subcommands: check, sweep, lorenz, search, witness, work, example. Inputs
are JSON state files ({"levels": [...], "probs": [...]}, rational entries
as "n/d" strings); outputs are CSV/JSON files plus a deterministic report
on stdout. Exit codes: 0 possible/success, 1 impossible/not found, 2 error.

The numeric mode defaults to THERMO_ORDER_MODE ({float|rational}) and can
be overridden per invocation with --numeric-mode.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

from . import demo
from .catalysis import (
    SearchConfig,
    catalytic_possible,
    correlating_catalytic_possible,
    qubit_pair_catalyst,
    search_correlating_catalyst,
    total_correlation,
    verify_correlating_transition,
    work_quantities,
)
from .entropies import (
    ALPHA_1,
    Alpha,
    default_alpha_grid,
    delta_f_sweep,
    format_number,
    free_energy_gap,
    work_bit_delta_f,
)
from .majorization import thermal_lorenz, thermomajorizes
from .modes import CMP_TOL, NumericMode, to_fraction
from .states import (
    BlockState,
    gibbs_state,
    joint_to_dict,
    load_state,
    marginal,
    product_joint,
    save_json,
    state_to_dict,
    tensor,
)
from .witness import WitnessNumericalError, find_witness

EXIT_OK = 0
EXIT_IMPOSSIBLE = 1
EXIT_ERROR = 2


@dataclass
class RunReport:
    """Reproducibility header plus the command's verdicts and numbers."""

    command: str
    mode: str
    tolerances: dict
    seed: int
    inputs: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "command": self.command,
            "mode": self.mode,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "inputs": self.inputs,
            "verdicts": self.verdicts,
            "numbers": self.numbers,
            "outputs": self.outputs,
        }

    def print_text(self, out) -> None:
        tols = " ".join(f"{k}={v!r}" for k, v in sorted(self.tolerances.items()))
        print(f"# command={self.command} mode={self.mode} seed={self.seed} {tols}", file=out)
        for name, digest in sorted(self.inputs.items()):
            print(f"# input {name} sha256={digest}", file=out)
        for key, value in self.verdicts.items():
            print(f"{key}: {value}", file=out)
        for key, value in self.numbers.items():
            if isinstance(value, float):
                value = format_number(value)
            print(f"{key} = {value}", file=out)
        for path in self.outputs:
            print(f"wrote {path}", file=out)


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _numeric_mode(args) -> NumericMode:
    kind = args.numeric_mode or os.environ.get("THERMO_ORDER_MODE", "float")
    if kind not in ("float", "rational"):
        raise ValueError(f"unknown numeric mode {kind!r}")
    if kind == "rational":
        return NumericMode.rational()
    tol = args.tol if args.tol is not None else CMP_TOL
    return NumericMode.float64(cmp_tol=tol)


def _load(path: str, mode: NumericMode) -> BlockState:
    state = load_state(path)
    return state.to_exact() if mode.is_exact else state.to_float()


def _parse_alphas(text: str):
    return tuple(Alpha.from_label(part) for part in text.split(",") if part.strip())


def _report_for(args, command: str, paths: dict) -> RunReport:
    mode = _numeric_mode(args)
    report = RunReport(
        command=command,
        mode=mode.kind,
        tolerances={"cmp_tol": mode.cmp_tol, "norm_tol": mode.norm_tol},
        seed=getattr(args, "seed", 0),
        inputs={name: _digest(p) for name, p in paths.items()},
    )
    return report


def cmd_check(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "check", {"initial": args.initial, "final": args.final})
    a = _load(args.initial, mode)
    b = _load(args.final, mode)
    alphas = _parse_alphas(args.alphas) if args.alphas else None
    if args.mode == "plain":
        cmp_result = thermomajorizes(a, b, mode.cmp_tol)
        possible = cmp_result.dominates
        report.verdicts["curve"] = cmp_result.verdict
        report.verdicts["marginal"] = cmp_result.marginal
        if cmp_result.violations:
            x, gap = cmp_result.violations[0]
            report.numbers["worst_violation_x"] = float(x)
            report.numbers["worst_violation_gap"] = float(gap)
    elif args.mode == "catalytic":
        verdict = catalytic_possible(a, b, alphas, tol=max(mode.cmp_tol, 1e-15))
        possible = verdict.possible
        if not possible:
            report.verdicts["violating_alphas"] = ",".join(
                v.label() for v in verdict.diagnostics
            )
    else:
        tol = max(mode.cmp_tol, 1e-15)
        verdict = correlating_catalytic_possible(a, b, tol=tol)
        possible = verdict.possible
        delta_f1 = free_energy_gap(b, ALPHA_1) - free_energy_gap(a, ALPHA_1)
        report.numbers["delta_f1"] = delta_f1
        if possible and abs(delta_f1) <= tol:
            report.verdicts["caveat"] = (
                "free energies are equal within tolerance: approaching the "
                "target with vanishing correlations forces unbounded catalyst dimension"
            )
    report.verdicts["possible"] = possible
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK if possible else EXIT_IMPOSSIBLE


def cmd_sweep(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "sweep", {"initial": args.initial, "final": args.final})
    a = _load(args.initial, mode)
    b = _load(args.final, mode)
    alphas = _parse_alphas(args.alphas) if args.alphas else default_alpha_grid()
    profile = delta_f_sweep(a, b, alphas)
    if args.out:
        if args.out.endswith(".json"):
            save_json({"sweep": profile.to_json_obj()}, args.out)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                profile.write_csv(fh)
        report.outputs.append(args.out)
    else:
        profile.write_csv(out)
    intervals = profile.sign_intervals()
    pretty = "; ".join(f"{s} on [{lo.label()}, {hi.label()}]" for s, lo, hi in intervals)
    report.verdicts["sign_intervals"] = pretty
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK


def cmd_lorenz(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "lorenz", {"state": args.state})
    s = _load(args.state, mode)
    curve = thermal_lorenz(s)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            curve.write_csv(fh)
        report.outputs.append(args.out)
    else:
        curve.write_csv(out)
    report.numbers["breakpoints"] = len(curve.points)
    report.numbers["x_extent"] = float(curve.x_extent)
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK


def cmd_search(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "search", {"initial": args.initial, "final": args.final})
    a = _load(args.initial, mode)
    b = _load(args.final, mode)
    config = SearchConfig()
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = SearchConfig.from_json_obj(json.load(fh))
        report.inputs["config"] = _digest(args.config)
    try:
        result = search_correlating_catalyst(a, b, config)
    except ValueError as exc:
        report.verdicts["found"] = False
        report.verdicts["precondition"] = str(exc)
        report.print_text(out)
        _maybe_write_report(args, report)
        return EXIT_IMPOSSIBLE
    if result is None:
        report.verdicts["found"] = False
        report.verdicts["note"] = "not found at this resolution"
        report.print_text(out)
        _maybe_write_report(args, report)
        return EXIT_IMPOSSIBLE
    report.verdicts["found"] = True
    report.verdicts["curve"] = result.comparison.verdict
    report.numbers["total_correlation"] = result.total_correlation
    report.numbers["cells_evaluated"] = result.cells_evaluated
    if args.out:
        payload = {
            "joint": joint_to_dict(result.joint),
            "marginals": [
                state_to_dict(m) for m in result.joint.marginals()
            ],
            "total_correlation": result.total_correlation,
            "comparison": result.comparison.to_json_obj(),
        }
        save_json(payload, args.out)
        report.outputs.append(args.out)
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK


def cmd_witness(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "witness", {"initial": args.initial, "final": args.final})
    a = _load(args.initial, mode)
    b = _load(args.final, mode)
    witness = find_witness(a, b)
    if witness is None:
        cmp_result = thermomajorizes(a, b, mode.cmp_tol)
        report.verdicts["feasible"] = False
        report.verdicts["curve"] = cmp_result.verdict
        if cmp_result.violations:
            x, gap = cmp_result.violations[0]
            report.numbers["violating_breakpoint_x"] = float(x)
            report.numbers["violating_breakpoint_gap"] = float(gap)
        report.print_text(out)
        _maybe_write_report(args, report)
        return EXIT_IMPOSSIBLE
    gamma = gibbs_state(a.ham).probs
    report.verdicts["feasible"] = True
    residuals = witness.residuals(a.probs, b.probs, gamma)
    for key, value in sorted(residuals.items()):
        report.numbers[f"residual_{key}"] = value
    if args.out:
        save_json(witness.to_json_obj(a.probs, b.probs, gamma), args.out)
        report.outputs.append(args.out)
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK


def cmd_work(args, out) -> int:
    mode = _numeric_mode(args)
    report = _report_for(args, "work", {"state": args.state})
    s = _load(args.state, mode)
    wq = work_quantities(s)
    report.numbers["w_ext_deterministic_f0"] = wq.f0
    report.numbers["w_correlated_f1"] = wq.f1
    report.numbers["w_form_finf"] = wq.finf
    report.print_text(out)
    _maybe_write_report(args, report)
    return EXIT_OK


def _maybe_write_report(args, report: RunReport) -> None:
    if getattr(args, "report", None):
        save_json(report.to_json_obj(), args.report)


def cmd_example(args, out) -> int:
    """Full demo pipeline; PASS/FAIL per step, exit 0 only if all reproduce."""
    mode = _numeric_mode(args)
    x10 = args.x10 if args.x10 is not None else float(demo.CATALYST_X10)
    eps = args.epsilon if args.epsilon is not None else demo.FAIL_PROB
    report = _report_for(args, "example", {})
    report.numbers.update({
        "beta_e": demo.BETA_E, "beta_w": demo.BETA_W,
        "ground_pop": demo.GROUND_POP, "fail_prob": eps,
        "s": float(demo.CATALYST_S), "q": float(demo.CATALYST_Q), "x10": x10,
    })
    failures = []
    outdir = args.outdir
    if outdir:
        os.makedirs(outdir, exist_ok=True)

    def step(name: str, ok: bool, detail: str) -> None:
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} {name}: {detail}", file=out)
        report.verdicts[name] = tag
        if not ok:
            failures.append(name)

    initial, final = demo.work_extraction_pair(fail_prob=eps)
    if mode.is_exact:
        initial, final = initial.to_exact(), final.to_exact()

    # 1. sweep sign pattern and closed-form agreement
    profile = delta_f_sweep(initial, final)
    df1 = profile.value_at(ALPHA_1)
    df4 = profile.value_at(Alpha(4.0))
    step("sweep-signs", df1 < 0 < df4,
         f"dF_1={format_number(df1)} dF_4={format_number(df4)}")
    worst = 0.0
    for a_val in (0.5, 2.0, 4.0, 10.0):
        closed = work_bit_delta_f(demo.BETA_E, demo.BETA_W, demo.GROUND_POP, eps, a_val)
        worst = max(worst, abs(profile.value_at(Alpha(a_val)) - closed))
    step("closed-form-match", worst < 1e-10, f"max deviation {format_number(worst)}")
    if outdir:
        path = os.path.join(outdir, "sweep.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            profile.write_csv(fh)
        report.outputs.append(path)

    # 2. catalyst construction (infeasible overrides fail here); the free
    # parameter is rationalized losslessly so the joint stays exact
    try:
        joint = qubit_pair_catalyst(
            demo.CATALYST_S, demo.CATALYST_Q,
            demo.CATALYST_X10 if args.x10 is None else to_fraction(x10),
        )
        step("catalyst-construction", True,
             "joint " + ",".join(format_number(float(v)) for v in joint.probs))
    except ValueError as exc:
        step("catalyst-construction", False, str(exc))
        report.print_text(out)
        _maybe_write_report(args, report)
        return EXIT_IMPOSSIBLE

    c1, c2 = marginal(joint, 0), marginal(joint, 1)

    # 3. uncorrelated catalysts leave the curves crossing
    product = product_joint([c1.probs, c2.probs])
    cmp_product = verify_correlating_transition(initial, final, product)
    step("uncorrelated-crossing", cmp_product.verdict == "crossing",
         f"verdict {cmp_product.verdict}")

    # 4. correlated joint certifies the transition
    cmp_joint = verify_correlating_transition(initial, final, joint)
    step("correlated-dominance", cmp_joint.verdict == "above",
         f"verdict {cmp_joint.verdict}, min interior gap {format_number(cmp_joint.min_gap)}")

    # 5. marginals preserved exactly (rational arithmetic)
    m1, m2 = c1, c2
    margins_ok = (m1.probs == (demo.CATALYST_S, 1 - demo.CATALYST_S)
                  and m2.probs == (demo.CATALYST_Q, 1 - demo.CATALYST_Q))
    step("marginal-preservation", margins_ok,
         f"marginals {tuple(float(v) for v in m1.probs)} and {tuple(float(v) for v in m2.probs)}")

    # 6. total correlation stays within the free-energy budget
    info = total_correlation(joint)
    budget = free_energy_gap(initial, ALPHA_1) - free_energy_gap(final, ALPHA_1)
    step("correlation-budget", 0 < info <= budget + 1e-12,
         f"I={format_number(info)} budget={format_number(budget)}")
    if outdir:
        path = os.path.join(outdir, "joint.json")
        save_json({
            "joint": joint_to_dict(joint),
            "total_correlation": info,
            "comparison": cmp_joint.to_json_obj(),
        }, path)
        report.outputs.append(path)

    # 7. explicit stochastic witness for the certified transition
    big_initial = tensor(tensor(initial, c1), c2)
    big_final = tensor(final, joint.as_state())
    witness = find_witness(big_initial, big_final)
    if witness is None:
        step("witness-extraction", False, "no Gibbs-preserving map found")
    else:
        gamma = gibbs_state(big_initial.ham).probs
        res = witness.residuals(big_initial.probs, big_final.probs, gamma)
        ok = res["map"] < 1e-8 and res["gibbs"] < 1e-9
        step("witness-extraction", ok,
             f"map residual {format_number(res['map'])}, "
             f"gibbs residual {format_number(res['gibbs'])}")
        if outdir and ok:
            path = os.path.join(outdir, "witness.json")
            save_json(witness.to_json_obj(big_initial.probs, big_final.probs, gamma), path)
            report.outputs.append(path)

    if outdir:
        for name, state in (("curve_initial.csv", big_initial),
                            ("curve_final.csv", big_final)):
            path = os.path.join(outdir, name)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                thermal_lorenz(state).write_csv(fh)
            report.outputs.append(path)

    report.print_text(out)
    _maybe_write_report(args, report)
    if failures:
        print(f"failed steps: {', '.join(failures)}", file=out)
        return EXIT_IMPOSSIBLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--numeric-mode", choices=["float", "rational"],
                        default=argparse.SUPPRESS,
                        help="numeric regime; defaults to $THERMO_ORDER_MODE or float")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="curve-comparison tolerance (float mode)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed recorded in reports")
    common.add_argument("--report", default=argparse.SUPPRESS,
                        help="write the run report as JSON")

    parser = argparse.ArgumentParser(
        prog="thermoorder",
        description="Single-shot thermodynamic transition checks on "
                    "energy-block-diagonal states (energies in kT units, "
                    "entropies in nats).",
        parents=[common],
    )
    parser.set_defaults(numeric_mode=None, tol=None, seed=0, report=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="decide a transition between two state files")
    p.add_argument("initial")
    p.add_argument("final")
    p.add_argument("--mode", choices=["plain", "catalytic", "correlating"],
                   default="plain")
    p.add_argument("--alphas", default=None,
                   help="comma-separated orders, e.g. '0.5,1,4,inf' "
                        "(use --alphas=-2,4 for negative orders)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="free-energy difference across orders")
    p.add_argument("initial")
    p.add_argument("final")
    p.add_argument("--alphas", default=None,
                   help="comma-separated orders (use --alphas=-2,4 for negative orders)")
    p.add_argument("--out", default=None, help="CSV (.csv) or JSON (.json) output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lorenz", parents=[common], help="thermal Lorenz curve breakpoints as CSV")
    p.add_argument("state")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_lorenz)

    p = sub.add_parser("search", parents=[common], help="grid search for a correlating catalyst")
    p.add_argument("initial")
    p.add_argument("final")
    p.add_argument("--config", default=None, help="search configuration JSON")
    p.add_argument("--out", default=None, help="result JSON path")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("witness", parents=[common], help="explicit Gibbs-preserving stochastic matrix")
    p.add_argument("initial")
    p.add_argument("final")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("work", parents=[common], help="work quantities of a state (kT units)")
    p.add_argument("state")
    p.set_defaults(func=cmd_work)

    p = sub.add_parser(
        "example",
        parents=[common],
        help="bundled demo: qubit (gap 1 kT, ground population 0.73) "
             "feeding a 0.01 kT work bit at failure probability 0.007, "
             "certified by two correlated qubit catalysts (0.95/0.70, x10=0.04)",
    )
    p.add_argument("--x10", type=float, default=None,
                   help="override the joint's free parameter")
    p.add_argument("--epsilon", type=float, default=None,
                   help="override the work-bit failure probability")
    p.add_argument("--outdir", default=None, help="directory for artifact files")
    p.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (ValueError, OSError, json.JSONDecodeError, WitnessNumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
