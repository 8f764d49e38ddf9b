"""Command-line front end.

Builds or ingests graphs, runs the exact computations and audits, and emits
machine-readable records. JSON is the canonical format (one object, or an
array when a run produces several records); CSV is a flat row-per-record
rendering for plotting pipelines. Rationals travel as "p/q" strings.

No numerical logic lives here: every subcommand parses arguments, calls one
or two library functions, and formats their output. Exit codes: 0 success,
2 when a verification or audit found a mismatch, 1 for usage, budget, or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from collections import Counter
from fractions import Fraction

import mpmath

from .audit import (
    PropertyConstants,
    PsiFamily,
    check_product_iso,
    check_property_i,
    check_property_ii,
    container_hypothesis_check,
    container_sum_report,
    nonpolymer_weight_report,
    z_psi_halfell_audit,
    z_psi_split_audit,
)
from .clusters import KPFunctions, kp_sum_audit, l_k, log_xi_truncation_report
from .formulas import (
    kss_expected_histogram,
    l1_closed,
    l2_hypercube,
    l2_kss_product,
    l2_middle_layer,
    l2_regime_report,
    l2_torus,
    midlayer_expected_histogram,
    torus_expected_histogram,
)
from .graphs import (
    BipartiteGraph,
    BudgetError,
    bits,
    build_cartesian_product,
    build_complete_bipartite,
    build_cycle,
    build_even_torus,
    build_hypercube,
    build_middle_layer,
    graph_from_json,
    graph_to_json,
)
from .model import (
    ModelParams,
    MuHatSampler,
    count_independent_sets,
    exact_Z,
    mu_hat_table,
    mu_table,
    percolation_expectation_exact,
    percolation_mc,
    tv_distance,
)
from .polymers import enumerate_polymers, polymer_to_json_dict, xi_brute
from .rationals import format_rational, parse_rational

BUDGET_ENV = "ISINGPOLY_BUDGET"
GRAPH_FAMILIES = ("hypercube", "cycle", "torus", "kss", "midlayer", "product")


class CliError(Exception):
    """Usage-level problem: bad spec, missing file, malformed value."""


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_graph_from_spec(spec: str, vertex_cap: int | None = None) -> BipartiteGraph:
    kind, _, arg = spec.partition(":")
    try:
        if kind == "hypercube":
            return build_hypercube(int(arg), vertex_cap)
        if kind == "cycle":
            return build_cycle(int(arg), vertex_cap)
        if kind == "torus":
            m, t = arg.split(",")
            return build_even_torus(int(m), int(t), vertex_cap)
        if kind == "kss":
            return build_complete_bipartite(int(arg), vertex_cap)
        if kind == "midlayer":
            return build_middle_layer(int(arg), vertex_cap)
        if kind == "product":
            factors = [build_graph_from_spec(part, vertex_cap)
                       for part in arg.split("+")]
            return build_cartesian_product(factors, vertex_cap)
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad graph spec {spec!r}: {exc}") from exc
    raise CliError(f"unknown graph family {kind!r} "
                   f"(known: {', '.join(GRAPH_FAMILIES)})")


def load_graph(source: str, vertex_cap: int | None = None) -> BipartiteGraph:
    """A builder spec, a JSON file path, or '-' for JSON on stdin."""
    if source == "-":
        return graph_from_json(sys.stdin.read())
    if source.partition(":")[0] in GRAPH_FAMILIES:
        return build_graph_from_spec(source, vertex_cap)
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return graph_from_json(fh.read())
    raise CliError(f"graph source {source!r} is neither a builder spec "
                   "nor an existing file")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, mpmath.mpf):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)  # "inf", "-inf", "nan"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _csv_cell(value):
    value = _jsonable(value)
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    if value is None:
        return ""
    return value


def emit_records(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        payload = records[0] if len(records) == 1 else records
        out.write(json.dumps(_jsonable(payload), sort_keys=True))
        out.write("\n")
        return
    fields: list[str] = []
    for record in records:
        for key in record:
            if key not in fields:
                fields.append(key)
    writer = csv.DictWriter(out, fieldnames=fields, restval="")
    writer.writeheader()
    for record in records:
        writer.writerow({k: _csv_cell(v) for k, v in record.items()})


def _params(args) -> ModelParams:
    return ModelParams(parse_rational(args.lam), parse_rational(args.p))


def _rho(args) -> Fraction:
    return parse_rational(args.rho)


# -- subcommand handlers; each returns (records, ok) --------------------------


def cmd_gen(args):
    g = load_graph(args.graph, args.budget)
    return [{"__raw__": graph_to_json(g)}], True


def cmd_zexact(args):
    g = load_graph(args.graph, args.budget)
    value = exact_Z(g, _params(args), sweep_cap=args.budget)
    return [{"value": value}], True


def cmd_isets(args):
    g = load_graph(args.graph, args.budget)
    count = count_independent_sets(g, sweep_cap=args.budget)
    record = {"count": count}
    ok = True
    if args.verify:
        z_count = exact_Z(g, ModelParams(1, 1), sweep_cap=args.budget)
        record["z_count"] = z_count
        record["match"] = ok = z_count == count
    return [record], ok


def cmd_percolate_exact(args):
    g = load_graph(args.graph, args.budget)
    params = _params(args)
    value = percolation_expectation_exact(g, params, edge_cap=args.budget)
    record = {"value": value}
    ok = True
    if args.verify:
        z = exact_Z(g, params, sweep_cap=args.budget)
        record["z_value"] = z
        record["match"] = ok = z == value
    return [record], ok


def cmd_percolate_mc(args):
    g = load_graph(args.graph, args.budget)
    mean, stderr = percolation_mc(g, _params(args), args.samples, args.seed,
                                  sweep_cap=args.budget)
    return [{"mean": mean, "stderr": stderr, "samples": args.samples,
             "seed": args.seed}], True


def cmd_polymers(args):
    g = load_graph(args.graph, args.budget)
    params = _params(args)
    records = [polymer_to_json_dict(g, params, poly)
               for poly in enumerate_polymers(g, args.side, _rho(args),
                                              size_max=args.size_max,
                                              enum_cap=args.budget)]
    return records, True


def cmd_xi(args):
    g = load_graph(args.graph, args.budget)
    value = xi_brute(g, args.side, _params(args), _rho(args),
                     enum_cap=args.budget)
    return [{"side": args.side, "xi": value}], True


def cmd_clusters(args):
    g = load_graph(args.graph, args.budget)
    report = log_xi_truncation_report(g, args.side, _params(args), _rho(args),
                                      k_max=args.k_max,
                                      size_cap=args.size_cap)
    records = []
    for term in report["terms"]:
        records.append({
            "k": term["k"],
            "L_k": term["L_k"],
            "partial": float(term["partial"]),
            "residual_before": float(term["residual_before"]),
            "residual": float(term["residual"]),
            "xi": report["xi"],
            "log_xi": float(report["log_xi"]),
        })
    return records, True


CLOSED_FORM_FAMILIES = ("l1", "torus", "midlayer", "kss", "hypercube")


def _closed_form_value_and_oracle(args):
    """(formula value, oracle graph, expected codegree histogram).

    The histogram drives the machine-checkable regime test for the
    second-order families; l1 has no regime caveat at desk scale."""
    p = parse_rational(args.p)
    if args.family == "l1":
        if args.graph is None:
            raise CliError("family l1 needs --graph for n and d")
        g = load_graph(args.graph, args.budget)
        lam = parse_rational(args.lam if args.lam is not None else "1")
        return l1_closed(g.n, g.d, lam, p), g, None, ModelParams(lam, p), 1
    params = ModelParams(1, p)
    if args.family == "torus":
        _need(args, "m", "t")
        value = l2_torus(args.m, args.t, p)
        g = build_even_torus(args.m, args.t, args.budget)
        return value, g, torus_expected_histogram(args.t), params, 2
    if args.family == "midlayer":
        _need(args, "d")
        value = l2_middle_layer(args.d, p)
        g = build_middle_layer(args.d, args.budget)
        return value, g, midlayer_expected_histogram(args.d), params, 2
    if args.family == "kss":
        _need(args, "s", "t")
        value = l2_kss_product(args.s, args.t, p)
        factor = build_complete_bipartite(args.s, args.budget)
        g = build_cartesian_product([factor] * args.t, args.budget)
        return value, g, kss_expected_histogram(args.s, args.t), params, 2
    if args.family == "hypercube":
        _need(args, "t")
        value = l2_hypercube(args.t, p)
        g = build_hypercube(args.t, args.budget)
        return value, g, kss_expected_histogram(1, args.t), params, 2
    raise CliError(f"unknown family {args.family!r}")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise CliError(f"family {args.family} needs {', '.join(missing)}")


def cmd_closed_form(args):
    value, g, histogram, params, k = _closed_form_value_and_oracle(args)
    record = {"family": args.family, "formula_value": value}
    ok = True
    if args.verify:
        oracle = l_k(g, "E", params, k=k)
        record["oracle_value"] = oracle
        record["match"] = value == oracle
        if histogram is not None:
            regime = l2_regime_report(g, "E", histogram)
            record["regime_ok"] = regime["regime_ok"]
            # out-of-regime disagreement is documented behavior, not an error
            ok = record["match"] or not regime["regime_ok"]
        else:
            ok = record["match"]
    return [record], ok


def cmd_tv(args):
    g = load_graph(args.graph, args.budget)
    params = _params(args)
    mu = mu_table(g, params, sweep_cap=args.budget)
    mu_hat = mu_hat_table(g, params, _rho(args), sweep_cap=args.budget)
    return [{"tv": tv_distance(mu, mu_hat)}], True


def cmd_sample_muhat(args):
    g = load_graph(args.graph, args.budget)
    sampler = MuHatSampler(g, _params(args), _rho(args),
                           enum_cap=args.budget)
    counts = Counter(sampler.draw(args.seed, k) for k in range(args.samples))
    records = []
    for (mask, side), count in sorted(counts.items()):
        records.append({"mask": mask, "vertices": list(bits(mask)),
                        "side": side, "count": count,
                        "samples": args.samples, "seed": args.seed})
    return records, True


def _property_constants(args) -> PropertyConstants:
    return PropertyConstants(c1=args.c1, c4=args.c4, c5=args.c5,
                             c2=args.c2, c3=args.c3)


def _condition_rows(report) -> list[dict]:
    rows = []
    for name, entry in report["conditions"].items():
        row = {"condition": name, "holds": entry["holds"],
               "checked": entry["checked"]}
        worst = entry["worst"]
        if worst is not None:
            row.update({"margin": worst["margin"],
                        "witness": list(worst["set"]),
                        "witness_side": worst["side"],
                        "neighborhood": worst["neighborhood"],
                        "bound": worst["bound"]})
        rows.append(row)
    return rows


def cmd_audit_iso(args):
    g = load_graph(args.graph, args.budget)
    if args.property == "product":
        report = check_product_iso(g, size_cap=args.size_cap, s=args.s,
                                   t=args.t, budget=args.budget)
        worst = report["near_half_worst"]
        rows = [
            {"condition": "codegree", "holds": report["codegree_holds"],
             "value": report["max_codegree"], "bound": report["s"]},
            {"condition": "near_half", "holds": report["near_half_holds"],
             "margin": worst["margin"], "witness": list(worst["set"]),
             "witness_side": worst["side"]},
            {"condition": "worst_c", "value": report["worst_c"]},
        ]
        return rows, report["codegree_holds"] and report["near_half_holds"]
    if args.property == "one":
        report = check_property_i(g, _property_constants(args),
                                  size_cap=args.size_cap, mode=args.mode,
                                  seed=args.seed, samples=args.samples,
                                  budget=args.budget)
        rows = _condition_rows(report)
        for key, value in report["Ib"].items():
            rows.append({"condition": f"Ib.{key}", "value": value})
    else:
        report = check_property_ii(g, _property_constants(args),
                                   size_cap=args.size_cap, mode=args.mode,
                                   seed=args.seed, samples=args.samples,
                                   budget=args.budget)
        rows = _condition_rows(report)
        rows.append({"condition": "IIb", "holds": report["IIb"]["holds"],
                     "value": report["IIb"]["max_codegree"],
                     "bound": report["IIb"]["bound"]})
        rows.append({"condition": "IIc.n_over_d6",
                     "value": report["IIc"]["n_over_d6"]})
    return rows, report["holds"]


def cmd_audit_kp(args):
    g = load_graph(args.graph, args.budget)
    params = _params(args)
    if args.mode == "sum":
        kpf = KPFunctions(d=g.d, alpha_tilde=float(params.alpha_tilde),
                          c1=args.c1, c2=args.c2, c3=args.c3, c4=args.c4,
                          c5=args.c5)
        report = kp_sum_audit(g, args.side, params, kpf, _rho(args),
                              size_max=args.size_max,
                              tail_depth=args.tail_depth)
        record = {
            "mode": "sum",
            "target": report["target"],
            "worst_vertex_sum": report["worst_vertex_sum"],
            "worst_ratio": report["worst_ratio"],
            "holds": report["holds_at_desk_scale"],
            "polymer_count": report["polymer_count"],
            "size_max": report["size_max"],
            "tail_shapes": report["tail_shapes"],
        }
        return [record], report["holds_at_desk_scale"]
    f_of_size = g_of_size = None
    if args.fg_denom is not None:
        denom = args.fg_denom

        def f_of_size(size):
            return Fraction(size, denom)
        g_of_size = f_of_size
    report = log_xi_truncation_report(g, args.side, params, _rho(args),
                                      k_max=args.k_max, f_of_size=f_of_size,
                                      g_of_size=g_of_size,
                                      size_cap=args.size_cap)
    kp_holds = report["kp"].holds if report["kp"] is not None else None
    records = []
    for i, term in enumerate(report["terms"]):
        row = {
            "mode": "truncation",
            "k": term["k"],
            "L_k": term["L_k"],
            "residual_before": float(term["residual_before"]),
            "residual": float(term["residual"]),
            "log_xi": float(report["log_xi"]),
            "kp_holds": kp_holds,
        }
        if report["tail_bounds"] is not None:
            row["tail_bound"] = report["tail_bounds"][i]
            row["tail_shape_ok"] = report["tail_shape_ok"]
        records.append(row)
    return records, kp_holds is not False


def parse_psi_spec(spec: str, d: int) -> PsiFamily:
    """Members separated by ';', coordinates by ','; '-' is the empty set."""
    members = []
    for part in spec.split(";"):
        part = part.strip()
        if part == "-":
            members.append(frozenset())
        elif part:
            try:
                members.append(frozenset(int(x) for x in part.split(",")))
            except ValueError as exc:
                raise CliError(f"bad family member {part!r}") from exc
        else:
            raise CliError("empty member spec; write '-' for the empty set")
    return PsiFamily(d, tuple(members))


def cmd_audit_z(args):
    if (args.psi is None) == (args.singletons is None):
        raise CliError("need exactly one of --psi or --singletons")
    if args.psi is not None:
        family = parse_psi_spec(args.psi, args.d)
    else:
        family = PsiFamily(args.d, tuple(frozenset({i})
                                         for i in range(args.singletons)))
    params = _params(args)
    if args.ell is not None:
        report = z_psi_split_audit(family, parse_rational(args.ell), params,
                                   args.capital_c)
        hyp = report["hypotheses"]
        record = {
            "mode": "split",
            "s": report["s"],
            "ell": report["ell"],
            "hypotheses_hold": hyp["holds"],
            "split_identity_ok": report["split_identity_ok"],
            "low_ok": report["low"]["ok"],
            "high_ok": report["high"]["ok"],
            "low_log_lhs": float(report["low"]["log_lhs"]),
            "low_log_rhs": float(report["low"]["log_rhs"]),
            "high_log_lhs": float(report["high"]["log_lhs"]),
            "high_log_rhs": float(report["high"]["log_rhs"]),
            "asserted": report["asserted"],
        }
        ok = not report["asserted"] or (record["low_ok"] and
                                        record["high_ok"])
    else:
        report = z_psi_halfell_audit(family, params, args.capital_c)
        record = {
            "mode": "halfell",
            "ell_psi": report["ell_psi"],
            "hypotheses_hold": report["hypotheses"]["holds"],
            "ok": report["ok"],
            "log_lhs": float(report["log_lhs"]),
            "log_rhs": float(report["log_rhs"]),
            "asserted": report["asserted"],
        }
        ok = not report["asserted"] or report["ok"]
    return [record], ok


def cmd_audit_container(args):
    g = load_graph(args.graph, args.budget)
    params = _params(args)
    report = container_sum_report(g, args.side, args.a, args.b, params,
                                  enum_cap=args.budget)
    record = {
        "a": report["a"],
        "b": report["b"],
        "count": report["count"],
        "lhs": report["lhs"],
        "d_size": report["d_size"],
        "empty": report["empty"],
        "c_star_implied": report["c_star_implied"],
    }
    ok = True
    if args.hypothesis_c2 is not None:
        hyp = container_hypothesis_check(g, args.side, args.hypothesis_c2,
                                         budget=args.budget)
        record["hypothesis_holds"] = hyp["holds"]
        record["hypothesis_checked"] = hyp["checked"]
        record["hypothesis_worst_margin"] = hyp["worst"]["margin"] \
            if hyp["worst"] is not None else None
        ok = hyp["holds"]
    return [record], ok


def cmd_audit_nonpolymer(args):
    g = load_graph(args.graph, args.budget)
    report = nonpolymer_weight_report(g, _params(args), _rho(args),
                                      sweep_cap=args.budget)
    return [{"count": report["count"], "total": report["total"],
             "z": report["z"], "ratio": report["ratio"],
             "exponent": report["exponent"]}], True


# -- argument wiring -----------------------------------------------------------


def _default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise CliError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None,
                        help="output file (default stdout)")
    common.add_argument("--budget", type=int, default=None,
                        help=f"cap on sweeps/enumerations "
                             f"(default ${BUDGET_ENV} or module defaults)")
    common.add_argument("--threads", type=int, default=1,
                        help="upper cap on worker threads; computations are "
                             "sequential, the cap is accepted for pipeline "
                             "compatibility")

    graph_arg = _Parser(add_help=False)
    graph_arg.add_argument("--graph", required=True,
                           help="builder spec (hypercube:d, cycle:m, "
                                "torus:m,t, kss:s, midlayer:d, "
                                "product:spec+spec), a JSON file path, "
                                "or - for stdin")

    model_args = _Parser(add_help=False)
    model_args.add_argument("--lambda", dest="lam", required=True,
                            help="fugacity as p/q")
    model_args.add_argument("--p", required=True,
                            help="percolation parameter as p/q in [0, 1]")

    rho_arg = _Parser(add_help=False)
    rho_arg.add_argument("--rho", default="3/4",
                         help="closure-size cutoff as a fraction of a side")

    side_arg = _Parser(add_help=False)
    side_arg.add_argument("--side", choices=("E", "O"), default="E")

    parser = _Parser(prog="isingpoly",
                     description="Exact enumeration and verification engine "
                                 "for hard-core and Ising-type models on "
                                 "regular bipartite graphs.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add(name, handler, *parents, help=None):
        p = sub.add_parser(name, parents=[common, *parents], help=help)
        p.set_defaults(handler=handler)
        return p

    add("gen", cmd_gen, graph_arg, help="build a graph and emit its JSON")
    add("zexact", cmd_zexact, graph_arg, model_args,
        help="exact partition function")

    p = add("isets", cmd_isets, graph_arg,
            help="count independent sets by backtracking")
    p.add_argument("--verify", action="store_true",
                   help="also compare against the hard-core partition "
                        "function; mismatch exits 2")

    p = add("percolate-exact", cmd_percolate_exact, graph_arg, model_args,
            help="exact percolation expectation")
    p.add_argument("--verify", action="store_true",
                   help="compare against exact Z; mismatch exits 2")

    p = add("percolate-mc", cmd_percolate_mc, graph_arg, model_args,
            help="seeded Monte Carlo percolation estimate")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("polymers", cmd_polymers, graph_arg, model_args, rho_arg,
            side_arg, help="enumerate one side's polymers with weights")
    p.add_argument("--size-max", type=int, default=None)

    add("xi", cmd_xi, graph_arg, model_args, rho_arg, side_arg,
        help="polymer partition function by direct enumeration")

    p = add("clusters", cmd_clusters, graph_arg, model_args, rho_arg,
            side_arg, help="cluster expansion terms and residuals")
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--size-cap", type=int, default=None)

    p = add("closed-form", cmd_closed_form,
            help="closed-form expansion terms, optionally verified")
    p.add_argument("--family", choices=CLOSED_FORM_FAMILIES, required=True)
    p.add_argument("--graph", default=None, help="graph source (family l1)")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="fugacity (family l1, default 1)")
    p.add_argument("--p", required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--verify", action="store_true",
                   help="compare against the cluster-sum oracle on the "
                        "matching graph; in-regime mismatch exits 2")

    add("tv", cmd_tv, graph_arg, model_args, rho_arg,
        help="total variation between the model measure and the polymer "
             "approximation")

    p = add("sample-muhat", cmd_sample_muhat, graph_arg, model_args, rho_arg,
            help="seeded draws from the two-sided polymer measure, "
                 "aggregated by outcome")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("audit-iso", cmd_audit_iso, graph_arg,
            help="vertex-isoperimetry condition sweeps")
    p.add_argument("--property", choices=("one", "two", "product"),
                   default="one")
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=10.0)
    p.add_argument("--c3", type=float, default=3.0)
    p.add_argument("--c4", type=float, default=1.0)
    p.add_argument("--c5", type=float, default=0.5)
    p.add_argument("--size-cap", type=int, default=4)
    p.add_argument("--mode", choices=("exhaustive", "sampled"),
                   default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--s", type=int, default=None,
                   help="max factor size (property product)")
    p.add_argument("--t", type=int, default=None,
                   help="factor count (property product)")

    p = add("audit-kp", cmd_audit_kp, graph_arg, model_args, rho_arg,
            side_arg, help="convergence-condition audits")
    p.add_argument("--mode", choices=("sum", "truncation"), default="sum")
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=10.0)
    p.add_argument("--c3", type=float, default=3.0)
    p.add_argument("--c4", type=float, default=1.0)
    p.add_argument("--c5", type=float, default=0.5)
    p.add_argument("--size-max", type=int, default=3)
    p.add_argument("--tail-depth", type=int, default=3)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--size-cap", type=int, default=None)
    p.add_argument("--fg-denom", type=int, default=None,
                   help="truncation mode: use f = g = size/denom")

    p = add("audit-z", cmd_audit_z,
            help="coordinate-family partition sum bounds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--C", dest="capital_c", type=float, required=True)
    p.add_argument("--psi", default=None,
                   help="family spec: members ';'-separated, coordinates "
                        "','-separated, '-' for the empty set")
    p.add_argument("--singletons", type=int, default=None,
                   help="use the first K singleton coordinate sets")
    p.add_argument("--ell", default=None,
                   help="split mode at this ell (rational); default "
                        "audits the half-ell bound")

    p = add("audit-container", cmd_audit_container, graph_arg, model_args,
            side_arg, help="container class weight sums")
    p.add_argument("--a", type=int, required=True, help="closure size")
    p.add_argument("--b", type=int, required=True, help="neighborhood size")
    p.add_argument("--hypothesis-c2", type=float, default=None,
                   help="also check the neighborhood-expansion hypothesis "
                        "with this constant; failure exits 2")

    add("audit-nonpolymer", cmd_audit_nonpolymer, graph_arg, model_args,
        rho_arg, help="weight of configurations captured on neither side")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else 1
    if args.budget is None:
        try:
            args.budget = _default_budget()
        except CliError as exc:
            print(f"isingpoly: error: {exc}", file=sys.stderr)
            return 1
    if args.threads < 1:
        print("isingpoly: error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        records, ok = args.handler(args)
    except BudgetError as exc:
        print(f"isingpoly: budget exceeded: {exc}", file=sys.stderr)
        return 1
    except (CliError, ValueError, OSError) as exc:
        print(f"isingpoly: error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"isingpoly: audit assertion failed: {exc}", file=sys.stderr)
        return 2
    text: str
    if records and "__raw__" in records[0]:
        text = records[0]["__raw__"]
        if not text.endswith("\n"):
            text += "\n"
    else:
        buffer = io.StringIO()
        emit_records(records, args.format, buffer)
        text = buffer.getvalue()
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
