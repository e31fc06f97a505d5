"""Command line interface.

Exit codes: 0 success, 1 validation or axiom violation (or another domain
error such as a non-binary treatment), 2 schema, I/O or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import CausalSpaceError, NoGeometry, SchemaError
from .matching import matched_estimate, matched_population_limit, nesting_report
from .model import Model
from .modelio import _randomizer, load_model
from .ocs import (
    ace,
    contract,
    enumerate_consistent,
    is_causal,
    is_jointly_causal,
    validate,
)
from .randomization import joint_randomize, randomize, verify_randomization_identity
from .render import render_randomized_svg, render_svg, split_selectors
from .sampling import empirical_aoe, sample_atoms, write_batch
from .variables import aoe, format_assignment

EXIT_OK, EXIT_INVALID, EXIT_SCHEMA = 0, 1, 2


def rat(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator} ({float(q):.6g})"


def _names(text: str) -> list:
    return [n.strip() for n in text.split(",") if n.strip()]


def _values(v) -> str:
    return " ".join(f"{a}={x}" for a, x in zip(v.space.ids, v.values))


def cmd_validate(model: Model, args) -> int:
    report = validate(model.ocs)
    print(f"model {model.name!r}: {len(model.space)} atoms, observables {', '.join(model.ocs.names)}")
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def _require_valid(model: Model) -> int | None:
    report = validate(model.ocs)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_INVALID
    return None


def cmd_contract(model: Model, args) -> int:
    bad = _require_valid(model)
    if bad is not None:
        return bad
    ocs = model.ocs
    fam = contract(ocs.complete_family(args.target), _names(args.over or ""), ocs.obs)
    for key in sorted(fam.table):
        print(f"{fam.table[key].name}: {_values(fam.table[key])}")
    return EXIT_OK


def cmd_causal(model: Model, args) -> int:
    bad = _require_valid(model)
    if bad is not None:
        return bad
    source = _names(args.source)
    report = is_causal(model.ocs, source, args.target)
    print(f"causal: {str(report.causal).lower()}")
    if report.causal:
        a, b = report.pair
        print(f"witness pair: {format_assignment(a)} vs {format_assignment(b)}")
        print(f"witness event: {' '.join(sorted(report.witness.members))}")
    print(f"witness measure: {rat(report.witness_measure)}")
    if len(source) >= 2:
        joint = is_jointly_causal(model.ocs, source, args.target)
        print(f"jointly causal: {str(joint.jointly_causal).lower()}" + (" (extension)" if joint.extension else ""))
        for c in joint.conditions:
            ctx = format_assignment(c.context)
            print(f"  {c.source} causal for {args.target} at {ctx}: {str(c.holds).lower()} "
                  f"(measure {rat(c.report.witness_measure)})")
    return EXIT_OK


def cmd_ace(model: Model, args) -> int:
    bad = _require_valid(model)
    if bad is not None:
        return bad
    print(f"ACE({args.treatment} -> {args.target}) = {rat(ace(model.ocs, args.treatment, args.target))}")
    return EXIT_OK


def cmd_aoe(model: Model, args) -> int:
    value = aoe(model.variable(args.treatment), model.variable(args.target))
    print(f"AOE({args.treatment} -> {args.target}) = {rat(value)}")
    return EXIT_OK


def _load_spec(path, model: Model):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON: {exc.msg}") from None
    return _randomizer(doc, model.variables)


def cmd_randomize(model: Model, args) -> int:
    bad = _require_valid(model)
    if bad is not None:
        return bad
    spec = _load_spec(args.spec, model) if args.spec else model.randomizer
    if args.treatment:
        treatments = _names(args.treatment)
    elif spec is not None:
        treatments = list(spec.variables)
    else:
        raise SchemaError("randomizer", "no treatment given (use --treatment or a randomizer section)")
    if args.joint or len(treatments) > 1:
        rs = joint_randomize(model.ocs, treatments, spec)
    else:
        rs = randomize(model.ocs, treatments[0], spec)
    print(f"randomized {','.join(rs.treatments)}: product space of {len(rs.space)} atoms")
    report = verify_randomization_identity(rs)
    for c in report.checks:
        law_o = ", ".join(f"{k[0]}: {rat(p)}" for k, p in sorted(c.observed.items()))
        arm = str(c.arm[0]) if len(c.arm) == 1 else "(" + ",".join(map(str, c.arm)) + ")"
        print(f"  {c.target} | {','.join(rs.treatments)}={arm}: {law_o}  equal: {str(c.equal).lower()}")
    print(f"identity holds: {str(report.holds).lower()}")
    if len(rs.treatments) == 1 and set(model.ocs.variable(rs.treatments[0]).image) == {0, 1}:
        t = rs.treatments[0]
        for y in rs.outcomes:
            print(f"  AOE~({t} -> {y}) = {rat(aoe(rs.treatment(), rs.outcome(y)))}; "
                  f"ACE = {rat(ace(model.ocs, t, y))}")
    return EXIT_OK if report.holds else EXIT_INVALID


def cmd_match(model: Model, args) -> int:
    cfg = model.matching
    treatment = args.treatment or (cfg.treatment if cfg else None)
    outcome = args.outcome or (cfg.outcome if cfg else "Y")
    covariates = _names(args.covariates) if args.covariates else list(cfg.covariates if cfg else [])
    if not treatment or not covariates:
        raise SchemaError("matching", "treatment and covariates are required")
    x = model.variable(treatment)
    zs = [model.variable(z) for z in covariates]
    rep = nesting_report(model.space, x, zs)
    for level in rep.levels:
        cells = " ".join("(" + ",".join(map(str, c)) + ")" for c in sorted(level.matchable))
        print(f"k={level.k} ({','.join(covariates[:level.k])}): support measure {rat(level.measure)}; matchable {cells or '-'}")
    print(f"nested: {str(rep.nested).lower()}")
    y = model.variable(outcome)
    k = len(zs)
    try:
        print(f"population limit (k={k}): {rat(matched_population_limit(model.space, x, y, zs, k))}")
    except CausalSpaceError as exc:
        print(f"population limit (k={k}): undefined ({exc})")
    if args.samples:
        batch = sample_atoms(model.space, args.samples, args.seed)
        est = matched_estimate(batch, x, y, zs, k, args.seed)
        print(f"matched pairs: {est.n_pairs}")
        print(f"matched estimate: {est.estimate:.6f}")
    return EXIT_OK if rep.nested else EXIT_INVALID


def cmd_enumerate(model: Model, args) -> int:
    x, y = model.variable(args.treatment), model.variable(args.target)
    e = enumerate_consistent(model.space, x, y, args.cap)
    print(f"total: {e.total}  shown: {len(e.completions)}  truncated: {str(e.truncated).lower()}")
    for i, (y0, y1) in enumerate(e.completions):
        print(f"{i}: {y.name}0=({','.join(map(str, y0.values))}) {y.name}1=({','.join(map(str, y1.values))})")
    return EXIT_OK


def cmd_sample(model: Model, args) -> int:
    batch = sample_atoms(model.space, args.n, args.seed)
    if args.output:
        write_batch(batch, args.output)
        print(f"wrote {len(batch)} draws to {args.output}")
    counts = {a: 0 for a in model.space.ids}
    for a in batch.draws:
        counts[a] += 1
    for a in model.space.ids:
        print(f"{a}: {counts[a]}")
    if args.treatment and args.target:
        est = empirical_aoe(batch, model.variable(args.treatment), model.variable(args.target))
        print(f"empirical AOE({args.treatment} -> {args.target}) = {est:.6f}")
    return EXIT_OK


def cmd_render(model: Model, args) -> int:
    if args.randomized:
        render_randomized_svg(model, _names(args.randomized), path=args.output)
    else:
        render_svg(model, split_selectors(args.select), path=args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalspace", description="Exact causal models on finite probability spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("model", help="model file (JSON, format 1)")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check the axioms")
    sp = add("contract", cmd_contract, "contract a complete family")
    sp.add_argument("--target", required=True)
    sp.add_argument("--over", default="", help="comma-separated index names to remove")
    sp = add("causal", cmd_causal, "decide causality of a source set")
    sp.add_argument("--source", required=True, help="X or X,Z")
    sp.add_argument("--target", required=True)
    for name, fn in (("ace", cmd_ace), ("aoe", cmd_aoe)):
        sp = add(name, fn, f"exact {name.upper()}")
        sp.add_argument("--treatment", required=True)
        sp.add_argument("--target", required=True)
    sp = add("randomize", cmd_randomize, "build and check a randomized system")
    sp.add_argument("--joint", action="store_true")
    sp.add_argument("--spec", help="randomizer JSON ({'atoms': [...], 'variables': {...}})")
    sp.add_argument("--treatment", help="treatment name(s), comma-separated")
    sp = add("match", cmd_match, "exact paired matching supports and estimate")
    sp.add_argument("--covariates")
    sp.add_argument("--treatment")
    sp.add_argument("--outcome")
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("enumerate", cmd_enumerate, "consistent (Y0, Y1) completions")
    sp.add_argument("--treatment", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--cap", type=int, default=64)
    sp = add("sample", cmd_sample, "seeded i.i.d. atom draws")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.add_argument("--treatment")
    sp.add_argument("--target")
    sp = add("render", cmd_render, "SVG panels")
    sp.add_argument("--select", default="", help="e.g. X,Y or Y[X] or Y[*]")
    sp.add_argument("--randomized", help="draw randomized slices for these treatments")
    sp.add_argument("-o", "--output", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model, strict=False)
        return args.fn(model, args)
    except (SchemaError, NoGeometry) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except CausalSpaceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
