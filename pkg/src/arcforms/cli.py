"""Command-line entry point: ``arcforms <group> <command> [options]``.

Exit codes: 0 success or consistent, 1 usage or input error, 2 counterexample,
3 inconclusive at the chosen truncation, 4 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arc_complex import (
    DEFAULT_VERTEX_CAP,
    ValidAlgebraicData,
    build_complex,
    cut_bounds_check,
    t_of_pair,
    t_search,
    verify_wcm,
)
from .complexes import DEFAULT_NNZ_CAP, SimplicialComplex, homological_connectivity, join, pi1_trivial, reduced_homology
from .errors import ResourceLimitError
from .exact_linear import IntMatrix, as_matrix
from .graded_algebra import (
    BigradedSeries,
    FreeCdgaPresentation,
    Generator,
    cdga_homology,
    free_gca_series,
    quotient_by_slope_zero_generator,
    step0_single_generator,
    step0_two_generators,
)
from .skew_forms import (
    QuadraticRefinement,
    SkewForm,
    arf_invariant,
    boundary_group,
    canonical_decomposition,
    cut,
    genus,
    max_order_delta,
    r_invariant,
    t_invariant,
)
from .stability import (
    StabilityQuery,
    stability_table,
    table_json,
    table_markdown,
    theorem_a,
    theorem_b_dichotomy,
)

EXIT_OK, EXIT_USAGE, EXIT_COUNTEREXAMPLE, EXIT_INCONCLUSIVE, EXIT_RESOURCE = 0, 1, 2, 3, 4
VERDICT_EXIT = {"consistent": EXIT_OK, "counterexample": EXIT_COUNTEREXAMPLE, "inconclusive-truncation": EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ input helpers

def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _load_form(path: str) -> SkewForm:
    obj = _read_json(path)
    if isinstance(obj, list):
        return SkewForm.from_rows(obj)
    return SkewForm.from_json(obj)


def _parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise UsageError(f"cannot parse integer vector {text!r}") from None


def _parse_vectors(text: str) -> list[tuple[int, ...]]:
    return [_parse_vector(v) for v in text.split(";") if v.strip()]


def _load_complex(path: str) -> SimplicialComplex:
    obj = _read_json(path)
    if "result" in obj and isinstance(obj["result"], dict):
        obj = obj["result"]
    if "complex" in obj:
        obj = obj["complex"]
    return SimplicialComplex.from_json(obj)


def _load_generators(path: str) -> list[Generator]:
    obj = _read_json(path)
    if isinstance(obj, dict):
        obj = obj["generators"]
    return [Generator.from_json(x) for x in obj]


def _data(args) -> ValidAlgebraicData:
    form = _load_form(args.form)
    delta = args.delta if args.delta == "auto" else _parse_vector(args.delta)
    return ValidAlgebraicData.from_form(form, delta)


# ------------------------------------------------------------------ commands
# each returns (result_json, text, exit_code, citations)

def cmd_forms_canon(args):
    f = _load_form(args.file)
    c = canonical_decomposition(f)
    res = {
        "canonical_form": c.to_json(),
        "genus": genus(f),
        "r": r_invariant(f),
        "t": t_invariant(f),
        "boundary_group": boundary_group(f).to_json(),
        "table": c.table(),
    }
    text = c.table() + f"\nboundary  {boundary_group(f)}"
    return res, text, EXIT_OK, ["g = (rk M - rk dM - 2r)/2 and t = 2g"]


def cmd_forms_arf(args):
    obj = _read_json(args.file)
    q = QuadraticRefinement.from_json(obj)
    a = arf_invariant(q)
    res = {"genus": q.genus, "qvals_hyperbolic": list(q.values), "arf": a}
    return res, f"Arf invariant: {a}", EXIT_OK, ["Arf = sum q(e_i) q(f_i) mod 2"]


def cmd_forms_cut(args):
    f = _load_form(args.file)
    alphas = _parse_vectors(args.alphas)
    c = cut(f, alphas)
    cf = canonical_decomposition(c)
    res = {"cut_form": c.to_json(), "canonical_form": cf.to_json(), "genus_before": genus(f), "genus_after": cf.genus}
    return res, f"rank {c.rank}\n" + cf.table(), EXIT_OK, ["cut: restriction of the form to the common kernel"]


def cmd_forms_delta(args):
    f = _load_form(args.file)
    d = max_order_delta(f)
    res = d.to_json()
    text = f"delta = {list(d.representative)} of order {res['order']} in {d.ambient}"
    return res, text, EXIT_OK, ["delta generates a cyclic summand of maximal order (infinite order first)"]


def cmd_arc_build(args):
    data = _data(args)
    spec = data.coset_spec(args.height, args.max_dim)
    K = build_complex(spec, vertex_cap=args.vertex_cap)
    res = {"spec": spec.to_json(), "f_vector": K.f_vector(), "complex": K.to_json()}
    return res, f"f-vector {K.f_vector()}", EXIT_OK, []


def cmd_arc_verify(args):
    data = _data(args)
    spec = data.coset_spec(args.height, args.max_dim)
    K = build_complex(spec, vertex_cap=args.vertex_cap)
    rep = verify_wcm(spec, target_dim=args.target_dim, complex=K, vertex_cap=args.vertex_cap, nnz_cap=args.nnz_cap)
    res = rep.to_json()
    res["delta"] = data.delta.to_json()
    code = VERDICT_EXIT[rep.verdict]
    if args.cut_bounds:
        cb = cut_bounds_check(data, K)
        res["cut_bounds"] = cb
        fails = sum(v["weak_bound_failures"] + v["strong_bound_failures"] for v in cb["dims"].values())
        cb["sampled_exact_agreement"] = _sample_exact_cuts(data, K, args.seed)
        if fails or not cb["sampled_exact_agreement"]:
            code = EXIT_COUNTEREXAMPLE
    lines = [f"t = {rep.params['t']}, target dimension {rep.params['target_dim']}, f-vector {rep.params['f_vector']}"]
    for e in rep.thresholds:
        lines.append(f"  ({e['condition']}) {e['object']}: {e['status']}")
    lines.append(f"pi1: {rep.pi1_status}")
    lines.append(f"verdict: {rep.verdict}")
    cites = ["weakly Cohen-Macaulay of dimension t - 2", "cut genus >= g - (p+1), and >= g - p when the boundary is nonzero"]
    return res, "\n".join(lines), code, cites


def _sample_exact_cuts(data, K, seed, samples: int = 50) -> bool:
    """Recompute a seeded sample of cut genera with the exact (non-batched) path."""
    from .skew_forms import cut_genera_batch

    rng = random.Random(seed)
    for p in range(0, min(2, K.dim) + 1):
        S = K.simplices(p)
        for i in sorted(rng.sample(range(len(S)), min(samples, len(S)))):
            alphas = [K.vertices[j] for j in S[i]]
            g_exact = genus(cut(data.form, alphas))
            g_batch, _ = cut_genera_batch(data.form, np.array([alphas], dtype=np.int64))
            if int(g_batch[0]) != g_exact:
                return False
    return True


def cmd_arc_tpair(args):
    if args.form:
        f = _load_form(args.form)
        n, G = f.rank, f.gram
    else:
        obj = _read_json(args.gens)
        n = int(obj["ambient_rank"])
        G = IntMatrix.from_json(obj["submodule_gens"]) if isinstance(obj["submodule_gens"], dict) else as_matrix(obj["submodule_gens"])
    t = t_of_pair(n, G)
    res = {"t": t}
    text = f"t = {t}"
    if args.search_height is not None:
        size, exhaustive, witness = t_search(n, G, args.search_height)
        res["search"] = {"size": size, "exhaustive": exhaustive, "witness": [list(v) for v in witness]}
        text += f"\nsearch found a unimodular set of size {size}" + (" (exhaustive)" if exhaustive else "")
    return res, text, EXIT_OK, ["t = number of unit invariant factors of the submodule"]


def cmd_complexes_homology(args):
    K = _load_complex(args.file)
    top = args.max_degree if args.max_degree is not None else max(K.dim, 0)
    H = reduced_homology(K, top, nnz_cap=args.nnz_cap)
    conn = homological_connectivity(K, top, nnz_cap=args.nnz_cap)
    res = {"f_vector": K.f_vector(), "reduced_homology": H.to_json(), "homological_connectivity": conn}
    return res, str(H) + f"\nhomological connectivity: {conn}", EXIT_OK, []


def cmd_complexes_join(args):
    J = join(_load_complex(args.first), _load_complex(args.second))
    return {"f_vector": J.f_vector(), "complex": J.to_json()}, f"f-vector {J.f_vector()}", EXIT_OK, [
        "conn(X * Y) >= conn X + conn Y + 2"
    ]


def cmd_complexes_pi1(args):
    K = _load_complex(args.file)
    s = pi1_trivial(K)
    return {"pi1": s.value}, f"pi1: {s.value}", EXIT_OK, []


def cmd_halgebra_series(args):
    gens = _load_generators(args.gens)
    S = free_gca_series(gens, args.max_g, args.max_d)
    return {"series": S.to_json()}, S.table(), EXIT_OK, []


def cmd_halgebra_quotient(args):
    gens = _load_generators(args.gens)
    by = next((x for x in gens if x.name == args.by), None)
    if by is None:
        raise UsageError(f"no generator named {args.by!r}")
    S = quotient_by_slope_zero_generator(free_gca_series(gens, args.max_g, args.max_d), by)
    return {"series": S.to_json()}, S.table(), EXIT_OK, []


def cmd_halgebra_cdga(args):
    pres = FreeCdgaPresentation.from_json(_read_json(args.file))
    H = cdga_homology(pres, args.max_g, args.max_d)
    return {"presentation": pres.to_json(), "homology": H.to_json()}, H.table(), EXIT_OK, []


def cmd_halgebra_step0(args):
    one = step0_single_generator(args.k, args.max_g)
    two = step0_two_generators(args.max_g)
    ok1, w1 = one["vanishing_d_lt_g"]
    ok2, w2 = two["vanishing_d_lt_g_minus_1"]
    res = {
        "k": args.k,
        "single_generator": {
            "generators": [x.to_json() for x in one["generators"]],
            "series": one["series"].to_json(),
            "quotient": one["quotient"].to_json(),
            "quotient_on_slope_line": one["on_slope_line"],
            "vanishing_d_lt_g": {"holds": ok1, "witness": w1},
        },
        "two_generators": {
            "presentation": two["presentation"].to_json(),
            "homology": two["homology"].to_json(),
            "vanishing_d_lt_g_minus_1": {"holds": ok2, "witness": w2},
        },
    }
    text = "\n\n".join([
        "Lambda(s0,[s0,s0]):\n" + one["series"].table(),
        "quotient by s0:\n" + one["quotient"].table(),
        "homology of (Lambda(s1,rho), d rho = s1^2):\n" + two["homology"].table(),
    ])
    cites = [f"quotient supported on the line of slope (k-1)/2 = {args.k - 1}/2", "homology is Q[s1]/(s1^2)"]
    return res, text, EXIT_OK, cites


def cmd_stability_table(args):
    tab = stability_table(args.n, args.coeffs, args.max_g)
    return tab, table_markdown(tab).rstrip("\n"), EXIT_OK, [tab["citation"]]


def cmd_stability_check(args):
    v = theorem_a(StabilityQuery(args.n, args.coeffs, args.g, args.d))
    res = v.to_json()
    cites = [v.citation]
    if args.n >= 5 and args.n != 7 and args.coeffs == "Z":
        D = theorem_b_dichotomy(args.n)
        res["dichotomy"] = D.to_json()
        res["dichotomy"]["branch_ii_verdict"] = D.branch_ii(args.g, args.d).to_json()
        res["dichotomy"]["branch_i_flags_bidegree"] = D.branch_i_flags(args.g, args.d)
        cites.append(D.clause_ii.citation())
    text = f"{v.case_label}: surjective={v.surjective} isomorphism={v.isomorphism}"
    return res, text, EXIT_OK, cites


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled cross-checks (recorded in the report)")
    common.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)
    common.add_argument("--nnz-cap", type=int, default=DEFAULT_NNZ_CAP)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="human-readable report")
    common.set_defaults(format="json")

    p = _Parser(prog="arcforms", description="Exact computations with skew forms, arc complexes and stability ranges.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, func, help_):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=func)
        return q

    forms = groups.add_parser("forms", help="skew-symmetric forms").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    leaf(forms, "canon", cmd_forms_canon, "canonical form and invariants").add_argument("file")
    leaf(forms, "arf", cmd_forms_arf, "Arf invariant of a quadratic refinement").add_argument("file")
    q = leaf(forms, "cut", cmd_forms_cut, "restrict to the kernel of unimodular functionals")
    q.add_argument("file")
    q.add_argument("--alphas", required=True, help='functionals, e.g. "1,0,0,0;0,1,0,0"')
    leaf(forms, "delta", cmd_forms_delta, "boundary element of maximal order").add_argument("file")

    arc = groups.add_parser("arc", help="arc complexes").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, func, help_ in (("build", cmd_arc_build, "build the truncated complex"),
                              ("verify-wcm", cmd_arc_verify, "check the weak Cohen-Macaulay thresholds")):
        q = leaf(arc, name, func, help_)
        q.add_argument("--form", required=True)
        q.add_argument("--delta", default="auto", help='"auto" or a vector like "0,0,1"')
        q.add_argument("--height", type=int, required=True)
        q.add_argument("--max-dim", type=int, default=2)
        if name == "verify-wcm":
            q.add_argument("--target-dim", type=int, default=None, help="defaults to t - 2")
            q.add_argument("--cut-bounds", action="store_true", help="also check cut genus bounds on every simplex")
    q = leaf(arc, "t-pair", cmd_arc_tpair, "the invariant t(N, N')")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--form")
    src.add_argument("--gens", help='JSON with "ambient_rank" and "submodule_gens"')
    q.add_argument("--search-height", type=int, default=None, help="also run the witness search")

    cx = groups.add_parser("complexes", help="simplicial complexes").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(cx, "homology", cmd_complexes_homology, "reduced integral homology")
    q.add_argument("file")
    q.add_argument("--max-degree", type=int, default=None)
    q = leaf(cx, "join", cmd_complexes_join, "simplicial join")
    q.add_argument("first")
    q.add_argument("second")
    leaf(cx, "pi1", cmd_complexes_pi1, "fundamental group triviality").add_argument("file")

    ha = groups.add_parser("halgebra", help="bigraded algebras").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, func in (("series", cmd_halgebra_series), ("quotient", cmd_halgebra_quotient)):
        q = leaf(ha, name, func, f"free graded-commutative {name}")
        q.add_argument("--gens", required=True, help="JSON list of generators")
        q.add_argument("--max-g", type=int, required=True)
        q.add_argument("--max-d", type=int, required=True)
        if name == "quotient":
            q.add_argument("--by", required=True, help="name of the degree-0 generator")
    q = leaf(ha, "cdga", cmd_halgebra_cdga, "homology of a free CDGA")
    q.add_argument("file")
    q.add_argument("--max-g", type=int, required=True)
    q.add_argument("--max-d", type=int, required=True)
    q = leaf(ha, "step0", cmd_halgebra_step0, "the two universal examples")
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--max-g", type=int, default=8)

    st = groups.add_parser("stability", help="stability ranges").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(st, "table", cmd_stability_table, "table of ranges")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--coeffs", required=True, choices=["Z", "Z_half", "Q", "F2"])
    q.add_argument("--max-g", type=int, default=20)
    q = leaf(st, "check", cmd_stability_check, "verdict for one bidegree")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--coeffs", required=True, choices=["Z", "Z_half", "Q", "F2"])
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    return p


def _params(args) -> dict:
    skip = {"func", "out", "format", "group", "cmd", "seed"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, str) and k in ("file", "first", "second", "form", "gens") and v:
            v = str(Path(v).resolve())
        out[k] = v
    return out


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = f"{args.group} {args.cmd}"
    try:
        result, text, code, cites = args.func(args)
    except ResourceLimitError as e:
        print(f"arcforms: resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except UsageError as e:
        print(f"arcforms: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, KeyError, TypeError) as e:
        print(f"arcforms: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "text":
        body = f"{text}\n"
        if cites:
            body += "".join(f"[{c}]\n" for c in cites)
        body += f"seed: {args.seed}\n"
    elif command == "stability table" and args.format == "json":
        body = table_json({**result, "seed": args.seed})
    else:
        report = {
            "command": command,
            "params": _params(args),
            "seed": args.seed,
            "citations": cites,
            "exit_code": code,
            "result": result,
        }
        body = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    try:
        _emit(args, body)
    except OSError as e:
        print(f"arcforms: cannot write {args.out}: {e.strerror}", file=sys.stderr)
        return EXIT_USAGE
    return code


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, BigradedSeries):
        return o.to_json()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
