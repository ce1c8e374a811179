"""Command-line interface.

Exit codes: 0 verdict or payload produced, 2 input error, 3 internal limit hit.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from time import perf_counter

from .core import Morphism, PrefixView, expand, load_morphism
from .dynamical import eigenvalue_obstruction, host_profile
from .errors import AutoseqError, InputError, InternalLimit, ParameterInvalid
from .gaps import cobham_gap_test, minsky_papert_test, run_first_occurrence
from .kernel import dfao_from_uniform, kernel_lower_bound, minimize, targeted_kernel_family, uniform_kernel_size
from .report import Report
from .seqlib import MAX_LENGTH, generate, parse_generator
from .stats import block_complexity, frequencies
from .strategy import AnalysisConfig, analyze, analyze_sequence

EXIT_OK, EXIT_INPUT, EXIT_LIMIT = 0, 2, 3


class _Input:
    def __init__(self, kind: str, echo: dict, morphism: Morphism | None, prefix: PrefixView):
        self.kind = kind
        self.echo = echo
        self.morphism = morphism
        self.prefix = prefix


def _int_list(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out or min(out) < 2:
        raise argparse.ArgumentTypeError("bases must be integers >= 2")
    return out


def _pow2ish(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        if text.startswith("2^"):
            return 1 << int(text[2:])
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    return v


def _read_prefix(path: str) -> PrefixView:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    body = " ".join(ln.strip() for ln in lines if ln.strip())
    items = body.split()
    if len(items) == 1:
        items = list(items[0])
    return PrefixView.from_symbols(items, sorted(set(items)), name=Path(path).name)


def _load_input(args, length: int) -> _Input:
    chosen = [x for x in (args.morphism, args.seq, args.prefix) if x is not None]
    if len(chosen) != 1:
        raise ParameterInvalid("give exactly one of --morphism, --seq, --prefix")
    if args.morphism is not None:
        m = load_morphism(args.morphism)
        return _Input("morphism", {"kind": "morphism", "path": args.morphism, "spec": m.to_spec()},
                      m, expand(m, 0))
    if args.seq is not None:
        spec = parse_generator(args.seq)
        p = generate(spec, min(length, MAX_LENGTH))
        return _Input("sequence", {"kind": "sequence", "generator": spec.to_dict(), "shift": p.shift},
                      None, p)
    p = _read_prefix(args.prefix)
    return _Input("prefix", {"kind": "prefix", "path": args.prefix, "length": len(p)}, None, p)


def _horizon(inp: _Input, requested: int) -> int:
    avail = inp.prefix.available()
    return requested if avail is None else min(requested, avail)


def _emit(args, report: Report, human: list[str]) -> None:
    if args.json is None:
        sys.stdout.write("\n".join(human) + "\n")
        return
    text = report.to_json()
    if args.json == "-":
        sys.stdout.write(text)
    else:
        Path(args.json).write_text(text, encoding="utf-8")
        sys.stdout.write("\n".join(human) + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> int:
    cfg = AnalysisConfig()
    kw = {}
    for name in ("horizon", "kernel_horizon", "k_max", "n_max", "q_max"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if args.bases:
        kw["bases"] = args.bases
    if args.exhaustive:
        kw["exhaustive"] = True
    cfg = cfg.with_(**kw)
    inp = _load_input(args, cfg.horizon)
    if inp.morphism is not None:
        verdict = analyze(inp.morphism, cfg)
    else:
        verdict = analyze_sequence(inp.prefix, cfg)
    report = Report.build("analyze", inp.echo, cfg.to_dict(), verdict)
    human = [f"verdict: {verdict.label} [{'certified' if verdict.certified else 'advisory'}]"]
    for e in verdict.evidence:
        human.append(f"  - {e.criterion} ({e.tag.value}, {e.grade}, {e.outcome}): {e.summary}")
    for r in verdict.remarks:
        human.append(f"  note: {r}")
    for d in verdict.diagnostics:
        human.append(f"  diagnostic [{d['stage']}] {d['error']}: {d['message']}")
    _emit(args, report, human)
    return EXIT_LIMIT if verdict.internal_limit_hit else EXIT_OK


def cmd_expand(args) -> int:
    if args.length < 0:
        raise ParameterInvalid("--length must be >= 0")
    inp = _load_input(args, max(args.length, 1))
    p = inp.prefix
    n = args.length
    if n == 0:
        return EXIT_OK
    word = p.word(n)
    single = all(len(s) == 1 for s in p.symbols)
    sys.stdout.write(("".join(word) if single else " ".join(word)) + "\n")
    return EXIT_OK


def cmd_kernel(args) -> int:
    inp = _load_input(args, args.horizon)
    H = _horizon(inp, args.horizon)
    p = inp.prefix
    t = perf_counter()
    if args.family is None:
        est = kernel_lower_bound(p, args.q, args.kmax, H)
        what = "greedy breadth-first search"
    else:
        fam = args.family
        if fam == "const":
            fam = ("const", args.r)
        est = targeted_kernel_family(p, args.q, fam, args.kmax, H)
        what = f"family {est.family}"
    payload = {"kernel": est.to_dict()}
    human = [f"{est.size} pairwise distinct {args.q}-kernel elements witnessed ({what}, horizon {H})"]
    for i, (k, r) in enumerate(est.representatives[:32]):
        human.append(f"  k={k} r={r}" + (f"  witnesses vs earlier: {est.witnesses[i]}" if i else ""))
    if est.family is not None and est.equal_pairs:
        human.append(f"  equal on the prefix: {est.equal_pairs}")
    m = inp.morphism
    if m is not None and m.is_uniform() and m.uniform_length == args.q:
        d = minimize(dfao_from_uniform(m))
        payload["exact"] = {"dfao": d.to_dict(), "kernel_size": uniform_kernel_size(d)}
        human.append(f"exact: minimal DFAO has {d.num_states} states, kernel size {payload['exact']['kernel_size']}")
    report = Report.build("kernel", inp.echo, {"q": args.q, "k_max": args.kmax, "horizon": H,
                                               "family": args.family, "r": args.r},
                          payloads=payload, timings={"kernel": round(perf_counter() - t, 6)})
    _emit(args, report, human)
    return EXIT_OK


def cmd_complexity(args) -> int:
    inp = _load_input(args, args.horizon)
    H = _horizon(inp, args.horizon)
    t = perf_counter()
    prof = block_complexity(inp.prefix, args.nmax, H)
    human = [f"growth: {prof.growth}" + (f" (slope {prof.slope} on n in {prof.fit_range})" if prof.slope else ""),
             "   n   p(n)   A(n)"]
    for n in range(1, args.nmax + 1):
        human.append(f"{n:4d} {prof.p(n):6d} {prof.A(n):6d}")
    report = Report.build("complexity", inp.echo, {"n_max": args.nmax, "horizon": H},
                          payloads={"complexity": prof.to_dict()},
                          timings={"complexity": round(perf_counter() - t, 6)})
    _emit(args, report, human)
    return EXIT_OK


def cmd_gaps(args) -> int:
    inp = _load_input(args, args.horizon)
    H = _horizon(inp, args.horizon)
    p = inp.prefix
    p.codes(H)
    symbols = [args.symbol] if args.symbol is not None else list(p.symbols)
    t = perf_counter()
    payload = {"gaps": [], "ratio": [], "runs": []}
    human = []
    for s in symbols:
        try:
            g = cobham_gap_test(p, s, H)
            payload["gaps"].append(g.to_dict())
            human.append(f"symbol {s}: gap dichotomy {g.kind} {g.which} "
                         f"(count/log n top {g.log_ratio_top}, mid {g.log_ratio_mid}, "
                         f"min tail gap {g.profile.min_tail_gap})")
        except InputError as exc:
            human.append(f"symbol {s}: gap test skipped: {exc}")
        try:
            r = minsky_papert_test(p, s, H)
            payload["ratio"].append(r.to_dict())
            human.append(f"symbol {s}: ratio test {r.kind} (max tail ratio {r.limsup_estimate})")
        except InputError as exc:
            human.append(f"symbol {s}: ratio test skipped: {exc}")
        rp = run_first_occurrence(p, args.nmax, H, symbol=s)
        payload["runs"].append(rp.to_dict())
        shown = [v for v in rp.first[:12]]
        human.append(f"symbol {s}: first run of length n starts at {shown}")
    report = Report.build("gaps", inp.echo, {"horizon": H, "symbol": args.symbol, "n_max": args.nmax},
                          payloads=payload, timings={"gaps": round(perf_counter() - t, 6)})
    _emit(args, report, human)
    return EXIT_OK


def cmd_dynamics(args) -> int:
    if args.morphism is None:
        raise ParameterInvalid("dynamics needs --morphism")
    inp = _load_input(args, 1)
    m = inp.morphism
    t = perf_counter()
    payload = {}
    human = []
    try:
        hp = host_profile(m)
        payload["host"] = hp.to_dict()
        human.append("return-word length divisibility grows for q in "
                     f"{[q for q, g in sorted(hp.grows.items()) if g]}")
    except InputError as exc:
        human.append(f"host profile skipped: {exc}")
    try:
        rep = eigenvalue_obstruction(m, args.qmax, args.jmax)
        payload["obstruction"] = rep.to_dict()
        obs = rep.obstructed_qs()
        human.append(f"det {rep.det}, allowed denominator primes {list(rep.constraint.allowed_primes)}")
        human.append(f"obstructed for {len(obs)} of {len(rep.per_q)} bases q in 2..{args.qmax}")
        for q in sorted(rep.per_q):
            s = rep.per_q[q]
            if s.reason == "residue-cycle":
                ev = s.evidence
                human.append(f"  q={q}: Obstructed (residue-cycle): lengths mod {ev['modulus']} cycle "
                             f"{ev['cycle']} without reaching 0, forcing j = {ev['forces_j']}")
            elif s.status != "Obstructed":
                human.append(f"  q={q}: NotObstructed")
        for note in rep.notes:
            human.append(f"  note: {note}")
    except InputError as exc:
        human.append(f"eigenvalue obstruction skipped: {exc}")
    if not payload:
        raise ParameterInvalid("; ".join(human))
    report = Report.build("dynamics", inp.echo, {"q_max": args.qmax, "j_max": args.jmax},
                          payloads=payload, timings={"dynamics": round(perf_counter() - t, 6)})
    _emit(args, report, human)
    return EXIT_OK


def cmd_frequencies(args) -> int:
    inp = _load_input(args, args.horizon)
    H = _horizon(inp, args.horizon)
    t = perf_counter()
    rep = frequencies(inp.prefix, inp.morphism, args.ell, H)
    human = []
    for i, k in enumerate(rep.keys):
        exact = f" exact {rep.exact[i]}" if rep.exact else ""
        irr = " irrational" if k in rep.irrational_keys else ""
        human.append(f"{k}: {rep.empirical[i]:.6f}{exact}{irr}")
    human += [f"note: {n}" for n in rep.notes]
    report = Report.build("frequencies", inp.echo, {"ell": args.ell, "horizon": H},
                          payloads={"frequencies": rep.to_dict()},
                          timings={"frequencies": round(perf_counter() - t, 6)})
    _emit(args, report, human)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_input(sp):
    g = sp.add_argument_group("input (exactly one)")
    g.add_argument("--morphism", metavar="FILE", help="morphism spec file")
    g.add_argument("--seq", metavar="NAME", help="built-in generator, e.g. liouville, poly:1,0,0")
    g.add_argument("--prefix", metavar="FILE", help="file with a finite prefix")
    sp.add_argument("--json", nargs="?", const="-", metavar="FILE",
                    help="write the JSON report to FILE (or standard output)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="autoseq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="run the full decision pipeline")
    _add_input(sp)
    sp.add_argument("--bases", type=_int_list, help="bases to test, e.g. 2,3 (default 2..16)")
    sp.add_argument("--horizon", type=_pow2ish, help="prefix length (default 2^20)")
    sp.add_argument("--kernel-horizon", dest="kernel_horizon", type=_pow2ish, help="default 2^16")
    sp.add_argument("--kmax", dest="k_max", type=int, help="kernel depth (default 8)")
    sp.add_argument("--nmax", dest="n_max", type=int, help="block length bound (default 64)")
    sp.add_argument("--qmax", dest="q_max", type=int, help="obstruction sweep bound (default 64)")
    sp.add_argument("--exhaustive", action="store_true", help="run every stage even after a certified result")
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("expand", help="print a prefix")
    _add_input(sp)
    sp.add_argument("--length", type=_pow2ish, required=True)
    sp.set_defaults(fn=cmd_expand)

    sp = sub.add_parser("kernel", help="witnessed kernel lower bounds")
    _add_input(sp)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=8)
    sp.add_argument("--horizon", type=_pow2ish, default=1 << 16)
    sp.add_argument("--family", choices=["const", "qk-k", "qk-1"])
    sp.add_argument("--r", type=int, default=0, help="offset for --family const")
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("complexity", help="block complexity and appearance")
    _add_input(sp)
    sp.add_argument("--nmax", type=int, default=64)
    sp.add_argument("--horizon", type=_pow2ish, default=1 << 20)
    sp.set_defaults(fn=cmd_complexity)

    sp = sub.add_parser("gaps", help="gap dichotomy, ratio test and first run occurrences")
    _add_input(sp)
    sp.add_argument("--symbol")
    sp.add_argument("--nmax", type=int, default=64)
    sp.add_argument("--horizon", type=_pow2ish, default=1 << 20)
    sp.set_defaults(fn=cmd_gaps)

    sp = sub.add_parser("dynamics", help="eigenvalue obstructions for a morphism")
    _add_input(sp)
    sp.add_argument("--qmax", type=int, default=64)
    sp.add_argument("--jmax", type=int, default=8)
    sp.set_defaults(fn=cmd_dynamics)

    sp = sub.add_parser("frequencies", help="block frequencies, exact when a morphism is given")
    _add_input(sp)
    sp.add_argument("--ell", type=int, default=1)
    sp.add_argument("--horizon", type=_pow2ish, default=1 << 16)
    sp.set_defaults(fn=cmd_frequencies)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InternalLimit as exc:
        print(f"autoseq: internal limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (AutoseqError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"autoseq: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
