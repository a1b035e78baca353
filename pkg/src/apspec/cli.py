"""Command-line front end.

Every command prints a plain-text report; with ``--out DIR`` the report and
its tables are also written there as ``report.txt`` and TSV files, and
``--plot`` adds PNG figures next to the TSVs.  Exit codes: 0 success,
1 failed verification, 2 bad input, 3 non-primitive substitution.
"""

from __future__ import annotations

import argparse
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import connes_metrics as cm
from . import khomology as kh
from . import laplacian_pb as lp
from . import pisot_form as pf
from . import sft_selfsimilar as ss
from . import symbolic_core as sc
from . import tree_structures as ts
from . import zeta_spectral as zs
from .qfield import QElement

EXIT_VERIFY, EXIT_INPUT, EXIT_PRIMITIVE = 1, 2, 3


class Report:
    def __init__(self, args):
        self.lines = []
        self.tables = {}
        self.figures = []
        self.out = Path(args.out) if args.out else None
        self.plot = args.plot

    def line(self, text: str = ""):
        self.lines.append(text)

    def table(self, name: str, header: str, rows):
        self.tables[name] = [header] + [r if isinstance(r, str) else "\t".join(map(_fmt, r)) for r in rows]

    def figure(self, draw):
        if self.plot:
            self.figures.append(draw)

    def finish(self) -> None:
        text = "\n".join(self.lines) + "\n"
        sys.stdout.write(text)
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "report.txt").write_text(text, encoding="utf-8")
        for name, rows in self.tables.items():
            (self.out / name).write_text("\n".join(rows) + "\n", encoding="utf-8")
        for draw in self.figures:
            draw(self.out)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _num(x, digits: int = 10) -> str:
    if isinstance(x, QElement):
        return f"{float(x):.{digits}g} (exact: {x})"
    if isinstance(x, complex):
        if abs(x.imag) < 1e-14:
            return f"{x.real:.{digits}g}"
        return f"{x.real:.{digits}g}{x.imag:+.{digits}g}i"
    return f"{float(x):.{digits}g}"


def _short(x) -> str:
    if isinstance(x, QElement):
        return str(x)
    return _num(x, 8)


# ------------------------------------------------------------------ inputs


def _load(args) -> sc.Substitution:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    subst = sc.parse_substitution(text)
    if not sc.is_primitive(subst):
        m = sc.substitution_matrix(subst)
        raise NotPrimitiveInput(f"substitution is not primitive: no power of {m.tolist()} is positive")
    return subst


class InputError(ValueError):
    pass


class NotPrimitiveInput(ValueError):
    pass


def _delta(args) -> ts.LengthFunction:
    try:
        return ts.LengthFunction.parse(args.delta)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _slope(coeffs, tail: str) -> sc.SturmianSlope:
    coeffs = tuple(int(c) for c in coeffs)
    if not coeffs or any(c < 1 for c in coeffs):
        raise InputError("continued fraction coefficients must be integers >= 1")
    if tail == "none":
        return sc.SturmianSlope(coeffs)
    if tail == "cycle":
        return sc.SturmianSlope(coeffs, repeat=True)
    # auto: continue a constant, geometric or arithmetic pattern, else cycle
    if len(set(coeffs)) == 1:
        return sc.SturmianSlope(coeffs, repeat=True)
    if len(coeffs) >= 3:
        ratios = {b / a for a, b in zip(coeffs, coeffs[1:])}
        if len(ratios) == 1 and (r := ratios.pop()) == int(r) and r >= 2:
            first, r = coeffs[0], int(r)
            return sc.SturmianSlope(coeffs, rule=lambda k: first * r ** (k - 1))
        diffs = {b - a for a, b in zip(coeffs, coeffs[1:])}
        if len(diffs) == 1:
            first, d = coeffs[0], diffs.pop()
            if d > 0:
                return sc.SturmianSlope(coeffs, rule=lambda k: first + d * (k - 1))
    return sc.SturmianSlope(coeffs, repeat=True)


def _header(rep: Report, title: str, args):
    rep.line(f"# {title}")
    rep.line(f"depth = {args.depth}; delta: {_delta(args).describe()}; scheme = {args.scheme}; "
             f"choice = {args.choice}; seed = {args.seed}")


# ------------------------------------------------------------------ commands


def cmd_analyze(args) -> int:
    subst = _load(args)
    rep = Report(args)
    _header(rep, f"analyze {subst.name or Path(args.file).name}", args)
    m = sc.substitution_matrix(subst)
    perr = sc.perron(subst)
    rep.line(f"alphabet: {' '.join(subst.alphabet)}")
    for a, img in subst.rules:
        rep.line(f"  {a} -> {img}")
    rep.line(f"substitution matrix M[i,j] = |sigma(j)|_i: {m.tolist()}")
    rep.line("primitive: yes")
    rep.line(f"PF eigenvalue: {_num(perr.eigenvalue)}")
    rep.line("letter frequencies: " + " ".join(f"{a}={float(x):.10g}" for a, x in zip(subst.alphabet, perr.right)))
    rep.line("tile lengths (left PF, sum 1): " + " ".join(f"{a}={float(x):.10g}" for a, x in zip(subst.alphabet, perr.left)))
    pdata = pf.pisot_data(subst)
    _pisot_lines(rep, pdata)

    oracle = sc.language_of(subst)
    for d in oracle.diagnostics:
        rep.line(f"diagnostic: {d}")
    table = sc.complexity(oracle, args.depth)
    rep.line(f"complexity (n <= {args.depth}): p = {list(table.p)}; right special = {list(table.p_rs)}; "
             f"privileged = {list(table.p_pr)}")
    rep.table("complexity.tsv", "n\tp\tp_rs\tp_pr", zip(table.n, table.p, table.p_rs, table.p_pr))
    priv = sc.privileged(oracle, None, args.depth)
    rep.line(f"privileged words of length <= {args.depth}:")
    for k, words in enumerate(priv.levels):
        rep.line(f"  order {k}: {' '.join(w or 'ε' for w in words)}")
    rep.table("privileged.tsv", "order\tword", ((k, w or "ε") for k, ws in enumerate(priv.levels) for w in ws))

    est = zs.tree_abscissa(oracle, args.abscissa_depth, _delta(args))
    rep.line(f"s0 = {est.limsup:.6f} (tree of words, {_delta(args).describe()}, depth {args.abscissa_depth}; "
             f"regression {est.least_squares:.6f})")
    if args.rho is not None:
        graph = ss.build_substitution_graph(subst)
        lam = perr.eigenvalue
        s0 = math.log(float(lam)) / -math.log(args.rho)
        rep.line(f"s0 = log(lambda_PF)/(-log rho) = log({lam})/log({1 / args.rho:g}) = {s0:.10f} "
                 f"(self-similar, rho = {args.rho:g})")
        try:
            zf = zs.closed_form_zeta(graph, ss.maximal_fundamental(graph), args.rho)
            terms = " + ".join(f"({_short(c)})*({_short(l)})^n" for c, l in zip(zf.coefficients, zf.eigenvalues))
            rep.line(f"#H_n = {terms} (maximal fundamental edges, unoriented)")
        except ss.NotDiagonalizableError as exc:
            rep.line(f"zeta closed form unavailable: {exc}")
        meas = zs.graph_measure(graph, 3)
        rep.table("measure.tsv", "path\tweight",
                  ((ss.path_label(graph, p), w) for p, w in sorted(meas.weights.items(), key=lambda kv: (len(kv[0]), kv[0]))))
    else:
        meas = zs.tree_measure(oracle, min(args.depth, 6))
        rep.table("measure.tsv", "word\tweight",
                  ((w or "ε", x) for w, x in sorted(meas.weights.items(), key=lambda kv: (len(kv[0]), kv[0]))))
    rep.line(f"spectral measure written for depth <= {meas.depth}")
    from . import plotting
    rep.figure(lambda out: plotting.complexity_plot(table, out / "complexity.png"))
    rep.finish()
    return 0


def _pisot_lines(rep: Report, d: pf.PisotData):
    rep.line(f"characteristic polynomial: {list(d.char_poly)}; minimal polynomial of theta: {list(d.min_poly)}")
    theta = d.exact_theta if d.exact_theta is not None else d.theta
    rep.line(f"theta = {_num(theta)}")
    for j, (z, r, a) in enumerate(zip(d.conjugates, d.moduli, d.phases), start=2):
        rep.line(f"  theta_{j} = {_num(z)}  |theta_{j}| = {r:.10g}  phase = {a:.10g}")
    rep.line(f"Pisot: {'yes' if d.is_pisot else 'no (' + d.reason + ')'}; unimodular: {'yes' if d.unimodular else 'no'}")


def _fundamental(graph, args):
    if getattr(args, "fundamental", "max") == "two-pair":
        return ss.two_pair_fundamental(graph)
    return ss.maximal_fundamental(graph)


def cmd_zeta(args) -> int:
    subst = _load(args)
    if args.rho is None:
        raise InputError("zeta needs --rho (self-similar lengths rho^n)")
    rep = Report(args)
    _header(rep, f"zeta {subst.name or Path(args.file).name}", args)
    graph = ss.build_substitution_graph(subst)
    fund = _fundamental(graph, args)
    rep.line(f"graph matrix A[v,w] = #edges v->w: {graph.matrix.tolist()}")
    rep.line(f"fundamental pairs ({'oriented' if args.oriented else 'unoriented'}): "
             + ", ".join(f"({graph.edges[a].label()},{graph.edges[b].label()})" for a, b in fund.unordered()))
    rep.line(f"condition (C): {'holds' if ss.condition_c(graph, fund) else 'fails'}")
    try:
        zf = zs.closed_form_zeta(graph, fund, args.rho, oriented=args.oriented)
    except ss.NotDiagonalizableError as exc:
        raise InputError(str(exc)) from None
    rep.line("zeta(z) = sum_j C_j lambda_j rho^z / (1 - lambda_j rho^z), #H_n = sum_j C_j lambda_j^n:")
    for j, (c, lam) in enumerate(zip(zf.coefficients, zf.eigenvalues)):
        rep.line(f"  term {j}: C = {_num(c)}; lambda = {_num(lam)}")
    rep.line(f"s0 = log(lambda_PF)/(-log rho) = {zf.s0:.10f}")
    rep.line(f"residue at s0 = C_0/(-log rho) = {_num(zf.residue(0))}")
    rep.line(f"pole lattice period 2 pi/log(1/rho) = {abs(zf.period):.10f}")
    n_max = args.depth
    counts = [ss.count_H_n(graph, fund, n, args.oriented) for n in range(1, n_max + 1)]
    rep.line(f"#H_n (n = 1..{n_max}): {counts}")
    s = zf.s0 + 1.0
    partial, acc = [], 0.0
    for n, c in enumerate(counts, start=1):
        acc += c * args.rho ** (n * s)
        partial.append(acc)
    closed = zf(s).real
    rep.line(f"zeta({s:.6f}) closed form = {closed:.12g}; partial sum to n = {n_max}: {partial[-1]:.12g}")
    rep.table("zeta_partial.tsv", "n\tcount\tpartial_sum", zip(range(1, n_max + 1), counts, partial))
    from . import plotting
    rep.figure(lambda out: plotting.zeta_plot(list(range(1, n_max + 1)), partial, closed, out / "zeta_partial.png", s))
    rep.finish()
    return 0


def _laplacian_setup(args, subst, depth):
    if args.scheme == "selfsim":
        graph = ss.build_substitution_graph(subst)
        lam = float(sc.perron(subst).eigenvalue)
        rho = args.rho if args.rho is not None else 1 / lam
        tree = ss.build_path_tree(graph, depth)
        measure = zs.graph_measure(graph, depth + 1).weights
        edges = ts.horizontal_edges(tree, "min", depth)
        delta = ts.LengthFunction("geometric", rho)
        s0 = math.log(lam) / -math.log(rho)
        return tree, measure, edges, delta, s0
    oracle = sc.language_of(subst)
    tree = ts.build_tree(oracle, depth)
    measure = zs.tree_measure(oracle, depth).weights
    scheme = "priv" if args.scheme == "priv" else args.scheme
    edges = ts.horizontal_edges(tree, scheme, depth, oracle)
    return tree, measure, edges, _delta(args), 1.0


def cmd_laplacian(args) -> int:
    subst = _load(args)
    rep = Report(args)
    _header(rep, f"laplacian {subst.name or Path(args.file).name}", args)
    tree, measure, edges, delta, s0 = _laplacian_setup(args, subst, args.depth)
    s = args.s if args.s is not None else s0
    form = lp.assemble_form(tree, edges, delta, s, args.depth, measure=measure,
                            scheme="min-average" if args.scheme in ("max", "min-average") else "plain")
    es = lp.eigensystem(form)
    rep.line(f"s = {s:g}; cells at depth {args.depth}: {len(form.cells)}; reference s0 = {s0:.6g}")
    rep.line("eigenvalues of -Delta_s (nonnegative); constants in the kernel: "
             f"{'yes' if abs(form.value(np.ones(len(form.cells)))) < 1e-12 else 'no'}")
    checks = lp.phi_checks(form)
    if checks:
        rep.line(f"phi_v candidates: {len(checks)}; max Rayleigh residual {max(c.residual for c in checks):.3e}")
    labels = es.labels()
    rep.table("eigen.tsv", "depth\tindex\teigenvalue\tbranching_vertex",
              ((args.depth, i, float(v), "none" if lab is None else tree.name(lab))
               for i, (v, lab) in enumerate(zip(es.eigenvalues, labels))))
    rep.line(f"largest eigenvalue (depth {args.depth}): {float(es.eigenvalues.max()):.10g}")
    weyl_table = ()
    if len(es.eigenvalues) >= 30:
        wf = lp.weyl_count({args.depth: es.eigenvalues})
        weyl_table = wf.table
        rep.line(f"Weyl fit exponent (depth {args.depth}): {wf.exponent:.4f} +- {wf.stderr:.4f}; s0/2 = {s0 / 2:.4f}")
    else:
        rep.line(f"Weyl fit skipped: {len(es.eigenvalues)} eigenvalues (< 30)")
    rep.table("weyl.tsv", "lambda\tcount", weyl_table)
    from . import plotting
    rep.figure(lambda out: plotting.spectrum_plot(es.eigenvalues, weyl_table, out / "spectrum.png"))
    rep.finish()
    return 0


def cmd_distance(args) -> int:
    subst = _load(args)
    oracle = sc.language_of(subst)
    rep = Report(args)
    _header(rep, f"distance {args.xi} {args.eta}", args)
    for w in (args.xi, args.eta):
        if not oracle.contains(w):
            raise InputError(f"{w!r} is not a factor of the language")
    delta = _delta(args)
    depth = max(len(args.xi), len(args.eta), args.depth)
    tree = ts.build_tree(oracle, depth)
    tau = ts.make_choice(tree, "leftmost")
    xi = ts.evaluate_choice(tau, tree, args.xi, depth)
    eta = ts.evaluate_choice(tau, tree, args.eta, depth)
    lo, hi = cm.d_inf(xi, eta, delta), cm.d_sup_tree(xi, eta, delta, tree)
    rep.line(f"paths continued by the leftmost choice to depth {depth}: {xi.end} | {eta.end}")
    rep.line(f"tree form: d_inf = {lo.value:.10g}; d_sup = {hi.value:.10g} (tail estimate {hi.tail:.3g})")
    ext = cm.Extender(oracle, depth, 16 * depth)
    px, py = ext(args.xi), ext(args.eta)
    plo, phi_ = cm.d_inf_privileged(px, py, delta), cm.d_sup_privileged(px, py, delta)
    rep.line(f"privileged form (prefixes of length {16 * depth}): d_inf = {plo.value:.10g}; "
             f"d_sup = {phi_.value:.10g} (tail estimate {phi_.tail:.3g})")
    rep.finish()
    return 0


def _order_depths(args):
    out, d = [], 4
    while d <= args.order_depth:
        out.append(d)
        d *= 2
    return tuple(out)


def _order_report(rep: Report, oracle, args):
    delta = _delta(args)
    verdict = cm.check_delta_conditions(delta)
    rep.line(f"delta conditions: upper c = {verdict.upper_constant:.4g} ({'ok' if verdict.upper_ok else 'fails'}), "
             f"doubling c = {verdict.lower_constant:.4g} ({'ok' if verdict.lower_ok else 'fails'})")
    report = cm.order_criterion(oracle, _order_depths(args), delta, seed=args.seed)
    rep.line("pairs: all distinct factors of each depth, continued 16x; privileged-word distances")
    for d, r in zip(report.depths, report.max_ratios):
        rep.line(f"  depth {d}: max d_sup/d_inf = {r:.8f}")
    rep.line(report.verdict_line())
    rep.table("order.tsv", "depth\tmax_ratio\twitness_pair", report.tsv_rows())
    from . import plotting
    rep.figure(lambda out: plotting.order_plot(report, out / "order.png"))


def cmd_order(args) -> int:
    subst = _load(args)
    rep = Report(args)
    _header(rep, f"order {subst.name or Path(args.file).name}", args)
    _order_report(rep, sc.language_of(subst), args)
    rep.finish()
    return 0


def cmd_sturmian(args) -> int:
    slope = _slope(args.coefficients, args.tail)
    rep = Report(args)
    _header(rep, f"sturmian {slope.label()}", args)
    oracle = sc.sturmian_oracle(slope, args.depth)
    table = sc.complexity(oracle, args.depth)
    rep.line(f"slope theta = {float(slope.value()):.12g}")
    rep.line(f"complexity (n <= {args.depth}): {list(table.p)}")
    rep.table("complexity.tsv", "n\tp\tp_rs\tp_pr", zip(table.n, table.p, table.p_rs, table.p_pr))
    if args.order:
        _order_report(rep, oracle, args)
    else:
        est = zs.tree_abscissa(oracle, args.abscissa_depth, _delta(args))
        rep.line(f"s0 = {est.limsup:.6f} (tree of words, depth {args.abscissa_depth}; regression {est.least_squares:.6f})")
    rep.finish()
    return 0


def cmd_khom(args) -> int:
    subst = _load(args)
    oracle = sc.language_of(subst)
    rep = Report(args)
    _header(rep, f"khom {subst.name or Path(args.file).name}", args)
    tree = ts.build_tree(oracle, args.depth)
    if args.realize:
        try:
            values = kh.read_homomorphism(Path(args.realize).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read {args.realize}: {exc.strerror}") from None
        inp = kh.realize(values, tree, args.depth)
        rep.line(f"realized with {len(inp.positive_edges)} positive edges (depth {args.depth})")
        if inp.empty_levels:
            rep.line(f"levels without edges: {list(inp.empty_levels)} (Fredholm module only there)")
        rep.table("realization.tsv", "level\tsource\trange\tmultiplicity\tsign", kh.realization_rows(inp))
        status = 0
        if args.verify:
            ok = all(kh.pairing(inp, v) == values[v] for n in range(args.depth + 1) for v in tree.levels[n])
            rep.line("ROUNDTRIP OK" if ok else "ROUNDTRIP FAILED")
            status = 0 if ok else EXIT_VERIFY
        rep.finish()
        return status
    edges = tuple(h for h in ts.horizontal_edges(tree, "min", args.depth) if h.orientation > 0)
    if args.choice == "weighted":
        meas = zs.tree_measure(oracle, args.depth).weights
        tau = ts.make_choice(tree, "weighted", measure=meas, seed=args.seed)
    else:
        tau = ts.make_choice(tree, "leftmost")
    inp = kh.PairingInput(tree, edges, tau, args.depth)
    table = kh.pairing_table(inp)
    rep.line(f"minimal edges, {len(edges)} positive; pairing phi(chi_v) for |v| <= {args.depth}:")
    rep.line(f"phi(1) = {table[tree.root]}")
    rows = [(tree.name(v), table[v]) for n in range(args.depth + 1) for v in tree.levels[n]]
    for name, val in rows[1: 1 + len(tree.levels[1])]:
        rep.line(f"  {name}\t{val}")
    rep.table("pairing.tsv", "word\tvalue", rows)
    rep.finish()
    return 0


def cmd_pisot(args) -> int:
    subst = _load(args)
    rep = Report(args)
    _header(rep, f"pisot {subst.name or Path(args.file).name}", args)
    d = pf.pisot_data(subst)
    _pisot_lines(rep, d)
    if not d.is_pisot:
        rep.finish()
        return 0
    phase = pf.phase_condition(d)
    if phase.vacuous:
        rep.line("phase condition: vacuous (single subleading conjugate)")
    else:
        rep.line(f"phase condition: {'holds' if phase.holds else 'fails'} on |k|,|k'| <= 10^4; "
                 f"nearest miss {phase.nearest_miss:.3e} at {phase.witness}")
    rep.line(pf.COUPLING_NOTE)
    rep.line("dynamical spectrum assumed pure point")
    freq = pf.frequencies(subst)
    graph = ss.build_substitution_graph(subst)
    geom = ss.tile_geometry(graph)
    lg_pairs = [(e.id, f.id) for e in graph.edges for f in graph.edges if e.id < f.id and e.range == f.range]
    K = pf.k_matrix(geom, lg_pairs, freq)
    rep.line(f"K = {float(K):.10g} (all microtile pairs sharing a tile, count frequencies)")
    rows = []
    for a, b in lg_pairs:
        ah = ss.microtile_vector(graph, geom, (a, b))
        t = graph.edges[a].range
        ev = pf.laplacian_eigenvalue(d, freq[t], ah, args.beta, "longitudinal")
        rows.append(("longitudinal", graph.edges[a].label(), graph.edges[b].label(), _num(ah, 8), ev.value))
    if d.degree <= 3 and d.unimodular:
        choice = ss.self_similar_choice(graph)
        for e in graph.edges:
            for f in graph.edges:
                if e.id < f.id and e.source == f.source:
                    try:
                        rv = ss.return_vector(graph, geom, choice, (e.id, f.id))
                    except ss.NonMergingError:
                        continue
                    vec = rv.vector
                    if not isinstance(vec, QElement):
                        continue
                    ev = pf.laplacian_eigenvalue(d, freq[e.source], vec, args.beta, "transversal")
                    rows.append(("transversal", e.label(), f.label(), _num(vec, 8), ev.value))
    rep.line(f"per-edge eigenvalues at beta = {args.beta:g}:")
    for r in rows:
        rep.line(f"  {r[0]} ({r[1]}, {r[2]}): vector {r[3]}; eigenvalue {r[4]:.10g}")
    rep.table("pisot_edges.tsv", "flavor\tedge\tedge\tvector\teigenvalue", rows)
    rep.finish()
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=8, help="truncation depth (default 8)")
    common.add_argument("--delta", default="recip", help="length function: recip or geom:RHO")
    common.add_argument("--rho", type=float, help="self-similar scale in (0,1)")
    common.add_argument("--scheme", default="max", choices=["max", "min", "priv", "selfsim"])
    common.add_argument("--choice", default="leftmost", choices=["leftmost", "weighted"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="directory for report.txt and TSV tables")
    common.add_argument("--plot", action="store_true", help="also write PNG figures (needs matplotlib and --out)")
    common.add_argument("--abscissa-depth", type=int, default=2000, help="depth of the abscissa estimate")
    common.add_argument("--order-depth", type=int, default=64, help="largest depth of the order criterion")

    parser = argparse.ArgumentParser(prog="apspec", description="Spectral triples of aperiodic subshifts")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, file_arg=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if file_arg:
            p.add_argument("file", help="substitution file (one 'letter -> image' rule per line)")
        p.set_defaults(func=func)
        return p

    add("analyze", cmd_analyze, "matrix, Perron data, complexity, privileged words, s0")
    z = add("zeta", cmd_zeta, "closed-form zeta function of the self-similar triple")
    z.add_argument("--fundamental", default="max", choices=["max", "two-pair"])
    z.add_argument("--oriented", action="store_true")
    lap = add("laplacian", cmd_laplacian, "choice-averaged Laplacian spectrum")
    lap.add_argument("--s", type=float, help="exponent s (default: s0)")
    dist = add("distance", cmd_distance, "d_inf and d_sup between two words")
    dist.add_argument("xi")
    dist.add_argument("eta")
    add("order", cmd_order, "Lipschitz equivalence of d_inf and d_sup (empirical)")
    k = add("khom", cmd_khom, "Fredholm pairing and its realization")
    k.add_argument("--realize", help="TSV of word<TAB>integer values to realize")
    k.add_argument("--verify", action="store_true", help="check pairing(realize(target)) = target")
    st = add("sturmian", cmd_sturmian, "Sturmian slope from continued fraction coefficients", file_arg=False)
    st.add_argument("coefficients", nargs="+", type=int)
    st.add_argument("--order", action="store_true")
    st.add_argument("--tail", default="auto", choices=["auto", "cycle", "none"],
                    help="continuation of the coefficient list (auto: constant/geometric/arithmetic pattern, else cycle)")
    p = add("pisot", cmd_pisot, "Pisot data and Dirichlet form eigenvalues")
    p.add_argument("--beta", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = os.environ.get("APSPEC_THREADS")
    if threads is not None and (not threads.isdigit() or int(threads) < 1):
        print(f"error: APSPEC_THREADS must be a positive integer, got {threads!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.plot and not args.out:
        print("error: --plot needs --out", file=sys.stderr)
        return EXIT_INPUT
    if args.rho is not None and not 0 < args.rho < 1:
        print("error: --rho must lie in (0, 1)", file=sys.stderr)
        return EXIT_INPUT
    if args.depth < 1:
        print("error: --depth must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except sc.SubstitutionParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotPrimitiveInput, sc.NotPrimitiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRIMITIVE
    except (InputError, sc.InsufficientCoefficientsError, kh.SheafError, kh.ObstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
