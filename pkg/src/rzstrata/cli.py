"""Command-line interface: tables, dl, lattices, tree and verify.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors
(including parameters beyond the desk-scale bounds).
"""

import argparse
import csv
import hashlib
import importlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import weyl


class _Lazy:
    """Module imported on first attribute access; keeps numba out of `tables`."""

    def __init__(self, name):
        self._name = name

    def __getattr__(self, attr):
        return getattr(importlib.import_module(self._name), attr)


hm = _Lazy("rzstrata.hermitian")
P = _Lazy("rzstrata.padlat")
vf = _Lazy("rzstrata.verify")

FORMATS = {
    "tables": ("text", "json", "csv"),
    "dl": ("json", "text", "csv"),
    "lattices": ("text", "json", "csv", "dot"),
    "tree": ("dot", "json", "text"),
    "verify": ("text", "json"),
}
SUITE_ORDER = ("weyl", "dl", "f1", "f3", "hulls", "superspecial", "intersections", "split", "adlv", "open")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p: int = 3
    m: int = 2
    a: int = 1
    case: str = "inert"
    side: str = "minus"
    strict_tau: bool = True
    format: str = ""
    output: str = ""
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.p < 3 or not _is_prime(self.p):
            raise UsageError(f"p must be an odd prime, got {self.p}")
        if self.m < 1:
            raise UsageError("m must be at least 1")
        if self.a < 0:
            raise UsageError("a must be nonnegative")
        if self.case not in ("split", "inert"):
            raise UsageError(f"unknown case {self.case!r}")
        if self.side not in ("plus", "minus"):
            raise UsageError(f"unknown side {self.side!r}")
        allowed = FORMATS[self.subcommand]
        if not self.format:
            self.format = allowed[0]
        if self.format not in allowed:
            raise UsageError(f"format {self.format!r} is not available for {self.subcommand}")
        return self


def _is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def _emit(config, text):
    if not text.endswith("\n"):
        text += "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, separators=(",", ":"))


def _set_text(s):
    return "{" + ",".join(str(i) for i in s) + "}"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _columns(header, rows):
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# tables


def table_dict(case):
    rows = weyl.coxeter_table(case)
    return {
        "case": case,
        "rows": [{"sigma_set": list(r.sigma_set), "w": r.w, "complement": list(r.complement),
                  "supp_sigma": list(r.supp_sigma)} for r in rows],
    }


def render_table(case, fmt):
    d = table_dict(case)
    header = ["sigma_set", "w", "complement", "supp_sigma"]
    rows = [[_set_text(r["sigma_set"]), r["w"], _set_text(r["complement"]), _set_text(r["supp_sigma"])]
            for r in d["rows"]]
    if fmt == "json":
        return _json(d) + "\n"
    if fmt == "csv":
        return _csv(header, rows)
    return f"case {case}\n" + _columns(header, rows)


def cmd_tables(config):
    _emit(config, render_table(config.case, config.format))
    return 0


# ---------------------------------------------------------------------------
# dl


def dl_counts(p, m, side):
    c = hm.stratum_counts(p, m, side)
    return {"unit": c["unit"], "w1": c["w1"], "w2": c["w2"]}


def cmd_dl(config):
    # the enumeration tests p^(6m) candidate vectors
    work = config.p ** (6 * config.m)
    if work > hm.DESK_BOUND:
        raise UsageError(f"p^(6m) = {work} candidates exceed the bound {hm.DESK_BOUND}")
    c = dl_counts(config.p, config.m, config.side)
    if config.format == "json":
        text = _json(c)
    elif config.format == "csv":
        text = _csv(["stratum", "count"], [[k, v] for k, v in c.items()])
    else:
        text = _columns(["stratum", "count"], [[k, v] for k, v in c.items()])
    _emit(config, text)
    return 0


# ---------------------------------------------------------------------------
# lattices


def short_hash(L):
    return hashlib.blake2b(L.digest().encode(), digest_size=6).hexdigest()


def star_graph(p):
    """L_std with the type-{0,2} and type-3 lattices inside it, edges by containment."""
    L = P.context(p, 1, 1).standard()
    a02, a3 = P.type1_down(L)
    nodes = [P.VertexLat(L, "1")] + [P.VertexLat(X, "02") for X in a02] + [P.VertexLat(X, "3") for X in a3]
    edges = [(L, X, "1>02") for X in a02] + [(L, X, "1>3") for X in a3]
    for D in a02:
        for T in a3:
            if D.contains(T):
                edges.append((D, T, "02>3"))
    return nodes, edges


def split_star_graph(p):
    """L_std with its p^2 + 1 neighbours in the building, Pi-normalised."""
    L = P.context(p, 1, 2).standard()
    nbrs = [P.normalize_split(X) for X in P.neighbors_split(L)]
    nodes = [P.VertexLat(L, "split")] + [P.VertexLat(X, "split") for X in nbrs]
    return nodes, [(L, X, "adjacent") for X in nbrs]


def window_graph(p, a, case):
    verts = P.enumerate_vertex_lattices(p, 1, a, case=case)
    index = {V.lattice: V for V in verts}
    edges = []
    for V in verts:
        L = V.lattice
        if case == "split":
            for X in P.neighbors_split(L):
                try:
                    Y = P.normalize_split(X)
                except P.WindowError:
                    continue
                if Y in index and L < Y:
                    edges.append((L, Y, "adjacent"))
            continue
        if V.kind == "1":
            a02, a3 = P.type1_down(L)
            edges += [(L, X, "1>02") for X in a02 if X in index]
            edges += [(L, X, "1>3") for X in a3 if X in index]
        elif V.kind == "02":
            _, down = P.type02_neighbors(L)
            edges += [(L, X, "02>3") for X in down if X in index]
    return verts, edges


def render_graph(name, nodes, edges, fmt, meta):
    order = sorted(nodes, key=lambda V: (V.kind, V.lattice.sort_key()))
    edges = sorted(edges, key=lambda e: (e[0].digest(), e[1].digest(), e[2]))
    if fmt == "dot":
        out = [f"graph {name} {{", "  node [shape=box];"]
        for V in order:
            out.append(f'  "{V.lattice.digest()}" [label="{V.kind} {short_hash(V.lattice)}"];')
        for X, Y, lab in edges:
            out.append(f'  "{X.digest()}" -- "{Y.digest()}" [label="{lab}"];')
        out.append("}")
        return "\n".join(out) + "\n"
    rows = [[V.lattice.digest(), V.kind, short_hash(V.lattice), V.lattice.vol] for V in order]
    if fmt == "json":
        d = dict(meta)
        d["nodes"] = [{"id": r[0], "type": r[1], "hash": r[2], "vol": r[3]} for r in rows]
        d["edges"] = [[X.digest(), Y.digest(), lab] for X, Y, lab in edges]
        return _json(d) + "\n"
    if fmt == "csv":
        return _csv(["id", "type", "hash", "vol"], rows)
    counts = {}
    for V in order:
        counts[V.kind] = counts.get(V.kind, 0) + 1
    head = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    body = _columns(["type", "hash", "vol"], [[r[1], r[2], r[3]] for r in rows])
    return f"{head} edges={len(edges)}\n" + body


def cmd_lattices(config):
    scope = config.extra.get("scope", "star")
    if scope == "star":
        nodes, edges = star_graph(config.p) if config.case == "inert" else split_star_graph(config.p)
    else:
        nodes, edges = window_graph(config.p, config.a, config.case)
    meta = {"case": config.case, "p": config.p, "a": config.a, "scope": scope}
    _emit(config, render_graph("lattices", nodes, edges, config.format, meta))
    return 0


# ---------------------------------------------------------------------------
# tree


def cmd_tree(config):
    radius = config.extra.get("radius", 2)
    if radius < 0:
        raise UsageError("radius must be nonnegative")
    size = sum((config.p ** 2 + 1) * config.p ** (2 * (k - 1)) for k in range(1, radius + 1)) + 1
    if size > P.DESK_BOUND // 100:
        raise UsageError(f"a ball with {size} vertices exceeds the bound")
    verts, edges, depth = P.split_tree_ball(config.p, radius)
    if config.format == "dot":
        out = ["graph tree {", "  node [shape=circle];"]
        for i, L in enumerate(verts):
            out.append(f'  "{L.digest()}" [label="d{depth[i]} vol{L.vol} {short_hash(L)}"];')
        for i, j in edges:
            out.append(f'  "{verts[i].digest()}" -- "{verts[j].digest()}";')
        out.append("}")
        text = "\n".join(out)
    elif config.format == "json":
        text = _json({"p": config.p, "radius": radius,
                      "nodes": [{"id": L.digest(), "depth": depth[i], "vol": L.vol} for i, L in enumerate(verts)],
                      "edges": [[verts[i].digest(), verts[j].digest()] for i, j in edges]})
    else:
        text = f"vertices={len(verts)} edges={len(edges)}"
    _emit(config, text)
    return 0


# ---------------------------------------------------------------------------
# verify


def _run_one(args):
    name, p, m, a, strict_tau = args
    return vf.run_suite(name, p, m, a, strict_tau)


def parse_suites(text):
    names = []
    for part in text.split(","):
        part = part.strip()
        if part == "all":
            names.extend(SUITE_ORDER)
        elif part in SUITE_ORDER:
            names.append(part)
        else:
            raise UsageError(f"unknown suite {part!r}; choose from all, {', '.join(SUITE_ORDER)}")
    seen = []
    for n in names:
        if n not in seen:
            seen.append(n)
    return seen


def cmd_verify(config):
    names = parse_suites(config.extra.get("suite", "all"))
    jobs = [(n, config.p, config.m, config.a, config.strict_tau) for n in names]
    from ._accel import thread_cap

    workers = min(thread_cap(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    reports = [r for batch in results for r in batch]
    passed = all(r.passed for r in reports)
    if config.format == "json":
        text = _json({"passed": passed, "reports": [r.as_dict() for r in reports]})
    else:
        lines = []
        for r in reports:
            lines.append(r.line())
            for k, v in r.counts.items():
                lines.append(f"    {k}: {json.dumps(vf._plain(v), separators=(',', ':'))}")
            for w in r.witnesses:
                lines.append(f"    witness: {w}")
            for n in r.notes:
                lines.append(f"    note: {n}")
        lines.append("ALL PASS" if passed else "FAILURES")
        text = "\n".join(lines)
    _emit(config, text)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument parsing

COMMANDS = {"tables": cmd_tables, "dl": cmd_dl, "lattices": cmd_lattices, "tree": cmd_tree, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=3)
    common.add_argument("--m", type=int, default=2)
    common.add_argument("--a", type=int, default=1)
    common.add_argument("--case", default="inert")
    common.add_argument("--side", default="minus")
    common.add_argument("--strict-tau", dest="strict_tau", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--format", default="")
    common.add_argument("--output", default="")
    parser = _Parser(prog="rzstrata", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.add_parser("tables", parents=[common], help="Coxeter tables")
    sub.add_parser("dl", parents=[common], help="Deligne-Lusztig stratum counts")
    lat = sub.add_parser("lattices", parents=[common], help="vertex lattices and incidences")
    lat.add_argument("--scope", choices=("star", "window"), default="star")
    tree = sub.add_parser("tree", parents=[common], help="split-case building ball")
    tree.add_argument("--radius", type=int, default=2)
    ver = sub.add_parser("verify", parents=[common], help="verification suites")
    ver.add_argument("--suite", default="all")
    return parser


def parse_config(argv):
    ns = build_parser().parse_args(argv)
    if not ns.subcommand:
        raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
    extra = {k: getattr(ns, k) for k in ("scope", "radius", "suite") if hasattr(ns, k)}
    cfg = RunConfig(ns.subcommand, ns.p, ns.m, ns.a, ns.case, ns.side, ns.strict_tau, ns.format, ns.output, extra)
    return cfg.validate()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        return COMMANDS[config.subcommand](config)
    except UsageError as e:
        sys.stderr.write(f"rzstrata: error: {e}\n")
        return 2
    except P.BoundError as e:
        sys.stderr.write(f"rzstrata: error: {e}\n")
        return 2
    except BrokenPipeError:
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    sys.exit(main())
