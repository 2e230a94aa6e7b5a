"""
Command-line front end.

    operadlab COMMAND [--preset NAME | --input FILE] [options]

Reports go to stdout (or --output) as '#'-prefixed echo lines followed by
a tab-separated table with a header row.  Wall time and diagnostics go to
stderr, so the report bytes depend only on the input and the options.
Exit status: 0 success, 1 axiom or assertion failure, 2 parse or
configuration error.
"""

import argparse
import re
import sys
import time

from . import io as oio
from .linalg import QQ, field_from_string

COMMANDS = ("check", "homology", "cotangent", "tangent", "derivations", "kaehler", "hochschild",
            "quillen", "reduced-quillen", "fiber-check", "pirashvili-compare", "stable-cohomotopy",
            "deform1", "artinian", "algebra-quillen", "kaehler-compare")

CAP_N = 6
CAP_P = 8
CAP_WINDOW = (-6, 6)

TABLE_HEADER = ("index", "dim", "stabilized", "p_max", "N")


class ConfigError(ValueError):
    pass


class Failure(Exception):
    """Axiom or assertion failure; the report is still printed."""


# ---------------------------------------------------------------------------
# configuration

def _window(s):
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", s)
    if not m:
        raise argparse.ArgumentTypeError("expected a..b, got %r" % s)
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise argparse.ArgumentTypeError("empty window %r" % s)
    return lo, hi


def build_parser():
    ap = argparse.ArgumentParser(prog="operadlab", description="Quillen and Hochschild cohomology of operads.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--preset", help="com, ass, i, nilpotent2, square_zero")
    src.add_argument("--input", help="operad description document (JSON)")
    ap.add_argument("--max-arity", type=int, default=4, help="arity ceiling N of a preset (default 4)")
    ap.add_argument("--field", default=None, help="Q or a prime p (default Q)")
    ap.add_argument("--bar-len", type=int, default=4, help="bar length p_max (default 4)")
    ap.add_argument("--degrees", type=_window, default=(-3, 3), help="cohomological window a..b")
    ap.add_argument("--coeff", default="self",
                    help="coefficients: self, zero, free, cotangent, kernel, t, k; suffix [n] shifts")
    ap.add_argument("--method", default="auto", choices=("auto", "bar", "resolve-source", "resolve-target"))
    ap.add_argument("--algebra", default=None, help="k or trunc:n (k[x]/(x^n)); else the document's algebra block")
    ap.add_argument("--ring", default="dual", help="artinian: dual, kxk or ext:d0,d1,...")
    ap.add_argument("--direction", default=None, help="deform1: degree dims d0,d1,... of the direction A")
    ap.add_argument("--output", default=None, help="write the report here instead of stdout")
    ap.add_argument("--unsafe", action="store_true", help="lift the hard caps on N, p_max and the window")
    return ap


class Session:
    def __init__(self, args):
        self.args = args
        self.command = args.command
        if not args.unsafe:
            if args.max_arity > CAP_N:
                raise ConfigError("--max-arity %d exceeds the cap %d (use --unsafe)" % (args.max_arity, CAP_N))
            if args.bar_len > CAP_P:
                raise ConfigError("--bar-len %d exceeds the cap %d (use --unsafe)" % (args.bar_len, CAP_P))
            lo, hi = args.degrees
            if lo < CAP_WINDOW[0] or hi > CAP_WINDOW[1]:
                raise ConfigError("--degrees outside [%d, %d] (use --unsafe)" % CAP_WINDOW)
        if args.max_arity < 0 or args.bar_len < 1:
            raise ConfigError("--max-arity must be >= 0 and --bar-len >= 1")
        try:
            self.field = field_from_string(args.field) if args.field else None
        except ValueError as e:
            raise ConfigError(str(e))
        self._doc = None
        self._P = None

    # -- inputs
    def document(self):
        if self._doc is None and self.args.input:
            self._doc = oio.load_document(self.args.input)
        return self._doc

    @property
    def F(self):
        return self.operad().F

    def operad(self):
        if self._P is not None:
            return self._P
        from .operads import preset
        a = self.args
        if a.input:
            P = oio.parse_operad(self.document())
            if self.field is not None and self.field != P.F:
                raise ConfigError("--field %s disagrees with the document's field" % a.field)
        else:
            name = a.preset or "com"
            try:
                P = preset(name, N=a.max_arity, field=self.field or QQ)
            except ValueError as e:
                raise ConfigError(str(e))
        self._P = P
        return P

    def coefficients(self, P):
        from .ibmod import cotangent_ib, free_ib, self_ib, shift_ib, square_zero_kernel, ZeroIB
        from .collection import unit_E
        m = re.fullmatch(r"([a-z-]+)(?:\[(-?\d+)\])?", self.args.coeff)
        if not m:
            raise ConfigError("bad --coeff %r" % self.args.coeff)
        kind, n = m.group(1), int(m.group(2) or 0)
        if kind == "self":
            M = self_ib(P)
        elif kind == "zero":
            M = ZeroIB(P)
        elif kind == "free":
            if len(P.colors) != 1:
                raise ConfigError("free coefficients need a single color")
            M = free_ib(P, unit_E(P.colors, P.F, P.ceiling), P.ceiling - 1)
        elif kind == "cotangent":
            M = cotangent_ib(P)
        elif kind == "kernel":
            M = square_zero_kernel(P, self_ib(P))
        else:
            raise ConfigError("unknown --coeff %r for this command" % kind)
        return shift_ib(M, n) if n else M

    def algebra(self, P):
        from .algebras import ground_algebra, truncated_polynomial
        spec = self.args.algebra
        if spec is None:
            doc = self.document()
            if doc and "algebra" in doc:
                A = oio.parse_algebra(doc["algebra"], P)
                return A
            spec = "trunc:3"
        if spec == "k":
            return ground_algebra(P)
        m = re.fullmatch(r"trunc:(\d+)", spec)
        if m and int(m.group(1)) >= 1:
            return truncated_polynomial(P, int(m.group(1)))
        raise ConfigError("bad --algebra %r" % spec)

    def setup(self):
        from .barhom import BarSetup
        a = self.args
        return BarSetup(a.bar_len, a.degrees, None, a.method)

    def echo(self):
        a = self.args
        src = "input=%s" % a.input if a.input else "preset=%s" % (a.preset or "com")
        fld = a.field or "Q"
        lo, hi = a.degrees
        return ["# command: %s" % self.command,
                "# config: %s field=%s max-arity=%d bar-len=%d degrees=%d..%d coeff=%s method=%s"
                % (src, fld, a.max_arity, a.bar_len, lo, hi, a.coeff, a.method)]


# ---------------------------------------------------------------------------
# report helpers

def _tsv(rows):
    return ["\t".join(str(x) for x in r) for r in rows]


def _seq_name(seq):
    return "%s->%s" % (",".join(seq[0]), seq[1])


def _table_lines(T):
    out = ["# table: %s" % T.kind]
    out += ["# caveat: %s" % c for c in T.caveats]
    if T.method:
        out.append("# method: %s" % T.method)
    out.append("\t".join(TABLE_HEADER))
    out += _tsv(r[1:] for r in T.tsv_rows())
    unstable = [n for n, _, s in T.rows if not s]
    out.append("# stabilized: %d/%d rows%s" % (len(T.rows) - len(unstable), len(T.rows),
                                                "" if not unstable else " (unstabilized: %s)"
                                                % ",".join(str(n) for n in unstable)))
    return out


def _level_lines(C, top, header=("seq", "degree", "dim")):
    out = ["\t".join(header)]
    for seq in C.all_seqs(top):
        for n, d in sorted(C.level(seq).dims().items()):
            if d:
                out.append("%s\t%d\t%d" % (_seq_name(seq), n, d))
    return out


def _kv(pairs):
    return ["quantity\tvalue"] + _tsv(pairs)


# ---------------------------------------------------------------------------
# commands

def cmd_check(S):
    from .operads import check_operad
    P = S.operad()
    rep = check_operad(P)
    lines = ["# violations: %d (checked %d)" % (len(rep), rep.checked)] + rep.lines()
    if not rep.ok:
        raise Failure(lines)
    if S.document() and "algebra" in S.document():
        from .algebras import check_algebra
        arep = check_algebra(S.algebra(P))
        lines.append("# algebra violations: %d" % len(arep))
        lines += arep.lines()
        if not arep.ok:
            raise Failure(lines)
    return lines


def cmd_homology(S):
    from .chaincore import homology
    P = S.operad()
    out = ["seq\tdegree\tbetti"]
    for seq in P.all_seqs():
        L = P.level(seq)
        if not L.labels:
            continue
        for n, d in homology(L).rows:
            if d:
                out.append("%s\t%d\t%d" % (_seq_name(seq), n, d))
    return out


def cmd_cotangent(S):
    from .ibmod import check_ibmod, cotangent_ib
    P = S.operad()
    L = cotangent_ib(P)
    rep = check_ibmod(L)
    lines = _level_lines(L, L.ceiling)
    if not rep.ok:
        raise Failure(lines + rep.lines())
    return lines


def cmd_tangent(S):
    from .ibmod import hom_ib, cotangent_ib, tangent_structures
    P = S.operad()
    M = S.coefficients(P)
    tan = len(tangent_structures(P, M))
    hom = len(hom_ib(cotangent_ib(P, M.ceiling), M))
    lines = _kv([("tangent", tan), ("hom_cotangent", hom)])
    if tan != hom:
        raise Failure(lines + ["# tangent structures and maps out of the cotangent module disagree"])
    return lines


def cmd_derivations(S):
    P = S.operad()
    if S.args.algebra is not None or (S.document() and "algebra" in S.document()):
        from .algebras import derivation_check, self_module
        A = S.algebra(P)
        der, tan, om = derivation_check(A, self_module(A))
        lines = _kv([("der", der), ("tangent_end", tan), ("hom_kaehler", "" if om is None else om)])
        if der != tan or (om is not None and om != der):
            raise Failure(lines)
        return lines
    from .ibmod import check_derivation, derivation_space
    M = S.coefficients(P)
    D = derivation_space(P, M, 0)
    for b in D.basis:
        rep = check_derivation(P, M, b, 0)
        if not rep.ok:
            raise Failure(_kv([("der", D.dim)]) + rep.lines())
    return _kv([("der", D.dim)])


def cmd_kaehler(S):
    P = S.operad()
    if S.args.algebra is not None or (S.document() and "algebra" in S.document()):
        from .algebras import kaehler_algebra
        Om, _ = kaehler_algebra(S.algebra(P))
        return ["degree\tdim"] + ["%d\t%d" % (n, d) for n, d in sorted(Om.V.dims().items()) if d]
    from .ibmod import kaehler_ib
    Om, _ = kaehler_ib(P)
    return _level_lines(Om, Om.ceiling)


def _operad_table(S, fn):
    P = S.operad()
    M = S.coefficients(P)
    return _table_lines(fn(P, M, S.setup()))


def cmd_hochschild(S):
    from .barhom import hochschild
    return _operad_table(S, hochschild)


def cmd_quillen(S):
    from .barhom import quillen
    return _operad_table(S, quillen)


def cmd_reduced_quillen(S):
    from .barhom import reduced_quillen
    return _operad_table(S, reduced_quillen)


def cmd_fiber_check(S):
    from .barhom import fiber_sequence_report
    P = S.operad()
    M = S.coefficients(P)
    R = fiber_sequence_report(P, M, S.setup())
    ks = sorted(R.tables["Omega_HQ"])
    out = ["# strict: %s" % ", ".join("%s=%s" % (k, R.strict[k]) for k in ("tan", "middle", "rank_ad", "der", "exact")),
           "# euler: %s" % ("ok" if R.euler else "FAILED"),
           "# conclusive: %s" % ("yes" if R.conclusive else "no"),
           "k\tOmega_HQ\tprod_M\tHQ_red"]
    for k in ks:
        out.append("%d\t%d\t%d\t%d" % (k, R.tables["Omega_HQ"][k], R.tables["prod_M"][k], R.tables["HQ_red"][k]))
    if not R.strict["exact"] or (R.conclusive and not R.euler):
        raise Failure(out)
    return out


def cmd_pirashvili_compare(S):
    from .pirashvili import compare_categories, compare_com_cotangent
    N = S.args.max_arity
    F = S.field or QQ
    if N < 1:
        raise ConfigError("pirashvili-compare needs --max-arity >= 1")
    lines = []
    ok = True
    if N <= 3:
        rep = compare_categories(N, F)
        lines.append("# categories: %d checks, %d failures" % (rep.checked, len(rep)))
        ok = ok and rep.ok
    c = compare_com_cotangent(N, F)
    lines += _kv([("objects", c.objects), ("morphisms", c.morphisms), ("failures", len(c.failures))])
    if not (ok and c.ok):
        raise Failure(lines)
    return lines


def cmd_stable_cohomotopy(S):
    from .pirashvili import constant_functor, gamma_from_ib, stable_cohomotopy, t_functor
    N = S.args.max_arity
    F = S.field or QQ
    kind = S.args.coeff
    if kind == "t":
        Fm = t_functor(N, F)
    elif kind == "k":
        Fm = constant_functor(N, F)
    else:
        P = S.operad()
        if P.name != "Com" and not S.args.input:
            raise ConfigError("stable-cohomotopy with --coeff %s needs the Com operad" % kind)
        Fm = gamma_from_ib(S.coefficients(P), P.ceiling - 1)
    return _table_lines(stable_cohomotopy(Fm, S.setup()))


def _ring(S):
    from .deform import dual_numbers, product_kk, square_zero_ext, direction
    F = S.field or QQ
    r = S.args.ring
    if r == "dual":
        return dual_numbers(F)
    if r == "kxk":
        return product_kk(F)
    m = re.fullmatch(r"ext:(\d+(?:,\d+)*)", r)
    if m:
        return square_zero_ext(direction({n: int(x) for n, x in enumerate(m.group(1).split(","))}, F))
    raise ConfigError("bad --ring %r" % r)


def cmd_artinian(S):
    from .deform import is_artinian
    R = oio.parse_artinian(S.document()["artinian"], S.field or QQ) if S.document() and "artinian" in S.document() \
        else _ring(S)
    w = is_artinian(R)
    lines = _kv([("ring", R.name), ("artinian", "yes" if w.ok else "no"), ("reason", w.reason or "")])
    return lines


def cmd_deform1(S):
    from .deform import def1_direction, def1_space, direction
    P = S.operad()
    doc = S.document()
    A = None
    if S.args.direction:
        try:
            A = direction({n: int(x) for n, x in enumerate(S.args.direction.split(","))}, P.F)
        except ValueError:
            raise ConfigError("bad --direction %r" % S.args.direction)
    elif doc and "direction" in doc:
        A = oio.parse_direction(doc["direction"], P.F)
    D = def1_space(P)
    pairs = [("def1", D.dim), ("cocycles", len(D.cocycles)), ("gauge", D.gauge_rank)]
    if A is not None:
        pairs.append(("def1_direction", def1_direction(P, A).dim))
    lines = _kv(pairs)
    if any(any(P.level(s).d) for s in P.all_seqs(P.ceiling)):
        lines.insert(0, "# caveat: P has a differential; the strict gauge quotient may be coarser than weak equivalence")
    return lines


def cmd_algebra_quillen(S):
    from .algebras import quillen_algebra, self_module
    P = S.operad()
    A = S.algebra(P)
    return _table_lines(quillen_algebra(A, self_module(A), S.setup()))


def cmd_kaehler_compare(S):
    from .algebras import kaehler_comparison
    P = S.operad()
    A = S.algebra(P)
    W = kaehler_comparison(P, A)
    lines = _kv([("relative_dim", W.dims[0]), ("kaehler_dim", W.dims[1]), ("well_defined", "yes" if W.well_defined else "no"),
                 ("rank", W.rank), ("bijective", "yes" if W.bijective else "no")])
    if not W.bijective:
        raise Failure(lines)
    return lines


HANDLERS = {c: globals()["cmd_" + c.replace("-", "_")] for c in COMMANDS}


# ---------------------------------------------------------------------------

def _join_windows(argv):
    # argparse reads "-3..3" as an option; glue it to its flag
    out = []
    it = iter(argv)
    for a in it:
        if a == "--degrees":
            nxt = next(it, None)
            out.append(a if nxt is None else "--degrees=" + nxt)
        else:
            out.append(a)
    return out


def run(argv=None):
    """(exit status, report lines, output path or None)."""
    ap = build_parser()
    argv = _join_windows(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), [], None
    S = None
    try:
        S = Session(args)
        body = HANDLERS[args.command](S)
        return 0, S.echo() + body, args.output
    except Failure as f:
        return 1, S.echo() + f.args[0], args.output
    except oio.OperadAxiomError as e:
        print("operadlab: %s" % e, file=sys.stderr)
        return 1, S.echo() + ["# violations: %d" % len(e.report)] + e.report.lines(), args.output
    except (oio.FormatError, ConfigError) as e:
        print("operadlab: %s" % e, file=sys.stderr)
        return 2, [], None
    except AssertionError as e:
        print("operadlab: assertion failed: %s" % e, file=sys.stderr)
        return 1, [], None
    except (NotImplementedError, ValueError, KeyError) as e:
        print("operadlab: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 2, [], None


def main(argv=None):
    t0 = time.perf_counter()
    code, lines, out = run(argv)
    if lines:
        text = "\n".join(lines) + "\n"
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    print("wall time: %.3fs" % (time.perf_counter() - t0), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
