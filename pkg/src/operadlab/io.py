"""
The operad description document: UTF-8 JSON with the keys

    formatVersion, kind, name, field, colors, maxArity, aboveMaxArity,
    units, levels, actions, compositions

and optional algebra / module / direction blocks.  Scalars are strings
("3", "-1/2").  Sparse matrices are lists of index/coefficient rows.
"""

import json
import re
from itertools import product

from .chaincore import ChainComplex, zero_complex
from . import perms
from .collection import arity, seq_act, substitute
from .linalg import QQ, field_from_string
from .operads import Operad

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed document; `where` is a JSON path to the offending node."""

    def __init__(self, msg, where=None):
        self.where = where
        ValueError.__init__(self, msg if where is None else "%s: %s" % (where, msg))


class DimensionMismatch(FormatError):
    pass


class OperadAxiomError(ValueError):
    def __init__(self, report):
        self.report = report
        ValueError.__init__(self, "operad axioms fail: %s" % (report,))


def _name(label):
    if isinstance(label, str):
        return label
    if isinstance(label, tuple):
        return "(" + ",".join(_name(x) for x in label) + ")"
    return str(label)


def _field_name(F):
    return "Q" if F.char == 0 else str(F.p)


def _seq_doc(seq):
    return {"inputs": list(seq[0]), "output": seq[1]}


def _seq_of(doc, colors, where):
    try:
        ins = tuple(doc["inputs"])
        out = doc["output"]
    except (KeyError, TypeError):
        raise FormatError("sequence needs inputs and output", where)
    if out not in colors or any(c not in colors for c in ins):
        raise FormatError("unknown color", where)
    return (ins, out)


def _matrix_doc(rows, shape, F):
    return {"shape": list(shape),
            "entries": [[i, j, F.format(x)] for i, img in enumerate(rows) for j, x in sorted(img.items())]}


def _complex_doc(C):
    n = len(C.labels)
    return {"basis": [{"name": _name(l), "degree": k} for l, k in zip(C.labels, C.degrees)],
            "differential": _matrix_doc(C.d, (n, n), C.F)}


def _matrix_of(doc, shape, F, where):
    """Rows {j: x} from {"shape": [r, c], "entries": [[i, j, x]]} or a bare entry list."""
    if isinstance(doc, dict):
        got = doc.get("shape")
        if got is not None:
            if not (isinstance(got, list) and len(got) == 2 and all(isinstance(x, int) for x in got)):
                raise FormatError("shape must be [rows, cols]", where + ".shape")
            if tuple(got) != tuple(shape):
                raise DimensionMismatch("shape %r, expected %r" % (got, list(shape)), where + ".shape")
        ents = doc.get("entries", [])
        epath = where + ".entries"
    else:
        ents = doc
        epath = where
    if not isinstance(ents, list):
        raise FormatError("entries must be a list", epath)
    rows = [dict() for _ in range(shape[0])]
    for k, ent in enumerate(ents):
        i, j, x = _entry(ent, 2, F, "%s[%d]" % (epath, k))
        if not (0 <= i < shape[0] and 0 <= j < shape[1]):
            raise DimensionMismatch("index (%d, %d) outside %r" % (i, j, list(shape)), "%s[%d]" % (epath, k))
        if x:
            rows[i][j] = x
    return rows


def _complex_of(doc, F, where):
    basis = doc.get("basis") if isinstance(doc, dict) else None
    if not isinstance(basis, list):
        raise FormatError("basis missing", where)
    names, degs = [], []
    for k, b in enumerate(basis):
        try:
            names.append(str(b["name"]))
            degs.append(int(b["degree"]))
        except (KeyError, TypeError, ValueError):
            raise FormatError("basis element needs name and integer degree", "%s.basis[%d]" % (where, k))
    if len(set(names)) != len(names):
        raise FormatError("repeated basis name", where + ".basis")
    n = len(names)
    d = _matrix_of(doc.get("differential", []), (n, n), F, where + ".differential")
    try:
        return ChainComplex(names, degs, d, F)
    except ValueError as e:
        raise FormatError(str(e), where + ".differential")


def _entry(ent, nidx, F, where):
    if not isinstance(ent, list) or len(ent) != nidx + 1 or not all(isinstance(x, int) for x in ent[:nidx]):
        raise FormatError("expected %d indices and a scalar, got %r" % (nidx, ent), where)
    try:
        x = F.parse(ent[nidx])
    except (ValueError, ZeroDivisionError, TypeError):
        raise FormatError("bad scalar %r" % (ent[nidx],), where)
    return tuple(ent[:nidx]) + (x,)


class ExplicitOperad(Operad):
    """An operad given by finite tables."""

    def __init__(self, colors, field, max_arity, levels, transpositions, compositions, units,
                 zero_above=True, name="P", cofibrant=False):
        Operad.__init__(self, colors, field, max_arity, max_arity=max_arity, zero_above=zero_above)
        self._given = dict(levels)
        self._tr = dict(transpositions)
        self._ctab = dict(compositions)
        self._units = dict(units)
        self.name = name
        self.cofibrant = cofibrant

    def _build_level(self, seq):
        L = self._given.get(seq)
        return zero_complex(self.F) if L is None else L

    def unit(self, c):
        return self._units[c]

    def _transpose_basis(self, seq, i, t):
        M = self._tr.get((seq, t))
        if M is None:
            if seq_act(seq, perms.transposition(arity(seq), t)) == seq and self.dim(seq):
                return {i: 1}
            if self.dim(seq):
                raise KeyError("missing transposition %d on %r" % (t, seq))
            return {}
        return dict(M[i])

    def _compose_basis(self, s1, i, slot, s2, j):
        tab = self._ctab.get((s1, slot, s2))
        if tab is None:
            return {}
        return dict(tab.get((i, j), {}))


def serialize_operad(P, top=None):
    """The canonical document of P restricted to arities <= top."""
    top = P.ceiling if top is None else top
    F = P.F
    seqs = [s for s in P.all_seqs(top) if P.dim(s)]
    levels = []
    actions = []
    for s in seqs:
        doc = _seq_doc(s)
        doc.update(_complex_doc(P.level(s)))
        levels.append(doc)
        n = arity(s)
        for t in range(n - 1):
            s2 = seq_act(s, perms.transposition(n, t))
            M = _matrix_doc(P.transposition_matrix(s, t), (P.dim(s), P.dim(s2)), F)
            actions.append({"seq": _seq_doc(s), "transposition": t, "matrix": M})
    comps = []
    for s1 in seqs:
        for slot in range(arity(s1)):
            for s2 in seqs:
                if s2[1] != s1[0][slot] or arity(s1) + arity(s2) - 1 > top:
                    continue
                rows = []
                for i, j in product(range(P.dim(s1)), range(P.dim(s2))):
                    for k, x in sorted(P.compose_basis(s1, i, slot, s2, j).items()):
                        rows.append([i, j, k, F.format(x)])
                if rows:
                    shape = [P.dim(s1), P.dim(s2), P.dim(substitute(s1, slot, s2))]
                    comps.append({"seq1": _seq_doc(s1), "slot": slot, "seq2": _seq_doc(s2),
                                  "shape": shape, "entries": rows})
    return {
        "formatVersion": FORMAT_VERSION,
        "kind": "operad",
        "name": getattr(P, "name", "P"),
        "field": _field_name(F),
        "colors": list(P.colors),
        "maxArity": top,
        "aboveMaxArity": "zero",
        "cofibrant": bool(getattr(P, "cofibrant", False)),
        "units": {c: _name(P.level(P.identity_seq(c)).labels[P.unit(c)]) for c in P.colors},
        "levels": levels,
        "actions": actions,
        "compositions": comps,
    }


_FLAT = re.compile(r"\[[^\[\]{}]*\]")


def dumps(doc):
    """Sorted keys, one space indent, lists of scalars on one line."""
    txt = json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False)
    return _FLAT.sub(lambda m: re.sub(r"\s*\n\s*", " ", m.group(0)).replace("[ ", "[").replace(" ]", "]"), txt) + "\n"


def serialize(obj, top=None):
    if isinstance(obj, Operad):
        return dumps(serialize_operad(obj, top))
    raise TypeError("cannot serialize %r" % (type(obj).__name__,))


def _int(doc, key, where, default=None):
    v = doc.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise FormatError("%s must be an integer" % key, where + "." + key)
    return v


def parse_operad(doc, check=True):
    """
    An ExplicitOperad from a parsed document (dict) or its text.  With
    `check` the result is run through check_operad and OperadAxiomError
    carries the report on failure.
    """
    from .operads import check_operad
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise FormatError("not JSON (line %d, column %d): %s" % (e.lineno, e.colno, e.msg))
    if not isinstance(doc, dict):
        raise FormatError("document must be an object", "$")
    if doc.get("formatVersion") != FORMAT_VERSION:
        raise FormatError("unsupported formatVersion %r" % (doc.get("formatVersion"),), "$.formatVersion")
    if doc.get("kind", "operad") != "operad":
        raise FormatError("not an operad document", "$.kind")
    try:
        F = field_from_string(doc.get("field", "Q"))
    except ValueError as e:
        raise FormatError(str(e), "$.field")
    colors = doc.get("colors")
    if not isinstance(colors, list) or not colors or not all(isinstance(c, str) for c in colors) \
            or len(set(colors)) != len(colors):
        raise FormatError("colors must be a non-empty list of distinct strings", "$.colors")
    top = _int(doc, "maxArity", "$")
    above = doc.get("aboveMaxArity", "zero")
    if above not in ("zero", "unavailable"):
        raise FormatError("must be 'zero' or 'unavailable'", "$.aboveMaxArity")

    levels, names = {}, {}
    for k, L in enumerate(doc.get("levels", [])):
        w = "$.levels[%d]" % k
        s = _seq_of(L, colors, w)
        if arity(s) > top:
            raise FormatError("arity above maxArity", w)
        if s in levels:
            raise FormatError("repeated level", w)
        levels[s] = _complex_of(L, F, w)
        names[s] = {n: j for j, n in enumerate(levels[s].labels)}

    def dim(s):
        return len(levels[s].labels) if s in levels else 0

    units = {}
    ublock = doc.get("units")
    if not isinstance(ublock, dict):
        raise FormatError("units missing", "$.units")
    for c in colors:
        try:
            units[c] = names[((c,), c)][ublock[c]]
        except (KeyError, TypeError):
            raise FormatError("unit of color %r missing or not a basis name" % (c,), "$.units")

    trans = {}
    for k, A in enumerate(doc.get("actions", [])):
        w = "$.actions[%d]" % k
        if not isinstance(A, dict):
            raise FormatError("action must be an object", w)
        s = _seq_of(A.get("seq"), colors, w + ".seq")
        t = _int(A, "transposition", w, -1)
        if not 0 <= t < arity(s) - 1:
            raise FormatError("transposition index out of range", w + ".transposition")
        s2 = seq_act(s, perms.transposition(arity(s), t))
        trans[(s, t)] = _matrix_of(A.get("matrix", []), (dim(s), dim(s2)), F, w + ".matrix")

    comps = {}
    for k, C in enumerate(doc.get("compositions", [])):
        w = "$.compositions[%d]" % k
        if not isinstance(C, dict):
            raise FormatError("composition must be an object", w)
        s1 = _seq_of(C.get("seq1"), colors, w + ".seq1")
        s2 = _seq_of(C.get("seq2"), colors, w + ".seq2")
        slot = _int(C, "slot", w, -1)
        if not 0 <= slot < arity(s1) or s1[0][slot] != s2[1]:
            raise FormatError("slot out of range or color mismatch", w + ".slot")
        s12 = substitute(s1, slot, s2)
        shape = (dim(s1), dim(s2), dim(s12))
        got = C.get("shape")
        if got is not None and tuple(got) != shape:
            raise DimensionMismatch("shape %r, expected %r" % (got, list(shape)), w + ".shape")
        tab = {}
        for e, ent in enumerate(C.get("entries", [])):
            i, j, l, x = _entry(ent, 3, F, "%s.entries[%d]" % (w, e))
            if not (0 <= i < shape[0] and 0 <= j < shape[1] and 0 <= l < shape[2]):
                raise DimensionMismatch("index outside %r" % (list(shape),), "%s.entries[%d]" % (w, e))
            if x:
                tab.setdefault((i, j), {})[l] = x
        comps[(s1, slot, s2)] = tab

    P = ExplicitOperad(colors, F, top, levels, trans, comps, units,
                       zero_above=(above == "zero"), name=str(doc.get("name", "P")),
                       cofibrant=bool(doc.get("cofibrant", False)))
    if check:
        rep = check_operad(P)
        if not rep.ok:
            raise OperadAxiomError(rep)
    return P


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise FormatError("cannot read %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise FormatError("not JSON: %s" % e)


def load_operad(path):
    return parse_operad(load_document(path))


def fixture_path(name):
    import os
    return os.path.join(os.path.dirname(__file__), "fixtures", name)


# ---------------------------------------------------------------------------
# optional blocks

def parse_algebra(block, P):
    """{"basis": [...], "differential": [...], "unit": name, "products": [[i, j, k, c]]}."""
    from .algebras import ComAlgebra
    V = _complex_of(block, P.F, "$.algebra")
    names = {n: k for k, n in enumerate(V.labels)}
    try:
        unit = names[block["unit"]]
    except KeyError:
        raise FormatError("unit missing", "$.algebra.unit")
    mult = {}
    for ent in block.get("products", []):
        i, j, k, x = _entry(ent, 3, P.F, "$.algebra.products")
        if x:
            mult.setdefault((i, j), {})[k] = x
    return ComAlgebra(P, V, mult, unit, str(block.get("name", "A")))


def parse_direction(block, F=QQ):
    return _complex_of(block, F, "$.direction")


def parse_artinian(block, F=QQ):
    """{"basis", "differential", "unit": name, "products", "augmentation": {name: c}}."""
    from .deform import ArtinianAlgebra
    R = _complex_of(block, F, "$.artinian")
    names = {n: k for k, n in enumerate(R.labels)}
    try:
        unit = {names[block["unit"]]: 1}
        aug = {names[n]: F.parse(x) for n, x in block.get("augmentation", {}).items()}
    except (KeyError, TypeError, ValueError):
        raise FormatError("unit or augmentation names an unknown basis element", "$.artinian")
    mult = {}
    for e, ent in enumerate(block.get("products", [])):
        i, j, k, x = _entry(ent, 3, F, "$.artinian.products[%d]" % e)
        if x:
            mult.setdefault((i, j), {})[k] = x
    return ArtinianAlgebra(R, mult, unit, aug, str(block.get("name", "R")))
