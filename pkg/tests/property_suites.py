"""Seeded property suites. Each returns {"property", "cases", "failures"};
a case is one randomly drawn input checked against its law."""

import itertools
import random

from sentential import calculus, kripke, matrix
from sentential.heyting import upset_algebra
from sentential.language import App, random_formula, variables
from sentential.lindenbaum_tarski import class_of, lt_classical
from sentential.substitution import IDENTITY, Substitution, apply, compose, image, preimage

NAMES = ("p", "q", "r")


def _report(prop, cases, failures):
    return {"property": prop, "cases": cases, "failures": failures}


def _subst(rng, depth=2):
    return Substitution({x: random_formula(rng, NAMES, depth) for x in NAMES if rng.random() < 0.7})


def substitution_monoid(cases=1000, seed=0):
    rng = random.Random(seed)
    fails = []
    for k in range(cases):
        s1, s2, s3 = _subst(rng), _subst(rng), _subst(rng)
        f = random_formula(rng, NAMES, 4)
        if compose(s1, compose(s2, s3)) != compose(compose(s1, s2), s3):
            fails.append((k, "associativity"))
        if compose(IDENTITY, s1) != s1 or compose(s1, IDENTITY) != s1:
            fails.append((k, "identity"))
        if apply(compose(s1, s2), f) != apply(s1, apply(s2, f)):
            fails.append((k, "action"))
    return _report("substitution monoid laws", cases, fails)


def image_preimage_inclusions(cases=1000, seed=0):
    rng = random.Random(seed)
    fails = []
    for k in range(cases):
        s = _subst(rng)
        U = {random_formula(rng, NAMES, 3) for _ in range(12)}
        U |= image(s, U)
        X = {f for f in U if rng.random() < 0.4}
        if not image(s, preimage(s, X, U)) <= X:
            fails.append((k, "image of preimage"))
        if not X & U <= preimage(s, image(s, X), U):
            fails.append((k, "preimage of image"))
    return _report("image/preimage inclusions", cases, fails)


MATRICES = ("b2", "l3", "godel(3)", "l3_tau")


def restricted_valuations(cases=1000, seed=0):
    """Values and validity depend only on the variables that occur."""
    rng = random.Random(seed)
    ms = [matrix.builtin(n) for n in MATRICES]
    fails = []
    for k in range(cases):
        m = rng.choice(ms)
        f = random_formula(rng, ("p", "q"), 4)
        els = m.elements
        v = {x: rng.choice(els) for x in variables(f)}
        wide = dict(v, r=rng.choice(els), s=rng.choice(els))
        if matrix.evaluate(m, v, f) != matrix.evaluate(m, wide, f):
            fails.append((k, "value"))
        names = sorted(variables(f)) + ["r"]
        full = all(m.is_designated(matrix.evaluate(m, dict(zip(names, c)), f))
                   for c in itertools.product(els, repeat=len(names)))
        if full != matrix.is_valid(m, f):
            fails.append((k, "validity"))
    return _report("restricted-valuation sufficiency", cases, fails)


def substitution_invariance(cases=1000, seed=0):
    """Valid formulas stay valid under every substitution. Half the cases
    are random axiom instances, so valid inputs are common."""
    rng = random.Random(seed)
    ms = [matrix.builtin(n) for n in MATRICES]
    ax = list(calculus.builtin_calculus("hilbert_cl").axioms)
    fails, valid = [], 0
    for k in range(cases):
        m = rng.choice(ms)
        if k % 2:
            r = rng.choice(ax)
            _, f = r.instance({mv: random_formula(rng, ("p", "q"), 2) for mv in r.metavariables})
        else:
            f = random_formula(rng, ("p", "q"), 3)
        s = _subst(rng)
        if matrix.is_valid(m, f):
            valid += 1
            if not matrix.is_valid(m, apply(s, f)):
                fails.append((k, m.name))
    return dict(_report("substitution-invariance of validity", cases, fails), valid_inputs=valid)


def _random_model(rng, max_worlds=4):
    n = rng.randint(1, max_worlds)
    frame = rng.choice(kripke.rooted_frames(n))
    ups = frame.upsets
    val = {x: frozenset(kripke.KripkeModel(frame, {}).worlds_of(rng.choice(ups))) for x in ("p", "q")}
    return kripke.KripkeModel(frame, val)


def persistence(cases=1000, seed=0):
    rng = random.Random(seed)
    fails = []
    for k in range(cases):
        m = _random_model(rng)
        f = random_formula(rng, ("p", "q"), 4)
        els = m.frame.elements
        for a in els:
            if kripke.forces(m, a, f):
                for b in els:
                    if m.frame.le(a, b) and not kripke.forces(m, b, f):
                        fails.append((k, a, b))
    return _report("persistence", cases, fails)


def forces_algebra(cases=1000, seed=0):
    """The set of worlds forcing f is the value of f in the up-set algebra."""
    rng = random.Random(seed)
    fails = []
    algs = {}
    for k in range(cases):
        m = _random_model(rng)
        f = random_formula(rng, ("p", "q"), 5)
        frame = m.frame
        alg = algs.get(frame)
        if alg is None:
            alg = algs[frame] = upset_algebra(frame)
        v = {x: frame.mask_name(m.mask(ws)) for x, ws in m.valuation.items()}
        value = matrix.evaluate(alg, v, f)
        forced = frame.mask_name(m.mask([w for w in frame.elements if kripke.forces(m, w, f)]))
        if value != forced:
            fails.append((k, value, forced))
    return _report("forces-algebra equivalence", cases, fails)


def quotient_homomorphism(cases=1000, seed=0):
    rng = random.Random(seed)
    qs = [lt_classical(k) for k in (1, 2, 3)]
    fails = []
    for k in range(cases):
        q = rng.choice(qs)
        names = q.generators
        f, g = random_formula(rng, names, 3), random_formula(rng, names, 3)
        op = rng.choice(["¬", "∧", "∨", "→"])
        if op == "¬":
            want = q.ops[op][class_of(q, f)]
            h = App(op, (f,))
        else:
            want = q.ops[op][class_of(q, f), class_of(q, g)]
            h = App(op, (f, g))
        if class_of(q, h) != want:
            fails.append((k, q.name, op))
    return _report("quotient-map homomorphism", cases, fails)


ALL = (substitution_monoid, image_preimage_inclusions, restricted_valuations,
       substitution_invariance, persistence, forces_algebra, quotient_homomorphism)
