#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/fixtures.

Number game: each example set gets a pool of verbalized concepts in several
wordings and program syntaxes, plus exact-set distractors. Ratings come from a
simulated learner that averages over concept meanings (not strings) with a
prior that favours mathematical concepts and heavily penalizes listing the
examples back.

Shapes: learning curves with planted rules and scripted per-batch proposals.

Usage: tools/make_fixtures.py [output_dir]   (default: data/fixtures)
"""

import json
import math
import random
import sys
from pathlib import Path

SEED = 20231016
N = range(1, 101)


# ---- number concepts ---------------------------------------------------------

def is_power(b, x):
    if x == 1:
        return True
    while x % b == 0:
        x //= b
    return x == 1


def is_prime(x):
    return x > 1 and all(x % d for d in range(2, int(x ** 0.5) + 1))


class Meaning:
    def __init__(self, key, test, log_prior, wordings):
        self.key = key
        self.test = test
        self.log_prior = log_prior
        self.wordings = wordings  # [(nl, dsl)]
        self.ext = frozenset(x for x in N if test(x))


def library():
    out = []
    add = out.append
    add(Meaning("even", lambda x: x % 2 == 0, 0.0,
                [("even numbers", "even(x)"), ("multiples of 2", "multiple(2, x)"),
                 ("numbers divisible by two", "x mod 2 == 0"), ("the number is even", "even(x)")]))
    add(Meaning("odd", lambda x: x % 2 == 1, 0.0,
                [("odd numbers", "odd(x)"), ("numbers that are not even", "not even(x)"),
                 ("the number is odd", "x mod 2 == 1")]))
    add(Meaning("prime", is_prime, -0.5, [("prime numbers", "prime(x)"), ("primes", "prime(x)")]))
    add(Meaning("square", lambda x: round(x ** 0.5) ** 2 == x, 0.0,
                [("square numbers", "square(x)"), ("perfect squares", "square(x)"),
                 ("numbers that are a whole number squared", "square(x)")]))
    add(Meaning("cube", lambda x: round(x ** (1 / 3)) ** 3 == x, -0.5,
                [("cube numbers", "cube(x)"), ("perfect cubes", "cube(x)")]))
    for b, word in [(2, "two"), (3, "three"), (4, "four"), (5, "five"), (10, "ten")]:
        add(Meaning("pow%d" % b, lambda x, b=b: is_power(b, x), 0.0 if b in (2, 10) else -0.5,
                    [("powers of %d" % b, "power(%d, x)" % b), ("powers of %s" % word, "power(%d, x)" % b),
                     ("the number is a power of %d" % b, "power(%d, x)" % b)]))
    for k in range(3, 11):
        add(Meaning("mult%d" % k, lambda x, k=k: x % k == 0, 0.0 if k in (5, 10) else -0.5,
                    [("multiples of %d" % k, "multiple(%d, x)" % k),
                     ("numbers divisible by %d" % k, "x mod %d == 0" % k)]))
    for d in range(10):
        add(Meaning("ends%d" % d, lambda x, d=d: x % 10 == d, -1.0,
                    [("numbers ending in %d" % d, "ends_in(%d, x)" % d),
                     ("numbers whose last digit is %d" % d, "x mod 10 == %d" % d)]))
    for n in (10, 20, 50):
        add(Meaning("lt%d" % n, lambda x, n=n: x < n, -1.0,
                    [("numbers less than %d" % n, "x < %d" % n), ("numbers below %d" % n, "x <= %d" % (n - 1))]))
    add(Meaning("gt50", lambda x: x > 50, -1.0, [("numbers greater than 50", "x > 50")]))
    return out


def interval(lo, hi):
    return Meaning("range%d_%d" % (lo, hi), lambda x: lo <= x <= hi, -1.5 - 0.02 * (hi - lo),
                   [("numbers between %d and %d" % (lo, hi), "between(%d, %d, x)" % (lo, hi)),
                    ("numbers from %d to %d" % (lo, hi), "x >= %d and x <= %d" % (lo, hi))])


def exact(xs):
    items = sorted(set(xs))
    listed = ", ".join(map(str, items))
    return Meaning("exact" + "_".join(map(str, items)), lambda x: x in items, -9.0,
                   [("exactly the numbers " + listed, "in_set({%s}, x)" % listed),
                    ("only " + listed, "in_set({%s}, x)" % listed)])


EXAMPLE_SETS = [
    ("s01", [16]), ("s02", [16, 8, 2, 64]), ("s03", [60]), ("s04", [60, 80, 10, 30]),
    ("s05", [60, 52, 57, 55]), ("s06", [81]), ("s07", [81, 25, 4, 36]), ("s08", [81, 98, 86, 93]),
    ("s09", [3]), ("s10", [9, 27, 3]), ("s11", [12, 14, 11, 15]), ("s12", [25, 15, 35, 5]),
]

EPS = 0.05


def loglik(m, xs):
    return sum(math.log((1 - EPS) * (x in m.ext) / len(m.ext) + EPS / 100) for x in xs)


def human_prediction(meanings, xs, x):
    lw = [m.log_prior + loglik(m, xs) for m in meanings]
    top = max(lw)
    w = [math.exp(v - top) for v in lw]
    z = sum(w)
    return sum(wi for wi, m in zip(w, meanings) if x in m.ext) / z


def logistic(v):
    return 1 / (1 + math.exp(-v))


def logit(p):
    p = min(max(p, 1e-6), 1 - 1e-6)
    return math.log(p / (1 - p))


def set_meanings(lib, xs):
    """Meanings a conditioned proposer would plausibly offer for xs."""
    consistent = [m for m in lib if all(x in m.ext for x in xs)]
    lo, hi = min(xs), max(xs)
    extra = [interval(lo, hi), interval(10 * (lo // 10), min(100, 10 * math.ceil((hi + 1) / 10)))]
    return consistent + [m for m in extra if len(m.ext) > 1] + [exact(xs)]


def number_fixtures(root, rng):
    lib = library()
    pools_dir = root / "number" / "pools"
    pools_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for set_id, xs in EXAMPLE_SETS:
        meanings = {m.key: m for m in set_meanings(lib, xs)}.values()
        meanings = list(meanings)
        pool = []
        for m in meanings:
            k = rng.randint(1, len(m.wordings))
            for nl, dsl in rng.sample(m.wordings, k):
                pool.append({"nl": nl, "dsl": dsl, "logq": None, "batch": None})
        for m in rng.sample([m for m in lib if m not in meanings], 4):
            nl, dsl = m.wordings[0]
            pool.append({"nl": nl, "dsl": dsl, "logq": None, "batch": None})
        rng.shuffle(pool)
        for i, h in enumerate(pool):
            h["logq"] = round(-1.0 - 0.1 * i, 3)
        (pools_dir / (set_id + ".jsonl")).write_text("".join(json.dumps(h) + "\n" for h in pool))

        tests = sorted(set(rng.sample(range(1, 101), 20) + xs))
        for x in tests:
            p = human_prediction(meanings, xs, x)
            r = logistic(-0.2 + 1.3 * logit(p)) + rng.gauss(0, 0.03)
            r = min(max(r, 0.0), 1.0)
            rows.append("%s,%s,%d,%.4f" % (set_id, ";".join(map(str, xs)), x, 1 + 6 * r))
    (root / "number" / "judgments.csv").write_text("set_id,examples,test_number,mean_rating\n" + "\n".join(rows) + "\n")

    generic = [m for m in lib if not m.key.startswith("ends") or m.key in ("ends0", "ends5")]
    abl = []
    for m in generic:
        nl, dsl = m.wordings[0]
        abl.append({"nl": nl, "dsl": dsl, "logq": None, "batch": None})
    abl.append({"nl": "numbers between 30 and 45", "dsl": "between(30, 45, x)", "logq": None, "batch": None})
    (root / "number" / "ablation_pool.jsonl").write_text("".join(json.dumps(h) + "\n" for h in abl))


# ---- shape curves -----------------------------------------------------------

SHAPES = ["triangle", "rectangle", "circle"]
COLORS = ["green", "yellow", "blue"]


def obj(size, color, shape):
    return {"shape": shape, "color": color, "size": size}


def green_triangle(t, batch):
    return t["shape"] == "triangle" and t["color"] == "green"


def majority_color(t, batch):
    counts = {c: sum(o["color"] == c for o in batch) for c in COLORS}
    return counts[t["color"]] >= max(counts.values())


def random_batch(rng):
    return [obj(rng.randint(1, 3), rng.choice(COLORS), rng.choice(SHAPES)) for _ in range(rng.randint(3, 5))]


def labelled(batch, rule):
    return [dict(o, label=int(rule(o, batch))) for o in batch]


def human_rates(batches, rng):
    rates = []
    for t, b in enumerate(batches):
        doubt = 0.5 * 0.7 ** t
        for o in b:
            truth = o["label"]
            r = truth * (1 - doubt) + (1 - truth) * doubt + rng.gauss(0, 0.04)
            rates.append(round(min(max(r, 0.0), 1.0), 4))
    return rates


# Rules as (nl, dsl, python checker).
def rule(nl, dsl, fn):
    return (nl, dsl, fn)


def by_attr(attr, value):
    return lambda t, b: t[attr] == value


def green_triangle_curve(rng):
    b0 = labelled([obj(1, "green", "triangle"), obj(3, "green", "circle"), obj(1, "blue", "triangle"),
                   obj(3, "yellow", "rectangle")], green_triangle)
    b1 = labelled([obj(3, "green", "triangle"), obj(2, "yellow", "circle"), obj(1, "blue", "circle")], green_triangle)
    batches = [b0, b1]
    while len(batches) < 15:
        b = random_batch(rng)
        if rng.random() < 0.6:
            b[rng.randrange(len(b))] = obj(rng.randint(1, 3), "green", "triangle")
        batches.append(labelled(b, green_triangle))
    scripted = {
        0: [rule("color is green", "this.color == green", by_attr("color", "green")),
            rule("shape is triangle", "this.shape == triangle", by_attr("shape", "triangle")),
            rule("size is small", "this.size == 1", by_attr("size", 1)),
            rule("color is blue", "this.color == blue", by_attr("color", "blue")),
            rule("shape is not a circle", "this.shape != circle", lambda t, b: t["shape"] != "circle"),
            rule("size is large", "this.size == 3", by_attr("size", 3))],
        1: [rule("Something is positive if it is green.", "this.color == green", by_attr("color", "green")),
            rule("Something is positive if it is a triangle.", "this.shape == triangle", by_attr("shape", "triangle")),
            rule("Something is positive if it is the largest object in the example.",
                 "forall(o in others, o.size <= this.size)",
                 lambda t, b: all(o["size"] <= t["size"] for o in b)),
            rule("Something is positive if there is another object with the same color in the example.",
                 "exists(o in others, o.color == this.color)",
                 lambda t, b: sum(o["color"] == t["color"] for o in b) > 1)],
        2: [rule("Something is positive if it is a green triangle.",
                 "this.shape == triangle and this.color == green", green_triangle),
            rule("Something is positive if it is green or a triangle.",
                 "this.color == green or this.shape == triangle",
                 lambda t, b: t["color"] == "green" or t["shape"] == "triangle"),
            rule("Something is positive if it is not blue.", "this.color != blue",
                 lambda t, b: t["color"] != "blue")],
    }
    later = [
        rule("Something is positive if it is a small green object.", "this.color == green and this.size == 1",
             lambda t, b: t["color"] == "green" and t["size"] == 1),
        rule("Something is positive if it is a triangle that is not blue.",
             "this.shape == triangle and this.color != blue",
             lambda t, b: t["shape"] == "triangle" and t["color"] != "blue"),
        rule("Something is positive if it is the only triangle in the example.",
             "count(o in all, o.shape == triangle) == 1 and this.shape == triangle",
             lambda t, b: t["shape"] == "triangle" and sum(o["shape"] == "triangle" for o in b) == 1),
        rule("Something is positive if it is a large object.", "this.size == 3", by_attr("size", 3)),
        rule("Something is positive if it is yellow.", "this.color == yellow", by_attr("color", "yellow")),
        rule("Something is positive if it is a rectangle.", "this.shape == rectangle", by_attr("shape", "rectangle")),
        rule("Something is positive if it is green and not small.", "this.color == green and this.size > 1",
             lambda t, b: t["color"] == "green" and t["size"] > 1),
    ]
    return batches, scripted, later


def majority_curve(rng):
    batches = []
    while len(batches) < 15:
        batches.append(labelled(random_batch(rng), majority_color))
    scripted = {
        0: [rule("color is green", "this.color == green", by_attr("color", "green")),
            rule("color is yellow", "this.color == yellow", by_attr("color", "yellow")),
            rule("size is large", "this.size == 3", by_attr("size", 3))],
        1: [rule("Something is positive if there is another object with the same color in the example.",
                 "exists(o in others, o.color == this.color)",
                 lambda t, b: sum(o["color"] == t["color"] for o in b) > 1),
            rule("Something is positive if it is the largest object in the example.",
                 "forall(o in others, o.size <= this.size)",
                 lambda t, b: all(o["size"] <= t["size"] for o in b))],
        3: [rule("Something is positive if it has the most common color in the example.",
                 "forall(c in colors, count(o in all, o.color == this.color) >= count(o in all, o.color == c))",
                 majority_color)],
    }
    later = [
        rule("Something is positive if it is blue.", "this.color == blue", by_attr("color", "blue")),
        rule("Something is positive if it is a circle.", "this.shape == circle", by_attr("shape", "circle")),
        rule("Something is positive if no other object is larger.", "forall(o in others, o.size <= this.size)",
             lambda t, b: all(o["size"] <= t["size"] for o in b)),
    ]
    return batches, scripted, later


def consistent(fn, history):
    return all(bool(fn(o, b)) == bool(o["label"]) for b in history for o in b)


def write_curve(root, concept_id, gt, batches, scripted, later, rng):
    curves = root / "shape"
    (curves / "pools").mkdir(parents=True, exist_ok=True)
    curve = {"concept_id": concept_id, "ground_truth_nl": gt, "batches": batches,
             "human_positive_rate": human_rates(batches, rng)}
    (curves / (concept_id + ".json")).write_text(json.dumps(curve, indent=1) + "\n")
    lines = []
    for t in range(len(batches)):
        rules = list(scripted.get(t, []))
        if t >= 3:
            options = [r for r in later if not consistent(r[2], batches[:t])]
            rules += rng.sample(options, min(2, len(options)))
        for nl, dsl, _ in rules:
            lines.append(json.dumps({"nl": nl, "dsl": dsl, "logq": None, "batch": t}))
    (curves / "pools" / (concept_id + ".jsonl")).write_text("\n".join(lines) + "\n")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixtures"
    rng = random.Random(SEED)
    number_fixtures(root, rng)
    write_curve(root, "green_triangles", "Something is positive if it is a green triangle.",
                *green_triangle_curve(rng), rng)
    write_curve(root, "majority_color", "Something is positive if it has the most common color in the example.",
                *majority_curve(rng), rng)


if __name__ == "__main__":
    main()
