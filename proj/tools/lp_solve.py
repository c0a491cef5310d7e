#!/usr/bin/env python3
"""Reference external MIP command for the learn/bench bridges.

Reads the LP dialect produced by `ncs encode --format lp-o|lp-d` (or any file
using the same subset: Minimize / Subject To / Binaries / End), solves it with
scipy's MILP interface, and prints either `INFEASIBLE` or one `name value`
line per variable.
"""

import sys
import warnings

import numpy as np
from scipy.optimize import milp, LinearConstraint, Bounds

# The formulations realize strict inequalities through a 1e-6 epsilon, the
# same magnitude as HiGHS's default MIP feasibility tolerance; tighten the
# tolerances so returned points honor the strict side.
SOLVER_OPTIONS = {
    "mip_feasibility_tolerance": 1e-9,
    "primal_feasibility_tolerance": 1e-9,
}


def tokenize_terms(tokens):
    """Parses `[sign] coef name ...`, returning (terms, rest)."""
    terms = []
    sign = 1.0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
            i += 1
            continue
        if tok == "-":
            sign = -1.0
            i += 1
            continue
        head = tok[0]
        if not (head.isdigit() or (head == "-" and len(tok) > 1)):
            break
        coef = float(tok) * sign
        sign = 1.0
        i += 1
        if i >= len(tokens) or tokens[i][0].isdigit():
            if coef != 0.0:
                raise ValueError("constant term in expression")
            continue
        terms.append((tokens[i], coef))
        i += 1
    return terms, tokens[i:]


def parse_lp(text):
    objective = []
    rows = []
    binaries = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            section = line
            continue
        tokens = line.split()
        if section == "Minimize":
            if not tokens[0].endswith(":"):
                raise ValueError("bad objective line: " + line)
            objective, rest = tokenize_terms(tokens[1:])
            if rest:
                raise ValueError("trailing objective tokens: " + line)
        elif section == "Subject To":
            if not tokens[0].endswith(":"):
                raise ValueError("bad constraint line: " + line)
            terms, rest = tokenize_terms(tokens[1:])
            if len(rest) != 2 or rest[0] not in ("<=", ">=", "="):
                raise ValueError("bad constraint line: " + line)
            rows.append((terms, rest[0], float(rest[1])))
        elif section == "Binaries":
            binaries.extend(tokens)
        elif section == "Bounds":
            raise ValueError("Bounds entries are not supported")
        else:
            raise ValueError("unexpected content: " + line)
    return objective, rows, binaries


def main():
    if len(sys.argv) != 2:
        print("usage: lp_solve.py <file.lp>", file=sys.stderr)
        return 2
    with open(sys.argv[1], encoding="utf-8") as f:
        objective, rows, binaries = parse_lp(f.read())

    names = []
    index = {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for terms, _, _ in rows:
        for name, _ in terms:
            var(name)
    for name, _ in objective:
        var(name)
    for name in binaries:
        var(name)

    n = len(names)
    c = np.zeros(n)
    for name, coef in objective:
        c[index[name]] += coef

    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    a = np.zeros((len(rows), n))
    for r, (terms, sense, rhs) in enumerate(rows):
        for name, coef in terms:
            a[r, index[name]] += coef
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs

    integrality = np.zeros(n)
    upper = np.full(n, np.inf)
    for name in binaries:
        integrality[index[name]] = 1
        upper[index[name]] = 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # passthrough options trip a warning
        result = milp(
            c,
            constraints=LinearConstraint(a, lo, hi),
            integrality=integrality,
            bounds=Bounds(np.zeros(n), upper),
            options=dict(SOLVER_OPTIONS),
        )
    if result.status == 2:
        print("INFEASIBLE")
        return 0
    if result.x is None:
        print(f"solver status {result.status}: {result.message}", file=sys.stderr)
        return 1
    for name, value in zip(names, result.x):
        print(f"{name} {value:.17g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
