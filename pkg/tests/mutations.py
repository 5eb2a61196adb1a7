"""Single-step mutations of certificate bundles that change what is proved.

Every family below alters a step so that its claim is no longer the one
its justification determines (or alters an edge's pointer to a proof of a
different claim), so a sound checker must reject each mutant.
"""

import json

FAMILIES = ("lhs", "rhs", "swap", "premise", "kind", "edge")
SAFE_KIND_CHANGES = {"SYM": "CONG", "CONG": "SYM", "AXIOM": "REFL", "TRANS": "SYM",
                     "INST": "TRANS", "REFL": "SYM"}


def _claim(row):
    return row["claim"]["lhs"], row["claim"]["rhs"]


def mutate(bundle, family, pick):
    """Return (mutant, step index or None) or None if the family does not apply.

    ``pick(n)`` returns an integer in [0, n).
    """
    steps = bundle["steps"]
    m = json.loads(json.dumps(bundle))
    if family == "edge":
        e = pick(len(m["edges"]))
        proofs = m["edges"][e]["proofs"]
        if not proofs:
            return None
        role = sorted(proofs)[pick(len(proofs))]
        old = _claim(steps[proofs[role]])
        target = pick(len(steps))
        if _claim(steps[target]) == old:
            return None
        proofs[role] = target
        return m, None
    k = pick(len(steps))
    row = m["steps"][k]
    lhs, rhs = _claim(steps[k])
    if family in ("lhs", "rhs"):
        t = pick(len(bundle["terms"]))
        if t == row["claim"][family]:
            return None
        row["claim"][family] = t
    elif family == "swap":
        if lhs == rhs:
            return None
        row["claim"] = {"lhs": rhs, "rhs": lhs}
    elif family == "premise":
        if row["just"]["kind"] not in ("SYM", "TRANS", "CONG") or k == 0:
            return None
        prem = row["just"]["premises"]
        slot = pick(len(prem))
        new = pick(k)
        if _claim(steps[new]) == _claim(steps[prem[slot]]):
            return None
        prem[slot] = new
    elif family == "kind":
        kind = row["just"]["kind"]
        if kind == "AXIOM" and lhs == rhs:
            return None  # a reflexive axiom instance is also a valid REFL step
        row["just"]["kind"] = SAFE_KIND_CHANGES[kind]
    else:
        raise ValueError(family)
    return m, k
