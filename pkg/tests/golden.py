"""Matrices of the four worked examples, transcribed row by row.

Each row is a dict {basis index: coefficient}; GF(4) coefficients use the
packed codes 1 = 1, 2 = gamma, 3 = gamma^2 = gamma + 1.
"""

G, G2 = 2, 3


def shift_rows(targets, coef=1):
    return [{t: coef} for t in targets]


def dense(rows, alpha):
    out = []
    for r in rows:
        line = [0] * alpha
        for idx, c in r.items():
            line[idx] = c
        out.append(line)
    return out


EXAMPLE1 = {  # C1, m = 2, GF(5)
    "A": [
        shift_rows([2, 3, 0, 1], 2),
        shift_rows([1, 0, 3, 2], 4),
        [{0: 2}, {1: 2}, {0: 1, 2: 3}, {1: 1, 3: 3}],
        [{0: 4}, {0: 2, 1: 1}, {2: 4}, {2: 2, 3: 1}],
        [{0: 3}, {1: 3}, {0: 1, 2: 2}, {1: 1, 3: 2}],
        [{0: 1}, {0: 2, 1: 4}, {2: 1}, {2: 2, 3: 4}],
    ],
    "S": [
        [{0: 1}, {1: 1}],
        [{0: 1}, {2: 1}],
        [{0: 1, 2: 4}, {1: 1, 3: 4}],
        [{0: 1, 1: 4}, {2: 1, 3: 4}],
        [{0: 1, 2: 1}, {1: 1, 3: 1}],
        [{0: 1, 1: 1}, {2: 1, 3: 1}],
    ],
}

EXAMPLE2 = {  # C2, m = 3, GF(4)
    "A": [
        shift_rows([4, 5, 6, 7, 0, 1, 2, 3], G),
        shift_rows([2, 3, 0, 1, 6, 7, 4, 5], G2),
        shift_rows([1, 0, 3, 2, 5, 4, 7, 6]),
        [{0: G}, {1: G}, {2: G}, {3: G}, {4: G, 0: 1}, {5: G, 1: 1}, {6: G, 2: 1}, {7: G, 3: 1}],
        [{0: G2}, {1: G2}, {2: G2, 0: 1}, {3: G2, 1: 1}, {4: G2}, {5: G2}, {6: G2, 4: 1}, {7: G2, 5: 1}],
        [{0: 1}, {1: 1, 0: 1}, {2: 1}, {3: 1, 2: 1}, {4: 1}, {5: 1, 4: 1}, {6: 1}, {7: 1, 6: 1}],
    ],
    "S": [
        shift_rows([0, 1, 2, 3]),
        shift_rows([0, 1, 4, 5]),
        shift_rows([0, 2, 4, 6]),
        [{0: 1, 4: 1}, {1: 1, 5: 1}, {2: 1, 6: 1}, {3: 1, 7: 1}],
        [{0: 1, 2: 1}, {1: 1, 3: 1}, {4: 1, 6: 1}, {5: 1, 7: 1}],
        [{0: 1, 1: 1}, {2: 1, 3: 1}, {4: 1, 5: 1}, {6: 1, 7: 1}],
    ],
}

EXAMPLE3 = {  # C3, m = 2, GF(5)
    "A": [
        shift_rows([2, 3, 0, 1], 2),
        shift_rows([1, 0, 3, 2], 4),
        [{0: 2}, {1: 2}, {2: 3}, {3: 3}],
        [{0: 4}, {1: 1}, {2: 4}, {3: 1}],
    ],
    "S": [
        [{0: 1}, {1: 1}],
        [{0: 1}, {2: 1}],
        [{0: 1, 2: 1}, {1: 1, 3: 1}],
        [{0: 1, 1: 1}, {2: 1, 3: 1}],
    ],
}

EXAMPLE4 = {  # C4, m = 2, GF(4)
    "A": [
        [{2: 1}, {3: 1}, {0: G}, {1: G}],
        [{1: G}, {0: G2}, {3: G}, {2: G2}],
        shift_rows([2, 3, 0, 1], G2),
        shift_rows([1, 0, 3, 2]),
    ],
    "S": [
        [{0: 1, 2: 1}, {1: 1, 3: 1}],
        [{0: 1, 1: 1}, {2: 1, 3: 1}],
        [{0: 1, 2: G}, {1: 1, 3: G}],
        [{0: 1, 1: G}, {2: 1, 3: G}],
    ],
}


def grid_text(example, alpha):
    """The A/S grid section of a spec file, built from the transcription."""
    lines = []
    for name in ("A", "S"):
        for i, rows in enumerate(example[name], start=1):
            lines.append(f"{name} {i}")
            lines.extend(" ".join(map(str, r)) for r in dense(rows, alpha))
    return "\n".join(lines)
