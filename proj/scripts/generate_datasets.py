#!/usr/bin/env python3
"""Regenerate the bundled CSV datasets under data/.

tictactoe.csv is the complete set of terminal tic-tac-toe boards (x moves
first, game stops at the first three-in-a-row), labeled positive when x has
a line. This set is a fixed mathematical object: 958 boards, 626 positive.

monks3.csv is the third "monks problems" task: the full 432-row attribute
space labeled by the target concept, plus 122 sampled training rows carrying
5% label noise. The historic noise realization is not recoverable, so the
noisy rows are drawn from a fixed seed here.

table1.csv / table1_test.csv are the small categorical walkthrough dataset
used throughout the README and the test suite.
"""

import argparse
import csv
import itertools
import random
from pathlib import Path

LINES = [
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
]


def has_line(board, player):
    return any(all(board[i] == player for i in line) for line in LINES)


def terminal_boards():
    """All distinct boards at the moment the game ends."""
    out = set()

    def play(board, player):
        for i in range(9):
            if board[i] != "b":
                continue
            board[i] = player
            if has_line(board, player) or "b" not in board:
                out.add("".join(board))
            else:
                play(board, "x" if player == "o" else "o")
            board[i] = "b"

    play(["b"] * 9, "x")
    return sorted(out)


def write_tictactoe(path):
    boards = terminal_boards()
    positives = sum(has_line(b, "x") for b in boards)
    assert len(boards) == 958, f"expected 958 terminal boards, got {len(boards)}"
    assert positives == 626, f"expected 626 x-wins, got {positives}"
    cells = ["tl", "tm", "tr", "ml", "mm", "mr", "bl", "bm", "br"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(cells + ["class"])
        for b in boards:
            w.writerow(list(b) + ["positive" if has_line(b, "x") else "negative"])
    return len(boards)


def monks3_target(a):
    # attributes are 1-based values, a = (a1..a6)
    return int((a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3))


def write_monks3(path, seed=20240817):
    domains = [3, 3, 2, 3, 4, 2]
    space = list(itertools.product(*[range(1, d + 1) for d in domains]))
    assert len(space) == 432
    rng = random.Random(seed)
    train = rng.sample(space, 122)
    flipped = set(rng.sample(range(122), 6))  # 5% of 122, rounded
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"a{i}" for i in range(1, 7)] + ["class"])
        for a in space:
            w.writerow(list(a) + [monks3_target(a)])
        for i, a in enumerate(train):
            y = monks3_target(a)
            if i in flipped:
                y = 1 - y
            w.writerow(list(a) + [y])
    return 432 + 122


TABLE1 = """Class,f1,f2,f3,f4
1,a1,b1,c1,d1
1,a1,b2,c1,d2
1,a2,b3,c2,d1
2,a1,b2,c2,d1
2,a2,b3,c1,d2
2,a3,b1,c2,d1
2,a1,b2,c2,d2
"""

TABLE1_TEST = """Class,f1,f2,f3,f4
?,a1,b3,c2,d1
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    n = write_tictactoe(out / "tictactoe.csv")
    print(f"tictactoe.csv: {n} rows")
    n = write_monks3(out / "monks3.csv")
    print(f"monks3.csv: {n} rows")
    (out / "table1.csv").write_text(TABLE1)
    (out / "table1_test.csv").write_text(TABLE1_TEST)
    print("table1.csv, table1_test.csv written")


if __name__ == "__main__":
    main()
