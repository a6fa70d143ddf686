"""Regenerates the bundled match fixtures (deterministic)."""
import csv
import math
import random


def chess_like(path):
    rng = random.Random(20240601)
    players = [f"player{k:02d}" for k in range(1, 21)]
    rating = {p: 2.4 - 0.24 * k + rng.gauss(0.0, 0.1) for k, p in enumerate(players)}
    rows = []
    for a in range(len(players)):
        for b in range(a + 1, len(players)):
            pa, pb = players[a], players[b]
            p_win = 1.0 / (1.0 + math.exp(-(rating[pa] - rating[pb])))
            for _ in range(rng.randint(8, 24)):
                r = rng.random()
                draw = 0.15 * (1.0 - abs(2.0 * p_win - 1.0))
                if r < draw:
                    s = 0.5
                elif r < draw + (1.0 - draw) * p_win:
                    s = 1.0
                else:
                    s = 0.0
                if rng.random() < 0.5:
                    rows.append((pa, pb, s))
                else:
                    rows.append((pb, pa, 1.0 - s))
    rng.shuffle(rows)
    write(path, rows)


def lichess_toy(path):
    rng = random.Random(7)
    # (a, b, games, wins of a)
    pairs = [("alice", "bob", 120, 70), ("alice", "carol", 80, 50), ("alice", "dave", 79, 60),
             ("bob", "carol", 95, 40), ("bob", "erin", 12, 6), ("carol", "dave", 150, 90),
             ("dave", "erin", 3, 1), ("carol", "erin", 81, 41)]
    rows = []
    for a, b, games, wins in pairs:
        outcomes = [1.0] * wins + [0.0] * (games - wins)
        for s in outcomes:
            rows.append((a, b, s) if rng.random() < 0.5 else (b, a, 1.0 - s))
    rng.shuffle(rows)
    write(path, rows)


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["player_a", "player_b", "score_a"])
        for a, b, s in rows:
            w.writerow([a, b, "0.5" if s == 0.5 else str(int(s))])


if __name__ == "__main__":
    chess_like("chess_like_matches.csv")
    lichess_toy("lichess_toy_matches.csv")
