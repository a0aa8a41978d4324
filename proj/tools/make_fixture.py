#!/usr/bin/env python3
"""Writes the bundled quote fixture used by the end-to-end tests.

Ten trading days of bid/ask quotes with an intraday U-shaped update rate.
Quotes start before the open and run past the close so the session trims
matter; some updates move bid and ask apart without moving the midprice,
and a few crossed and malformed rows are mixed in.
"""

import argparse
import datetime as dt
import random

TICK = 0.5


def day_quotes(rng, day, mid):
    t = dt.datetime.combine(day, dt.time(7, 55))
    end = dt.datetime.combine(day, dt.time(16, 35))
    half_spread = TICK
    rows = []
    while True:
        frac = (t - t.replace(hour=8, minute=0)).total_seconds() / (8.5 * 3600)
        rate = 1.1 * (1.0 + 1.5 * (2.0 * frac - 1.0) ** 2)  # updates per minute
        t += dt.timedelta(seconds=rng.expovariate(rate / 60.0))
        t = t.replace(microsecond=(t.microsecond // 1000) * 1000)
        if t >= end:
            return rows, mid
        u = rng.random()
        if u < 0.15:
            # Spread change around a fixed midprice.
            half_spread = TICK if half_spread > TICK else 2 * TICK
        else:
            mid += rng.choice((-1, 1)) * TICK * (1 if rng.random() < 0.8 else 2) / 2
            mid = max(mid, 100.0)
        bid, ask = mid - half_spread, mid + half_spread
        if rng.random() < 0.002:
            bid, ask = ask, bid  # crossed
        rows.append(f"{t.isoformat(timespec='milliseconds')},{bid:.2f},{ask:.2f}")
        if rng.random() < 0.001:
            rows.append(f"{t.isoformat(timespec='milliseconds')},,{ask:.2f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--days", type=int, default=10)
    ap.add_argument("--seed", type=int, default=20240102)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    day = dt.date(2024, 1, 2)
    mid = 1000.0
    lines = ["timestamp,bid,ask"]
    done = 0
    while done < args.days:
        if day.weekday() < 5:
            rows, mid = day_quotes(rng, day, mid)
            lines.extend(rows)
            done += 1
        day += dt.timedelta(days=1)
    with open(args.out, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
