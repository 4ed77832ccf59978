"""Reproduce the delivery-ratio comparison between the two protocol modes.

Sweeps the node count with five paired seeds per cell (both modes see the
same placements, waypoints, and traffic), prints the mean packet delivery
ratio per cell, and writes the full per-run table to delivery_sweep.csv.

This is the scripted equivalent of:
  cbrsim sweep --nodes 5,10,20,30,40,50,60 --replicates 5 --out delivery_sweep.csv

Run:  python3 demos/delivery_sweep.py          (about a minute)
"""

from cbrsim import ScenarioConfig, sweep, write_sweep_csv

COUNTS = [5, 10, 20, 30, 40, 50, 60]

result = sweep(COUNTS, ["cbrp", "ecbrp"], 5, ScenarioConfig())

print(f"{'nodes':>5}  {'cbrp':>8}  {'ecbrp':>8}  {'diff':>8}")
diffs = []
for n in COUNTS:
    c = result.mean_pdr(n, "cbrp")
    e = result.mean_pdr(n, "ecbrp")
    diffs.append(e - c)
    print(f"{n:>5}  {c:8.4f}  {e:8.4f}  {e - c:+8.4f}")
print(f"\nmean delivery-ratio advantage of the enhanced mode: "
      f"{sum(diffs) / len(diffs):+.4f}")

write_sweep_csv(result, "delivery_sweep.csv")
print("wrote delivery_sweep.csv (one row per run plus a mean row per cell)")
