"""Synthesize the bundled Shanghai-like year (synthetic, not measured data).

Writes history_load.csv and history_ev.csv next to this script, one
"scenario" per day, in the ScenarioSet CSV layout.
"""

from pathlib import Path

import numpy as np

DAYS = 365
HOURS = 24
N_EV = 5
SEED = 20240601

OUT = Path(__file__).resolve().parent


def office_shape(t):
    # occupied 08:00-20:00 with a lunch dip
    occ = 1.0 / (1.0 + np.exp(-(t - 7.5) * 2.0)) * 1.0 / (1.0 + np.exp((t - 20.0) * 2.0))
    return occ * (1.0 - 0.12 * np.exp(-((t - 12.5) ** 2) / 1.5))


def main():
    rng = np.random.default_rng(SEED)
    t = np.arange(HOURS) + 0.5
    load_rows = []
    ev_rows = []
    for d in range(DAYS):
        season = np.cos(2.0 * np.pi * (d - 200) / 365.0)  # +1 mid-July, -1 mid-January
        summer = max(season, 0.0)
        weekend = d % 7 in (5, 6)
        scale = 0.6 if weekend else 1.0

        elec = 230.0 + scale * (170.0 + 120.0 * summer) * office_shape(t)
        elec += rng.normal(0.0, 12.0, HOURS)
        elec = np.maximum(elec, 200.0)

        cold = max(0.5 * (1.0 - season) + rng.normal(0.0, 0.2), 0.0)
        heat = 25.0 + scale * (30.0 + 60.0 * cold) * office_shape(t) + 15.0 * cold
        heat += rng.normal(0.0, 6.0, HOURS)
        heat = np.clip(heat, 0.0, 160.0)

        clearness = rng.beta(4.0, 1.8)
        peak = 600.0 * (0.75 + 0.25 * season) * clearness
        pv = np.zeros(HOURS)
        for h in range(5, 20):
            pv[h] = peak * np.sin(np.pi * (h - 5 + 0.5) / 15.0) ** 1.3 * rng.uniform(0.9, 1.0)

        for h in range(HOURS):
            load_rows.append((d, h, elec[h], heat[h], pv[h]))

        for j in range(N_EV):
            arrive = int(np.clip(np.rint(rng.normal(8.5, 0.6)), 6, 11))
            stay = int(np.clip(np.rint(rng.normal(9.5, 0.7)), 8, 12))
            depart = min(arrive + stay, HOURS)
            soc = float(np.clip(rng.normal(0.45, 0.07), 0.3, 0.6))
            ev_rows.append((d, j, arrive, depart, soc))

    with open(OUT / "history_load.csv", "w", newline="\n") as f:
        f.write("scenario,hour,elec_load_kw,heat_load_kw,pv_avail_kw\n")
        for d, h, e, q, p in load_rows:
            f.write(f"{d},{h},{e:.3f},{q:.3f},{p:.3f}\n")
    with open(OUT / "history_ev.csv", "w", newline="\n") as f:
        f.write("scenario,ev_id,arrive_hour,depart_hour,initial_soc\n")
        for d, j, a, dep, soc in ev_rows:
            f.write(f"{d},{j},{a},{dep},{soc:.4f}\n")


if __name__ == "__main__":
    main()
