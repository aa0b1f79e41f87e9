#!/usr/bin/env python
"""Regenerate the bundled data fixtures and the golden CLI trace.

Everything here is seeded, so reruns reproduce the committed files byte for
byte.  The fund sample is synthetic: 200 rows whose province/category
marginals echo plausible market composition; it is not real market data.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from infospread import cli, netdiff  # noqa: E402

DATA = ROOT / "src" / "infospread" / "data"
GOLDEN = ROOT / "tests" / "golden"

PROVINCE_COUNTS = {
    "Gauteng": 76, "N.Cape": 9, "W.Cape": 18, "KZN": 27,
    "Limpopo": 12, "North West": 22, "Mpungalanga": 19, "Free State": 17,
}
CATEGORY_COUNTS = {"A": 52, "B": 32, "C": 47, "D": 23,
                   "E": 9, "F": 17, "G": 11, "H": 9}
CATEGORY_MANAGER = {
    "A": ("white", "M"), "B": ("white", "M"), "C": ("black", "M"),
    "D": ("white", "F"), "E": ("white", "M"), "F": ("white", "F"),
    "G": ("black", "F"), "H": ("white", "M"),
}
PROVINCE_SLUG = {
    "Gauteng": "GP", "N.Cape": "NC", "W.Cape": "WC", "KZN": "KZN",
    "Limpopo": "LP", "North West": "NW", "Mpungalanga": "MP",
    "Free State": "FS",
}
FUNDS_PER_FAMILY = 3


def make_funds_sample() -> None:
    rng = np.random.default_rng(20181231)
    provinces = [p for p, c in PROVINCE_COUNTS.items() for _ in range(c)]
    categories = [c for c, k in CATEGORY_COUNTS.items() for _ in range(k)]
    rng.shuffle(categories)

    lines = [
        "# Synthetic fixture: 200 generated fund rows with province/category",
        "# marginals shaped to plausible market composition. Not real data.",
        "fund_id,family,province,category,manager_race,manager_gender,assets,performance",
    ]
    family_serial: dict[str, int] = {}
    family_fill: dict[str, int] = {}
    for k, (province, category) in enumerate(zip(provinces, categories)):
        slug = PROVINCE_SLUG[province]
        serial = family_serial.get(province, 0)
        family = f"{slug}_family_{serial:02d}"
        family_fill[family] = family_fill.get(family, 0) + 1
        if family_fill[family] >= FUNDS_PER_FAMILY:
            family_serial[province] = serial + 1
        assets = round(float(np.exp(rng.normal(4.0, 1.2))), 2)
        performance = round(float(np.clip(rng.normal(0.45, 0.3), 0.0, 1.5)), 4)
        race, gender = CATEGORY_MANAGER[category]
        lines.append(f"F{k + 1:04d},{family},{province},{category},"
                     f"{race},{gender},{assets},{performance}")
    (DATA / "funds_sample.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {DATA / 'funds_sample.csv'} ({len(lines) - 3} rows)")


def make_network10() -> None:
    net = netdiff.generate_random_network(10, density=0.6, seed=7)
    netdiff.write_network_csv(DATA / "network10.csv", net)
    print(f"wrote {DATA / 'network10.csv'}")


def make_golden_trace() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    out = GOLDEN / "gossip_trace_10node_seed42.csv"
    status = cli.main([
        "gossip", "simulate",
        "--network", str(DATA / "network10.csv"),
        "--p_select", "0.5", "--p_drop", "0.1", "--p_loss", "0.2",
        "--p_gain", "0.8",
        "--rounds", "100", "--seed", "42",
        "--informed", "0",
        "--out", str(out), "--quiet",
    ])
    if status != 0:
        raise SystemExit(f"golden trace run failed with status {status}")
    Path(f"{out}.manifest.json").unlink()  # only the CSV is golden
    print(f"wrote {out}")


if __name__ == "__main__":
    make_funds_sample()
    make_network10()
    make_golden_trace()
