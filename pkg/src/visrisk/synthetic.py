"""Synthetic demo corpus: a full macro-financial panel with crisis episodes.

Generates everything the pipeline ingests: quarterly observations for a
cross section of economies, exposure links, crisis events, stability-state
labels, binary early-warning labels, and a bank discussion corpus.  The
point is structure, not realism: vulnerability builds up ahead of each
scripted crisis so maps, scores and networks all have something to show.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

ECONOMIES = (
    "AR AU BE BR CA CH CN CZ DE DK ES FI FR GB GR HK HU IE IN IT JP KR MX NL NO SE TR US"
).split()

MACRO_INDICATORS = ("gdp_growth", "inflation", "real_interest_rate", "government_deficit")
IMBALANCE_INDICATORS = ("credit_to_gdp_gap", "credit_growth", "house_price_gap",
                        "equity_price_gap", "leverage", "debt_service_ratio")
GLOBAL_INDICATORS = ("global_credit_gap", "global_house_price_gap",
                     "global_equity_price_gap", "current_account_deficit")
INDICATORS = MACRO_INDICATORS + IMBALANCE_INDICATORS + GLOBAL_INDICATORS

GROUPS = {
    "domestic macroeconomic": list(MACRO_INDICATORS),
    "credit and asset imbalances": list(IMBALANCE_INDICATORS),
    "global imbalances": list(GLOBAL_INDICATORS),
}

BANKS = ("NordCredit SuomiPankki BalticTrust MeriBank KarhuCapital LakeFunding "
         "PohjolaInvest TerraSavings HansaGroup VelhoBank UnionFennia KoivuFinance").split()

DISTRESS_TERMS = ("risk", "crisis", "distress", "default", "bailout", "collapse")

_CALM_TEXTS = (
    "quarterly earnings beat expectations",
    "branch network expansion announced",
    "dividend policy unchanged this year",
    "new mobile platform launched",
    "market share stable across segments",
)
_DISTRESS_TEXTS = (
    "analysts flag mounting credit risk",
    "liquidity distress rumours circulate",
    "potential default on wholesale funding",
    "government bailout talks reported",
    "share price collapse after writedowns",
    "crisis meeting with the regulator",
)


def quarters(start_year: int = 1990, count: int = 88) -> list[str]:
    return [f"{start_year + i // 4}Q{i % 4 + 1}" for i in range(count)]


def crisis_schedule(entities, times, rng) -> dict[str, tuple[int, int]]:
    """Pick crisis windows (start, end as time indices) for about a third of entities."""
    episodes = {}
    n_crisis = max(3, len(entities) // 3)
    chosen = rng.choice(len(entities), size=n_crisis, replace=False)
    anchor = int(len(times) * 0.78)   # cluster around the late-sample crisis wave
    for e in chosen:
        start = anchor + int(rng.integers(-6, 4))
        start = min(max(start, 12), len(times) - 8)
        episodes[entities[e]] = (start, start + int(rng.integers(4, 9)))
    return episodes


def generate_panel(entities=ECONOMIES, times=None, indicators=INDICATORS,
                   seed: int = 20110, missing_rate: float = 0.02):
    """Observation rows, plus events, state labels and binary pre-crisis labels."""
    times = times or quarters()
    rng = np.random.default_rng(seed)
    episodes = crisis_schedule(entities, times, rng)

    n_t = len(times)
    global_cycle = np.cumsum(rng.normal(0, 0.3, size=n_t))
    obs_rows, label_rows, state_rows = [], [], []
    event_rows = [
        (entity, times[s], times[min(e, n_t - 1)], "banking crisis")
        for entity, (s, e) in sorted(episodes.items())
    ]

    for entity in entities:
        base = rng.normal(0, 1, size=len(indicators))
        vulnerability = np.zeros(n_t)
        if entity in episodes:
            s, e = episodes[entity]
            ramp = np.clip((np.arange(n_t) - (s - 16)) / 16.0, 0, 1)
            bust = np.where((np.arange(n_t) >= s) & (np.arange(n_t) <= e), -1.5, 0.0)
            vulnerability = 3.0 * ramp + bust
        noise = rng.normal(0, 0.5, size=(n_t, len(indicators)))
        ar = np.zeros((n_t, len(indicators)))
        for t in range(1, n_t):
            ar[t] = 0.85 * ar[t - 1] + noise[t]
        for t, tlabel in enumerate(times):
            for k, ind in enumerate(indicators):
                value = base[k] + ar[t, k]
                if ind in IMBALANCE_INDICATORS:
                    value += vulnerability[t]
                if ind in GLOBAL_INDICATORS:
                    value += global_cycle[t]
                if rng.random() < missing_rate:
                    obs_rows.append((entity, tlabel, ind, ""))
                else:
                    obs_rows.append((entity, tlabel, ind, f"{value:.4f}"))
            state, label = "calm", 0
            if entity in episodes:
                s, e = episodes[entity]
                if s <= t <= min(e, n_t - 1):
                    state = "crisis"
                elif s - 6 <= t < s:
                    state = "pre_crisis"
                elif e < t <= e + 4:
                    state = "post_crisis"
                if s - 8 <= t < s:
                    label = 1
            state_rows.append((entity, tlabel, state))
            label_rows.append((entity, tlabel, label))
    return obs_rows, event_rows, state_rows, label_rows, times


def generate_links(entities=ECONOMIES, times=None, seed: int = 4, per_time: int = 40):
    """Sparse directed exposures for a handful of time points."""
    times = times or quarters()
    rng = np.random.default_rng(seed)
    rows = []
    for t in times[:: max(1, len(times) // 6)]:
        for _ in range(per_time):
            i, j = rng.choice(len(entities), size=2, replace=False)
            rows.append((entities[i], entities[j], t, f"{rng.exponential(10):.2f}"))
    return rows


def generate_occurrences(banks=BANKS, times=None, seed: int = 99, n_docs: int = 1500,
                         distressed=("BalticTrust", "VelhoBank")):
    """Forum-post style mention records; distressed banks attract grim text."""
    times = times or quarters()
    rng = np.random.default_rng(seed)
    popularity = 1.0 / np.arange(1, len(banks) + 1)
    popularity /= popularity.sum()
    rows = []
    for d in range(n_docs):
        t = times[int(rng.integers(len(times)))]
        size = 1 + int(rng.random() < 0.55) + int(rng.random() < 0.2)
        picks = rng.choice(len(banks), size=size, replace=False, p=popularity)
        names = [banks[i] for i in picks]
        grim = any(b in distressed for b in names)
        if rng.random() < (0.6 if grim else 0.08):
            text = _DISTRESS_TEXTS[int(rng.integers(len(_DISTRESS_TEXTS)))]
        else:
            text = _CALM_TEXTS[int(rng.integers(len(_CALM_TEXTS)))]
        for i, name in enumerate(names):
            rows.append((f"post{d:05d}", t, name, text if i == 0 else ""))
    return rows


def default_config(paths: dict) -> dict:
    weights = {}
    for ind in INDICATORS:
        if ind in IMBALANCE_INDICATORS:
            weights[ind] = 2.0
        elif ind in GLOBAL_INDICATORS:
            weights[ind] = 1.0
        else:
            weights[ind] = 0.25
    return {
        **paths,
        "som": {"x": 13, "y": 10, "iterations": 40, "sigma_final": 1.0,
                "transform": "percentile"},
        "sotm": {"units": 8, "sigma": 1.2, "epochs_per_slice": 10,
                 "transform": "percentile"},
        "ewm": {
            "groups": GROUPS,
            "weights": weights,
            "bias": -4.0,
            "fit": {"learning_rate": 0.5, "iterations": 2000, "l2": 0.01},
        },
        "network": {"width": 1000.0, "height": 700.0, "iterations": 200, "seed": 7},
        "distress_terms": list(DISTRESS_TERMS),
    }


def write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_demo_data(out_dir, entities=ECONOMIES, n_quarters: int = 88,
                    seed: int = 20110, n_docs: int = 1500) -> Path:
    """Write the whole demo corpus plus a ready-to-run config; returns config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    times = quarters(count=n_quarters)
    obs, events, states, labels, _ = generate_panel(entities, times, seed=seed)
    write_csv(out / "observations.csv", "entity,time,indicator,value", obs)
    write_csv(out / "events.csv", "entity,start,end,label", events)
    write_csv(out / "states.csv", "entity,time,label", states)
    write_csv(out / "labels.csv", "entity,time,label", labels)
    write_csv(out / "links.csv", "source,target,time,weight",
              generate_links(entities, times, seed=seed + 1))
    write_csv(out / "occurrences.csv", "doc_id,time,entity,text",
              generate_occurrences(times=times, seed=seed + 2, n_docs=n_docs))
    config = default_config({
        "observations": str(out / "observations.csv"),
        "links": str(out / "links.csv"),
        "events": str(out / "events.csv"),
        "states": str(out / "states.csv"),
        "labels": str(out / "labels.csv"),
        "occurrences": str(out / "occurrences.csv"),
    })
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return config_path
