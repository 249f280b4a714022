"""Smoke test for the airdrop_forge extension module.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/py
"""

import json
from pathlib import Path

import airdrop_forge as af

FIXTURES = Path(__file__).resolve().parent.parent / "crates/cli/tests/fixtures/golden"


def main():
    out = af.generate(seed=7)
    ledger = out["ledger"]
    assert len(ledger) > 0
    assert out["metadata"]["generator"] == "xoshiro256starstar-splitmix64"
    assert af.Ledger.from_csv(ledger.to_csv()).to_csv() == ledger.to_csv()

    reports = ledger.detect(out["groups_json"])
    truth = {g["group_id"]: g for g in out["truth"]["groups"]}
    for r in reports:
        assert r["funder"]["address"] == truth[r["group_id"]]["funder"], r["group_id"]

    profit = ledger.profit(out["groups_json"], out["prices_csv"])
    assert len(profit) == len(reports)

    assert abs(float(af.compute_reward("2.6045", 3)) - 341.1181) <= 0.005

    params = (FIXTURES / "mechanism.json").read_text()
    solution = af.solve(params)
    assert 0.0 <= solution["self_report_ratio"]["value"] <= 1.0
    checks = af.verify(params)["checks"]
    assert {c["name"] for c in checks} >= {"self_report_ratio", "menu_feasibility"}

    bad = json.loads(params)
    bad["hunters_M"] = 3
    try:
        af.solve(json.dumps(bad))
    except af.AirdropForgeError as e:
        assert "hunter" in str(e).lower(), e
    else:
        raise AssertionError("mismatched hunter count accepted")

    print(f"ok: {len(ledger)} transactions, {len(reports)} groups, "
          f"self-report ratio {solution['self_report_ratio']['value']:.4f}")


if __name__ == "__main__":
    main()
