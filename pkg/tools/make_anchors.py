"""Regenerate ``src/ensvol/data/fixtures/anchors.json``.

Every anchor is evaluated here in closed form with mpmath at 30 digits,
independently of the ``ensvol`` code paths, and then frozen.  The tests
read the frozen file; rerun this script only when adding an anchor.

    python3 tools/make_anchors.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
OUT = Path(__file__).resolve().parents[1] / "src" / "ensvol" / "data" / "fixtures" / "anchors.json"


def H(*p):
    return -mp.fsum(x * mp.log(x) for x in map(mp.mpf, p) if x > 0)


def bose_entropy(r):
    """Entropy of a thermal oscillator at kT/(hbar omega) = r."""
    r = mp.mpf(r)
    nbar = 1 / (mp.exp(1 / r) - 1)
    return mp.log(1 + nbar) + nbar * mp.log(1 + 1 / nbar)


def correspondence(r, hbar):
    # classical ln(2 pi e kT / omega) with omega = 1, kT = r hbar
    s_c = mp.log(2 * mp.pi * mp.e * r * hbar)
    return mp.exp(s_c - bose_entropy(r))


def anchors():
    a = {}
    a["shannon_0.9_0.1"] = H("0.9", "0.1")
    a["von_neumann_0.75_0.25"] = H("0.75", "0.25")
    a["microstates_0.75_0.25"] = mp.exp(H("0.75", "0.25"))
    collision = mp.mpf("0.64") + mp.mpf("0.01") + mp.mpf("0.01")
    a["renyi2_joint_entropy"] = -mp.log(collision)
    a["renyi2_joint_volume"] = 1 / collision
    a["renyi2_marginal_product"] = (1 / (mp.mpf("0.81") + mp.mpf("0.01"))) ** 2
    a["renyi2_violation"] = a["renyi2_joint_volume"] - a["renyi2_marginal_product"]
    a["gaussian_entropy_identity"] = 1 + mp.log(2 * mp.pi)
    a["gaussian_entropy_diag41"] = mp.log(4 * mp.pi * mp.e)
    a["gaussian_volume_identity"] = 2 * mp.pi * mp.e
    a["joint_entropy"] = H("0.8", "0.1", "0.1")
    a["joint_volume"] = mp.exp(a["joint_entropy"])
    a["marginal_volume_product"] = mp.exp(2 * H("0.9", "0.1"))
    a["joint_projection_slack"] = a["joint_volume"] - a["marginal_volume_product"]
    a["binary_entropy_0.3"] = H("0.3", "0.7")
    a["uniformity_volume_0.3"] = mp.exp(a["binary_entropy_0.3"])
    s = 1 / mp.sqrt(2)
    a["holevo_chi"] = H((1 + s) / 2, (1 - s) / 2)
    a["holevo_chi_bits"] = a["holevo_chi"] / mp.log(2)
    a["lanford_robinson_slack"] = mp.log(2) - a["holevo_chi"]
    a["uncertainty_sum"] = mp.log(mp.pi * mp.e)
    a["uncertainty_slack"] = mp.log(mp.e / 2)
    a["inverse_e"] = 1 / mp.e
    a["position_entropy_sigma1"] = mp.log(2 * mp.pi * mp.e) / 2
    for hbar in (1, 2):
        for r in (10, 100, 1000, 10000):
            a[f"correspondence_hbar{hbar}_r{r}"] = correspondence(r, hbar)
    return a


def main():
    doc = {k: float(v) for k, v in anchors().items()}
    OUT.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(doc)} anchors to {OUT}")


if __name__ == "__main__":
    main()
