#!/usr/bin/env python3
"""Regenerates data/builtin_catalog.json. The JSON file is the source of truth
for the library; this script only documents how it was laid out."""
import json
import pathlib

SAT = ["VL", "VH", "HL", "HH"]
ALL = SAT + ["TERR"]
TERR_SPAN = (47.0, 862.0)
SAT_SPAN = (950.0, 2150.0)


def flat(lines, gain):
    span = TERR_SPAN if lines == ["TERR"] else SAT_SPAN
    return {"lines": lines, "anchors": [{"frequency_mhz": span[0], "gain_db": gain},
                                        {"frequency_mhz": span[1], "gain_db": gain}]}


def sloped(lines, g_lo, g_hi):
    span = TERR_SPAN if lines == ["TERR"] else SAT_SPAN
    return {"lines": lines, "anchors": [{"frequency_mhz": span[0], "gain_db": g_lo},
                                        {"frequency_mhz": span[1], "gain_db": g_hi}]}


def port(pid, direction, lines, role):
    return {"id": pid, "direction": direction, "lines": lines, "role": role}


def transfer(src, dst, curves, nf=0.0, active=False, regs=None):
    t = {"from": src, "to": dst, "curves": curves, "noise_figure_db": nf, "active": active}
    if regs:
        t["regulators"] = regs
    return t


def multiswitch(model, subs, cascadable):
    ports = [port("in_" + l, "in", [l], "trunk") for l in ALL]
    if cascadable:
        ports += [port("out_" + l, "out", [l], "trunk") for l in ALL]
    ports += [port("sub%d" % k, "out", ALL, "subscriber") for k in range(1, subs + 1)]
    ports.append(port("tv", "out", ["TERR"], "terrestrial"))
    transfers = []
    if cascadable:
        for l in ALL:
            transfers.append(transfer("in_" + l, "out_" + l, [flat([l], -2.0)]))
    for k in range(1, subs + 1):
        for l in SAT:
            transfers.append(transfer("in_" + l, "sub%d" % k, [flat([l], 2.0)], 8.0, True, ["sat_" + l]))
        transfers.append(transfer("in_TERR", "sub%d" % k, [flat(["TERR"], 2.0)], 8.0, True, ["terr"]))
    transfers.append(transfer("in_TERR", "tv", [flat(["TERR"], 12.0)], 8.0, True, ["terr"]))
    regs = [{"id": "sat_" + l, "lines": [l], "positions_db": [-12.0, -8.0, -4.0, 0.0], "default_index": 3}
            for l in SAT]
    regs.append({"id": "terr", "lines": ["TERR"], "positions_db": [float(-15 + i) for i in range(16)],
                 "default_index": 15})
    return {"id": model + ("" if cascadable else "T"),
            "class": "multiswitch_cascadable" if cascadable else "multiswitch_terminal",
            "ports": ports, "transfers": transfers, "regulators": regs,
            "max_output_power_dbm": 5.0, "tap_isolation_db": 30.0,
            "metadata": {"family": "MV5xx", "description": "%d-subscriber multiswitch" % subs}}


def radial(model, subs):
    ports = [port("in_" + l, "in", [l], "sat_input") for l in SAT]
    ports.append(port("in_TERR", "in", ["TERR"], "terrestrial"))
    ports += [port("sub%d" % k, "out", ALL, "subscriber") for k in range(1, subs + 1)]
    transfers = []
    for k in range(1, subs + 1):
        for l in SAT:
            transfers.append(transfer("in_" + l, "sub%d" % k, [sloped([l], 0.0, 2.0)], 8.0, True))
        transfers.append(transfer("in_TERR", "sub%d" % k, [flat(["TERR"], 2.0)], 8.0, True, ["terr"]))
    regs = [{"id": "terr", "lines": ["TERR"], "positions_db": [float(-15 + i) for i in range(16)],
             "default_index": 15}]
    return {"id": model, "class": "multiswitch_radial", "ports": ports, "transfers": transfers,
            "regulators": regs, "max_output_power_dbm": 8.0, "tap_isolation_db": 30.0,
            "metadata": {"family": "MR5xx", "description": "%d-subscriber radial multiswitch" % subs}}


def tap(model, tap_loss, through_loss, isolation):
    ports = [port("in", "in", ALL, "trunk"), port("out", "out", ALL, "trunk"),
             port("tap", "out", ALL, "subscriber")]
    transfers = [
        transfer("in", "out", [flat(["TERR"], -through_loss), sloped(SAT, -through_loss - 0.3, -through_loss - 0.8)]),
        transfer("in", "tap", [flat(["TERR"], -tap_loss), flat(SAT, -tap_loss)]),
    ]
    return {"id": model, "class": "tap", "ports": ports, "transfers": transfers,
            "tap_isolation_db": isolation,
            "metadata": {"family": "SD5xx", "description": "one-way tap, %g dB tap loss" % tap_loss}}


def splitter(model, legs, loss_terr, loss_sat, isolation):
    ports = [port("in", "in", ALL, "trunk")]
    ports += [port("out%d" % k, "out", ALL, "trunk") for k in range(1, legs + 1)]
    transfers = [transfer("in", "out%d" % k, [flat(["TERR"], -loss_terr), flat(SAT, -loss_sat)])
                 for k in range(1, legs + 1)]
    return {"id": model, "class": "splitter", "ports": ports, "transfers": transfers,
            "tap_isolation_db": isolation,
            "metadata": {"family": "SD5xx", "description": "%d-way splitter" % legs}}


def amplifier():
    return {"id": "LA30", "class": "amplifier",
            "ports": [port("in", "in", ALL, "trunk"), port("out", "out", ALL, "trunk")],
            "transfers": [transfer("in", "out", [flat(["TERR"], 30.0), sloped(SAT, 28.0, 30.0)], 6.0, True,
                                   ["gain"])],
            "regulators": [{"id": "gain", "lines": ALL, "positions_db": [float(-10 + i) for i in range(11)],
                            "default_index": 10}],
            "max_output_power_dbm": 10.0,
            "metadata": {"description": "line amplifier"}}


def attenuator():
    return {"id": "ATT20", "class": "attenuator",
            "ports": [port("in", "in", ALL, "trunk"), port("out", "out", ALL, "trunk")],
            "transfers": [transfer("in", "out", [flat(["TERR"], 0.0), flat(SAT, 0.0)], 0.0, False, ["att"])],
            "regulators": [{"id": "att", "lines": ALL, "positions_db": [float(-20 + i) for i in range(21)],
                            "default_index": 20}],
            "metadata": {"description": "settable attenuator, 0-20 dB in 1 dB steps"}}


def main():
    comps = []
    for subs in (4, 8, 12):
        model = "MV5%02d" % subs
        comps.append(multiswitch(model, subs, True))
        comps.append(multiswitch(model, subs, False))
    comps.append(radial("MR512", 12))
    comps.append(tap("SD5T04", 4.0, 3.5, 22.0))
    comps.append(tap("SD5T08", 8.0, 2.0, 25.0))
    comps.append(tap("SD5T12", 12.0, 1.5, 28.0))
    comps.append(tap("SD5T15", 15.0, 1.0, 30.0))
    comps.append(splitter("SD5S2", 2, 4.0, 4.5, 22.0))
    comps.append(splitter("SD5S4", 4, 7.5, 8.0, 20.0))
    comps.append(amplifier())
    comps.append(attenuator())
    comps.sort(key=lambda c: c["id"])
    cables = [
        {"id": "drop", "attenuation": [{"frequency_mhz": 200.0, "db_per_100m": 8.5},
                                       {"frequency_mhz": 800.0, "db_per_100m": 17.0}]},
        {"id": "trunk", "attenuation": [{"frequency_mhz": 200.0, "db_per_100m": 5.4},
                                        {"frequency_mhz": 800.0, "db_per_100m": 10.8}]},
    ]
    doc = {"format_version": 1, "components": comps, "cables": cables}
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "builtin_catalog.json"
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
