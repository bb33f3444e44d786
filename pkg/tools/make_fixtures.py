"""Regenerate the bundled layouts and task suites.

    python3 tools/make_fixtures.py

Output is deterministic; the generated JSON is committed under
src/sclplan/data so the package never needs this script at runtime.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "sclplan" / "data"

OPEN = {"isopen": True}
CLOSED = {"isopen": False}


def ent(eid, static=(), dynamic=None):
    d = {"id": eid, "class": eid.rsplit("-", 1)[0], "static": {k: True for k in static}}
    if dynamic:
        d["dynamic"] = dynamic
    return d


def surface(eid, *extra):
    return ent(eid, ("isreceptacle", *extra), OPEN)


def box(eid, *extra):
    return ent(eid, ("isreceptacle", "openable", *extra), CLOSED)


def item(eid, *extra):
    return ent(eid, ("pickupable", *extra))


# -- alfworld-style rooms ---------------------------------------------------

ALF_ROOMS = {
    "kitchen": {
        "receptacles": [surface("countertop-1"), surface("countertop-2"), surface("diningtable-1"),
                        box("cabinet-1"), box("cabinet-2"), box("drawer-1"), box("fridge-1", "coolsource"),
                        box("microwave-1", "heatsource"), surface("sinkbasin-1", "cleansource"),
                        surface("shelf-1"), surface("garbagecan-1")],
        "items": ["apple", "egg", "bowl", "mug", "potato", "tomato", "plate", "cup", "spoon", "lettuce",
                  "bread", "knife"],
        "heatable": ["apple", "egg", "mug", "potato", "tomato", "plate", "cup", "bread"],
        "coolable": ["apple", "egg", "mug", "potato", "tomato", "plate", "cup", "lettuce", "bread"],
        "cleanable": ["apple", "bowl", "mug", "potato", "tomato", "plate", "cup", "spoon", "lettuce", "knife"],
    },
    "bedroom": {
        "receptacles": [surface("desk-1"), surface("sidetable-1"), surface("bed-1"), surface("dresser-1"),
                        box("drawer-1"), box("drawer-2"), surface("shelf-1"), surface("garbagecan-1")],
        "items": ["book", "cd", "pen", "pencil", "keychain", "alarmclock", "pillow", "cellphone", "mug"],
        "lamp": "desklamp-1",
    },
    "bathroom": {
        "receptacles": [surface("countertop-1"), surface("sinkbasin-1", "cleansource"), box("cabinet-1"),
                        box("cabinet-2"), surface("toilet-1"), surface("towelholder-1"),
                        surface("garbagecan-1"), surface("shelf-1")],
        "items": ["soapbar", "spraybottle", "toiletpaper", "cloth", "candle", "soapbottle"],
        "cleanable": ["soapbar", "cloth"],
    },
    "livingroom": {
        "receptacles": [surface("sofa-1"), surface("coffeetable-1"), surface("armchair-1"),
                        surface("tvstand-1"), box("drawer-1"), surface("sidetable-1"), box("cabinet-1")],
        "items": ["remotecontrol", "keychain", "box", "laptop", "newspaper", "statue", "vase", "creditcard",
                  "watch"],
        "lamp": "floorlamp-1",
    },
}

WORDS = {
    "countertop": "countertop", "diningtable": "dining table", "cabinet": "cabinet", "drawer": "drawer",
    "fridge": "fridge", "microwave": "microwave", "sinkbasin": "sink basin", "shelf": "shelf",
    "garbagecan": "garbage can", "desk": "desk", "sidetable": "side table", "bed": "bed",
    "dresser": "dresser", "toilet": "toilet", "towelholder": "towel holder", "sofa": "sofa",
    "coffeetable": "coffee table", "armchair": "armchair", "tvstand": "tv stand",
    "alarmclock": "alarm clock", "cellphone": "cellphone", "remotecontrol": "remote control",
    "creditcard": "credit card", "spraybottle": "spray bottle", "toiletpaper": "toilet paper",
    "soapbar": "soap bar", "soapbottle": "soap bottle", "desklamp": "desk lamp", "floorlamp": "floor lamp",
}


def word(eid: str) -> str:
    cls = eid.rsplit("-", 1)[0]
    return WORDS.get(cls, cls)


def alf_layout(room: str, rng: random.Random, start: str, placements: dict[str, str]):
    spec = ALF_ROOMS[room]
    ents = [ent("room-1")] + [dict(r) for r in spec["receptacles"]]
    rels = []
    for obj, where in sorted(placements.items()):
        ents.append(item(obj, "toggleable") if "lamp" in obj else item(obj))
        rels.append([obj, "in", where])
    return {"entities": ents, "relations": rels, "agent": {"location": start}}


def simple_suite():
    rng = random.Random("simple-suite")
    tasks = []
    kinds = ["place"] * 5 + ["clean", "heat", "cool", "light"]
    starts = ["at"] * 8 + ["open"] * 9 + ["closed"] * 3  # where the target object waits
    n = 0
    while len(tasks) < 50:
        room = rng.choice(sorted(ALF_ROOMS))
        spec = ALF_ROOMS[room]
        kind = rng.choice(kinds)
        if kind == "clean" and not spec.get("cleanable"):
            continue
        if kind in ("heat", "cool") and room != "kitchen":
            continue
        if kind == "light" and "lamp" not in spec:
            continue
        pool = {"clean": spec.get("cleanable"), "heat": spec.get("heatable"),
                "cool": spec.get("coolable")}.get(kind) or spec["items"]
        target = rng.choice(pool) + "-1"
        recs = [r["id"] for r in spec["receptacles"]]
        open_recs = [r["id"] for r in spec["receptacles"] if not r["static"].get("openable")]
        closed_recs = [r for r in recs if r not in open_recs and not r.startswith(("fridge", "microwave"))]
        where_kind = rng.choice(starts)
        home = rng.choice(closed_recs if where_kind == "closed" and closed_recs else open_recs)
        goal_pool = [r for r in recs if r != home and not r.startswith(("microwave", "sinkbasin", "garbage"))]
        dest = rng.choice(goal_pool)
        placements = {target: home}
        # distractors
        others = [i for i in spec["items"] if i + "-1" != target]
        for extra in rng.sample(others, min(4, len(others))):
            placements[extra + "-1"] = rng.choice(recs)
        if kind == "light":
            lamp = spec["lamp"]
            placements[lamp] = rng.choice([r for r in open_recs if r != home])
        start = home if where_kind == "at" else "room-1"
        layout = alf_layout(room, rng, start, placements)
        t, d = word(target), word(dest)
        if kind == "place":
            nl, success = f"put a {t} in {d}.", [f"(in {target} {dest})"]
        elif kind == "clean":
            nl, success = f"put a clean {t} in {d}.", [f"(isclean {target})", f"(in {target} {dest})"]
        elif kind == "heat":
            nl, success = f"put a hot {t} in {d}.", [f"(ishot {target})", f"(in {target} {dest})"]
        elif kind == "cool":
            nl, success = f"put a cool {t} in {d}.", [f"(iscold {target})", f"(in {target} {dest})"]
        else:
            lamp = spec["lamp"]
            nl = f"look at the {t} under the {word(lamp)}."
            success = [f"(holding {target})", f"(istoggled {lamp})"]
        n += 1
        tasks.append({"id": f"simple-{n:02d}", "nl_goal": nl, "layout": layout, "success": success})
    return {"id": "simple", "action_set": "alfworld", "max_steps": 50, "tasks": tasks}


# -- thor-style kitchens -----------------------------------------------------


def thor_kitchen(variant: int):
    """Two kitchens with the same furniture and different object placement."""
    ents = [
        ent("room-1"),
        surface("countertop-1"), surface("countertop-2"), surface("diningtable-1"),
        box("fridge-1", "coolsource"), box("microwave-1", "heatsource", "toggleable"),
        surface("stoveburner-1", "heatsource", "toggleable"), surface("stoveburner-2", "heatsource", "toggleable"),
        surface("sinkbasin-1", "cleansource"), ent("faucet-1", ("watersource", "toggleable")),
        surface("coffeemachine-1", "brewer", "toggleable"), surface("toaster-1", "heatsource", "toggleable"),
        box("cabinet-1"), box("cabinet-2"), box("drawer-1"),
        ent("pan-1", ("pickupable", "isreceptacle"), OPEN), ent("pot-1", ("pickupable", "isreceptacle"), OPEN),
        ent("plate-1", ("pickupable", "isreceptacle"), OPEN), ent("mug-1", ("pickupable", "isreceptacle"), OPEN),
        ent("bowl-1", ("pickupable", "isreceptacle"), OPEN), ent("cup-1", ("pickupable", "isreceptacle"), OPEN),
        item("egg-1", "cookable"), item("potato-1", "cookable"), item("apple-1"),
        item("bread-1", "sliceable", "cookable"), item("tomato-1", "sliceable"), item("lettuce-1", "sliceable"),
        item("knife-1", "iscutter"), item("spoon-1"),
    ]
    if variant == 1:
        where = {"pan-1": "stoveburner-1", "pot-1": "stoveburner-2", "plate-1": "countertop-1",
                 "mug-1": "cabinet-1", "bowl-1": "cabinet-2", "cup-1": "cabinet-2", "egg-1": "fridge-1",
                 "potato-1": "fridge-1", "apple-1": "countertop-2", "bread-1": "countertop-1",
                 "tomato-1": "countertop-2", "lettuce-1": "fridge-1", "knife-1": "drawer-1",
                 "spoon-1": "drawer-1"}
    else:
        where = {"pan-1": "cabinet-1", "pot-1": "stoveburner-2", "plate-1": "diningtable-1",
                 "mug-1": "countertop-2", "bowl-1": "diningtable-1", "cup-1": "cabinet-1", "egg-1": "countertop-1",
                 "potato-1": "cabinet-2", "apple-1": "fridge-1", "bread-1": "cabinet-2",
                 "tomato-1": "fridge-1", "lettuce-1": "countertop-2", "knife-1": "countertop-1",
                 "spoon-1": "drawer-1"}
    rels = [[k, "in", v] for k, v in sorted(where.items())]
    return {"entities": ents, "relations": rels, "agent": {"location": "room-1"}}, where


def fetch(obj, where):
    """Reference steps that end with ``obj`` in hand."""
    return reveal(where[obj]) + [f"MoveToObject {obj}", f"PickupObject {obj}"]


def reveal(holder):
    steps = [f"MoveToObject {holder}"]
    if holder.startswith(("fridge", "cabinet", "drawer", "microwave")):
        steps.append(f"OpenObject {holder}")
    return steps


def put(obj, into, where):
    """Carry the held ``obj`` into ``into``; a receptacle resting on furniture is revealed first."""
    steps = [f"MoveToObject {where[into]}"] if into in where else []
    return steps + [f"MoveToObject {into}", f"PlaceObject {obj} in {into}"]


def complex_suite():
    tasks = []
    for variant in (1, 2):
        layout, where = thor_kitchen(variant)
        v = f"k{variant}"
        pan_ready = where["pan-1"].startswith("stoveburner")
        chilled = "apple" if where["apple-1"] != "fridge-1" else "lettuce"
        pan_steps = [] if pan_ready else fetch("pan-1", where) + put("pan-1", "stoveburner-1", where)
        defs = [
            ("cook-egg", "cook an egg in the pan on the stove, then turn the stove off.",
             pan_steps + fetch("egg-1", where) + put("egg-1", "pan-1", {**where, "pan-1": "stoveburner-1"})
             + ["MoveToObject stoveburner-1", "ToggleObjectOn stoveburner-1"],
             ["(iscooked egg-1)", "(in egg-1 pan-1)", "(not (istoggled stoveburner-1))"],
             ["ToggleObjectOff stoveburner-1"]),
            ("wash-bowl", "wash the bowl in the sink and leave the tap off.",
             fetch("bowl-1", where) + put("bowl-1", "sinkbasin-1", where)
             + ["MoveToObject faucet-1", "ToggleObjectOn faucet-1"],
             ["(isclean bowl-1)", "(not (istoggled faucet-1))"], ["ToggleObjectOff faucet-1"]),
            ("coffee", "make a mug of coffee and switch the coffee machine off.",
             fetch("mug-1", where) + put("mug-1", "coffeemachine-1", where)
             + ["ToggleObjectOn coffeemachine-1"],
             ["(isfilled mug-1)", "(not (istoggled coffeemachine-1))"], ["ToggleObjectOff coffeemachine-1"]),
            (f"chill-{chilled}", f"chill the {chilled} in the fridge.",
             fetch(f"{chilled}-1", where) + ["MoveToObject fridge-1", "OpenObject fridge-1",
                                             f"PlaceObject {chilled}-1 in fridge-1", "CloseObject fridge-1",
                                             "MoveToObject countertop-1"],
             [f"(iscold {chilled}-1)", "(not (isopen fridge-1))"], []),
            ("toast-bread", "toast the bread and switch the toaster off afterwards.",
             fetch("bread-1", where) + put("bread-1", "toaster-1", where)
             + ["ToggleObjectOn toaster-1"],
             ["(ishot bread-1)", "(not (istoggled toaster-1))"], ["ToggleObjectOff toaster-1"]),
            ("slice-tomato", "slice the tomato, then put the knife down.",
             fetch("knife-1", where) + reveal(where["tomato-1"])
             + ["MoveToObject tomato-1", "SliceObject tomato-1"],
             ["(issliced tomato-1-slice-1)", "(handempty)"], [f"PlaceObject knife-1 in {where['tomato-1']}"]),
            ("boil-potato", "cook the potato in the pot and turn the burner off when it is done.",
             fetch("potato-1", where) + put("potato-1", "pot-1", where)
             + ["MoveToObject stoveburner-2", "ToggleObjectOn stoveburner-2"],
             ["(iscooked potato-1)", "(in potato-1 pot-1)", "(not (istoggled stoveburner-2))"],
             ["ToggleObjectOff stoveburner-2"]),
            ("warm-cup", "warm the cup in the microwave and turn the microwave off.",
             fetch("cup-1", where) + ["MoveToObject microwave-1", "OpenObject microwave-1",
                                      "PlaceObject cup-1 in microwave-1", "ToggleObjectOn microwave-1"],
             ["(ishot cup-1)", "(not (istoggled microwave-1))"], ["ToggleObjectOff microwave-1"]),
        ]
        for name, nl, ref, success, tail in defs:
            tasks.append({"id": f"{name}-{v}", "nl_goal": nl, "layout": f"thor-kitchen-{variant}",
                          "success": success, "reference": ref + tail})
        (DATA / "layouts" / f"thor-kitchen-{variant}.json").write_text(json.dumps(layout, indent=1) + "\n")
    return {"id": "complex", "action_set": "thor", "max_steps": 75, "tasks": tasks}


# -- robot-style lab ---------------------------------------------------------


def robot_suite():
    ents = [
        ent("room-1"), surface("table-1"), surface("table-2"), surface("redcontainer-1"),
        ent("trafficcone-1", ("isreceptacle",), OPEN),
        ent("human-1", ("ishuman", "isreceptacle"), CLOSED),
        item("apple-1"), item("can-1"), item("bag-1"), item("soda-1", "isdrink"),
    ]
    rels = [["apple-1", "in", "table-1"], ["can-1", "in", "table-2"], ["bag-1", "in", "human-1"],
            ["soda-1", "in", "table-2"]]
    layout = {"entities": ents, "relations": rels, "agent": {"location": "room-1"}}
    (DATA / "layouts" / "robot-lab.json").write_text(json.dumps(layout, indent=1) + "\n")
    get_bag = ["MoveToObject table-2", "MoveToObject soda-1", "PickupObject soda-1",
               "MoveToObject human-1", "DropObject", "SpeakToHuman human-1", "MoveToObject bag-1",
               "PickupObject bag-1"]
    apple_in = ["MoveToObject table-1", "MoveToObject apple-1", "PickupObject apple-1",
                "MoveToObject redcontainer-1", "PlaceObject apple-1 in redcontainer-1"]
    can_in = ["MoveToObject table-2", "MoveToObject can-1", "PickupObject can-1",
              "MoveToObject redcontainer-1", "PlaceObject can-1 in redcontainer-1"]
    defs = [
        ("all-in-red", "place all the items on the tables in the red container.",
         ["(in apple-1 redcontainer-1)", "(in can-1 redcontainer-1)"], apple_in + can_in),
        ("get-bag", "pick up the bag.", ["(holding bag-1)"], get_bag),
        ("apple-look-bag", "place the apple in the red container and then look at the bag.",
         ["(in apple-1 redcontainer-1)", "(islookedat bag-1)"],
         apple_in + get_bag[:-2] + ["LookAtObject bag-1"]),
        ("bag-apple-red", "place the bag and the apple in the red container.",
         ["(in bag-1 redcontainer-1)", "(in apple-1 redcontainer-1)"],
         apple_in + get_bag + ["MoveToObject redcontainer-1", "PlaceObject bag-1 in redcontainer-1"]),
        ("can-to-cone", "bring the can to the traffic cone and drop it.", ["(in can-1 trafficcone-1)"],
         ["MoveToObject table-2", "MoveToObject can-1", "PickupObject can-1", "MoveToObject trafficcone-1",
          "DropObject"]),
        ("apple-red-bag-cone", "place the apple in the red container and drop the bag beside the traffic cone.",
         ["(in apple-1 redcontainer-1)", "(in bag-1 trafficcone-1)"],
         apple_in + get_bag + ["MoveToObject trafficcone-1", "DropObject"]),
        ("blue-bag-red", "place the bag in the red container.", ["(in bag-1 redcontainer-1)"],
         get_bag + ["MoveToObject redcontainer-1", "PlaceObject bag-1 in redcontainer-1"]),
        ("apple-red", "put the apple in the red container.", ["(in apple-1 redcontainer-1)"], apple_in),
        ("soda-to-table", "take the soda to the first table.", ["(in soda-1 table-1)"],
         ["MoveToObject table-2", "MoveToObject soda-1", "PickupObject soda-1",
          "MoveToObject table-1", "PlaceObject soda-1 in table-1"]),
        ("can-apple-swap", "put the can on the first table and the apple on the second table.",
         ["(in can-1 table-1)", "(in apple-1 table-2)"],
         ["MoveToObject table-2", "MoveToObject can-1", "PickupObject can-1", "MoveToObject table-1",
          "PlaceObject can-1 in table-1", "MoveToObject apple-1", "PickupObject apple-1",
          "MoveToObject table-2", "PlaceObject apple-1 in table-2"]),
    ]
    dialogue = {"human": "human-1", "wants": "isdrink",
                "ask": "I will hand you my bag once you bring me something to drink.",
                "thanks": "Thanks for the drink! Go ahead and take the bag."}
    tasks = [{"id": f"robot-{name}", "nl_goal": nl, "layout": "robot-lab", "success": success,
              "reference": ref, "dialogue": dialogue} for name, nl, success, ref in defs]
    return {"id": "robot", "action_set": "robot", "max_steps": 50, "tasks": tasks}


def main():
    (DATA / "layouts").mkdir(parents=True, exist_ok=True)
    (DATA / "suites").mkdir(parents=True, exist_ok=True)
    for suite in (simple_suite(), complex_suite(), robot_suite()):
        (DATA / "suites" / f"{suite['id']}.json").write_text(json.dumps(suite, indent=1) + "\n")
        print(suite["id"], len(suite["tasks"]), "tasks")


if __name__ == "__main__":
    main()
